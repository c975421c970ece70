"""Counterfactual sample synthesis by table-header replacement.

A header that appears both as a terminal of the logical form and verbatim in
the label sentence is replaced on both sides, producing a sample whose
operator/header pairing rarely occurs in the original data. Tables are never
edited.
"""

import logging
import math
import re
from collections.abc import Sequence
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction

import numpy as np

from logictext.config import Config, default_config
from logictext.dataset_io import Sample
from logictext.exceptions import EmptyDataset, NotEligible, PoolExhausted, UnknownHeader
from logictext.logic_form import linearize, normalize_text, rename_terminal, terminal_renames

logger = logging.getLogger(__name__)

__all__ = [
    "HeaderDataType",
    "HeaderPool",
    "ReplacementStrategy",
    "Sample",
    "StrategyKind",
    "build_header_pool",
    "classify_header_type",
    "find_replaceable_headers",
    "synthesize_dataset",
    "synthesize_sample",
]

_MONTHS = (
    "january|february|march|april|may|june|july|august|september|october|november|december"
    "|jan|feb|mar|apr|jun|jul|aug|sep|sept|oct|nov|dec"
)
_DAY = r"\d{1,2}(?:st|nd|rd|th)?"
_DATE_PATTERNS = [
    re.compile(r"^\d{1,2}\s*/\s*\d{1,2}\s*/\s*\d{2,4}$"),
    re.compile(r"^\d{4}\s*-\s*\d{1,2}\s*-\s*\d{1,2}$"),
    re.compile(
        rf"^(?:[a-z]+day\s*,?\s*)?(?:{_DAY}\s+)?(?:{_MONTHS})\.?"
        rf"(?:\s+{_DAY})?(?:\s*,?\s*\d{{4}})?$",
        re.IGNORECASE,
    ),
    re.compile(r"^\d{1,2}:\d{2}(:\d{2})?(\.\d+)?$"),
    re.compile(r"^(1[5-9]|20)\d{2}\s*[-/]\s*(\d{2}|\d{4})$"),
]
_YEAR = re.compile(r"^(1[5-9]|20)\d{2}$")
_NUMBER = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)$")
_TIME_HINTS = ("date", "year", "time")
_FORBIDDEN = re.compile(r"[{};=]")


class HeaderDataType(str, Enum):
    """Data type of a table column."""

    STRING = "string"
    NUMBER = "number"
    TIME = "time"


class StrategyKind(str, Enum):
    """How replacement headers are drawn."""

    RANDOM_STRING = "random_string"
    DISTURB = "disturb"
    MIX = "mix"


@dataclass(frozen=True)
class ReplacementStrategy:
    """Replacement strategy with the synthetic-to-original size ratio r."""

    kind: StrategyKind
    ratio: Fraction = Fraction(1)
    seed: int = 0
    infinite: bool = False
    emit_count: int | None = None

    def __post_init__(self) -> None:
        if self.ratio < 0:
            raise ValueError(f"ratio must be non-negative, got {self.ratio}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must fit in 64 bits, got {self.seed}")

    def target_size(self, dataset_size: int) -> int:
        """Number of counterfactual samples to emit for a dataset of this size."""
        if self.infinite:
            return dataset_size if self.emit_count is None else self.emit_count
        return math.ceil(self.ratio * dataset_size)


@dataclass(frozen=True)
class HeaderPool:
    """Deduplicated headers of a dataset grouped by data type."""

    pools: dict[HeaderDataType, tuple[str, ...]]

    def __getitem__(self, data_type: HeaderDataType) -> tuple[str, ...]:
        return self.pools.get(data_type, ())

    def type_of(self, header: str) -> HeaderDataType | None:
        key = normalize_text(header)
        for data_type, headers in self.pools.items():
            if any(normalize_text(h) == key for h in headers):
                return data_type
        return None

    def candidates(self, data_type: HeaderDataType, exclude: str) -> list[str]:
        """Headers of one type usable as replacements for ``exclude``."""
        key = normalize_text(exclude)
        return [
            h for h in self[data_type]
            if normalize_text(h) != key and not _FORBIDDEN.search(h) and h.strip()
        ]

    def to_record(self) -> dict[str, list[str]]:
        return {data_type.value: list(headers) for data_type, headers in self.pools.items()}


def _is_number(cell: str) -> bool:
    return bool(_NUMBER.match(cell.replace(",", "").replace("%", "").strip()))


def _is_time(cell: str) -> bool:
    text = cell.strip()
    return bool(_YEAR.match(text)) or any(p.search(text) for p in _DATE_PATTERNS)


def classify_header_type(
    sample: Sample, header: str, config: Config | None = None
) -> HeaderDataType:
    """
    Infer the data type of a column from its cells.

    A column is time when at least the threshold share of its non-empty cells
    look like dates, number when that share parses as numbers, else string.
    Bare years are both; the header name ("date", "year", "time") breaks the
    tie toward time.

    Args:
        sample: Record holding the table
        header: Column name
        config: Configuration providing the threshold

    Returns:
        Inferred data type

    Raises:
        UnknownHeader: If the header is not in the table
    """
    if header not in sample.table_header:
        raise UnknownHeader(f"header {header!r} not in table {list(sample.table_header)}")

    threshold = (config or default_config).type_threshold
    hinted = any(hint in header.lower() for hint in _TIME_HINTS)
    cells = [cell for cell in sample.column(header) if cell.strip()]
    if not cells:
        return HeaderDataType.TIME if hinted else HeaderDataType.STRING

    time_share = sum(_is_time(c) for c in cells) / len(cells)
    number_share = sum(_is_number(c) for c in cells) / len(cells)

    if time_share >= threshold and number_share >= threshold:
        return HeaderDataType.TIME if hinted else HeaderDataType.NUMBER
    if time_share >= threshold:
        return HeaderDataType.TIME
    if number_share >= threshold:
        return HeaderDataType.NUMBER
    return HeaderDataType.STRING


def build_header_pool(dataset: Sequence[Sample], config: Config | None = None) -> HeaderPool:
    """
    Group every header of every table by data type.

    A header keeps the type of its first occurrence, so pools stay disjoint.

    Raises:
        EmptyDataset: If the dataset has no samples
    """
    if not dataset:
        raise EmptyDataset("cannot build a header pool from an empty dataset")

    seen: set[str] = set()
    pools: dict[HeaderDataType, list[str]] = {t: [] for t in HeaderDataType}
    for sample in dataset:
        for header in sample.table_header:
            key = normalize_text(header)
            if key in seen:
                continue
            seen.add(key)
            pools[classify_header_type(sample, header, config)].append(header)

    logger.info(
        "Header pool: %s",
        ", ".join(f"{t.value}={len(h)}" for t, h in pools.items()),
    )
    return HeaderPool(pools={t: tuple(h) for t, h in pools.items()})


def _header_pattern(header: str) -> re.Pattern[str]:
    words = [re.escape(word) for word in header.split()]
    return re.compile(r"(?<!\w)" + r"\s+".join(words) + r"(?!\w)", re.IGNORECASE)


def find_replaceable_headers(sample: Sample) -> list[tuple[str, list[tuple[int, int]]]]:
    """
    Find headers present both as form terminals and in the label sentence.

    Matching against the sentence is case-insensitive, whitespace-tolerant and
    aligned to word boundaries.

    Returns:
        (header, character spans in ``sent``) pairs in form order; empty when
        the sample is ineligible
    """
    headers = {normalize_text(h): h for h in sample.table_header if h.strip()}
    found: list[tuple[str, list[tuple[int, int]]]] = []
    taken: set[str] = set()

    for terminal in sample.tree.terminals():
        key = normalize_text(terminal.name)
        if key not in headers or key in taken:
            continue
        taken.add(key)
        spans = [m.span() for m in _header_pattern(key).finditer(sample.sent)]
        if spans:
            found.append((headers[key], spans))
    return found


def _random_string(rng: np.random.Generator, config: Config) -> str:
    low, high = config.random_length
    alphabet = config.random_alphabet
    length = int(rng.integers(low, high + 1))
    return "".join(alphabet[int(i)] for i in rng.integers(0, len(alphabet), size=length))


def _pick(rng: np.random.Generator, items: Sequence[str]) -> str:
    return items[int(rng.integers(len(items)))]


def synthesize_sample(
    sample: Sample,
    strategy: StrategyKind | ReplacementStrategy,
    pool: HeaderPool,
    rng: np.random.Generator,
    config: Config | None = None,
) -> Sample:
    """
    Build one counterfactual sample.

    One replaceable header is drawn uniformly; its terminal(s) in the form and
    every matched span in the sentence are rewritten to the replacement.
    ``mix`` draws between the two base strategies with a fair coin.

    Args:
        sample: Eligible source sample
        strategy: Replacement strategy
        pool: Header pool of the dataset
        rng: Random generator for this draw
        config: Configuration for random strings

    Returns:
        Counterfactual sample with the same topic and table

    Raises:
        NotEligible: If the sample has no replaceable header
        PoolExhausted: If disturb finds no other header of the same type
    """
    config = config or default_config
    kind = strategy.kind if isinstance(strategy, ReplacementStrategy) else StrategyKind(strategy)

    replaceable = find_replaceable_headers(sample)
    if not replaceable:
        raise NotEligible("no header occurs in both the logical form and the sentence")

    header, spans = replaceable[int(rng.integers(len(replaceable)))]

    if kind is StrategyKind.MIX:
        kind = StrategyKind.DISTURB if rng.integers(2) == 0 else StrategyKind.RANDOM_STRING

    if kind is StrategyKind.DISTURB:
        data_type = pool.type_of(header) or classify_header_type(sample, header, config)
        candidates = pool.candidates(data_type, exclude=header)
        if not candidates:
            raise PoolExhausted(f"no other {data_type.value} header to replace {header!r}")
        replacement = _pick(rng, candidates)
    else:
        replacement = _random_string(rng, config)

    tree = rename_terminal(sample.tree, header, replacement)
    renames = terminal_renames(sample.tree, tree)
    if renames is None or len({new for _, new in renames}) != 1:
        raise NotEligible(f"replacing {header!r} would change the form structure")

    sent = sample.sent
    for start, end in sorted(spans, reverse=True):
        sent = sent[:start] + replacement + sent[end:]

    logger.debug("Replaced %r with %r (%s)", header, replacement, kind.value)
    return replace(sample, logic_str=linearize(tree), sent=sent)


def synthesize_dataset(
    dataset: Sequence[Sample],
    strategy: ReplacementStrategy,
    pool: HeaderPool | None = None,
    config: Config | None = None,
    include_original: bool = False,
) -> list[Sample]:
    """
    Emit the counterfactual set for a dataset.

    ceil(r * |S|) samples are produced by cycling over the eligible originals.
    Emitted sample k draws from a generator seeded by (seed, k), so the
    output depends only on the dataset, the strategy and the seed. ``mix``
    alternates disturb (even k) and random strings (odd k).

    Args:
        dataset: Original samples S
        strategy: Strategy, ratio and seed
        pool: Header pool (built from the dataset when omitted)
        config: Configuration for classification and random strings
        include_original: Prepend the originals, yielding S followed by the synthetic set

    Returns:
        Synthetic samples, optionally preceded by the originals

    Raises:
        NotEligible: If samples are requested but none is eligible
    """
    config = config or default_config
    target = strategy.target_size(len(dataset))
    result = list(dataset) if include_original else []
    if target == 0:
        return result

    eligible = [sample for sample in dataset if find_replaceable_headers(sample)]
    if not eligible:
        raise NotEligible("no sample has a header shared by its form and sentence")
    if pool is None:
        pool = build_header_pool(dataset, config)

    logger.info(
        "Synthesizing %d counterfactual sample(s) from %d eligible of %d (%s, seed %d)",
        target,
        len(eligible),
        len(dataset),
        strategy.kind.value,
        strategy.seed,
    )

    fallbacks = 0
    for k in range(target):
        source = eligible[k % len(eligible)]
        kind = strategy.kind
        if kind is StrategyKind.MIX:
            kind = StrategyKind.DISTURB if k % 2 == 0 else StrategyKind.RANDOM_STRING

        rng = np.random.default_rng([strategy.seed, k])
        try:
            result.append(synthesize_sample(source, kind, pool, rng, config))
        except (PoolExhausted, NotEligible) as e:
            fallbacks += 1
            logger.debug("Falling back to a random string: %s", e)
            rng = np.random.default_rng([strategy.seed, k])
            result.append(synthesize_sample(source, StrategyKind.RANDOM_STRING, pool, rng, config))

    if fallbacks:
        logger.warning("%d draw(s) fell back to random strings", fallbacks)
    return result
