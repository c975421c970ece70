"""Logical-consistency and fluency metrics for generated sentences.

BLEC checks that a sentence surfaces the operators (through keywords) and
numbers of its logical form; BLEC* additionally requires the form's table
headers. The mispredicted-token rate counts form tokens missing from the
sentence; BLEU-4 measures fluency against the label sentences.
"""

import json
import logging
import re
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from enum import Enum
from pathlib import Path
from typing import Any

from sacrebleu.metrics import BLEU

from logictext.config import default_config
from logictext.dataset_io import Sample
from logictext.exceptions import ConfigurationError, EmptyDataset, LengthMismatch
from logictext.logic_form import ALL_ROWS, DEFAULT_REGISTRY, OperatorRegistry, normalize_text

logger = logging.getLogger(__name__)

_WORDS = re.compile(r"(?<!\w)[+-]?\d[\d,]*(?:\.\d+)?%?|\w+|[^\w\s]")
_NUMERIC = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)$")
_NTH_OPERATORS = {"nth_max", "nth_min", "nth_argmax", "nth_argmin"}


class BlecMode(str, Enum):
    """Which checkables a sentence must surface."""

    BLEC = "blec"
    BLEC_STAR = "blec_star"


def canonical_number(text: str) -> str | None:
    """
    Canonicalize a numeric literal.

    Digit-grouping commas and percent signs are dropped and leading or
    trailing zeros removed, so "5,032" and "05032" both give "5032".

    Returns:
        Canonical text, or None if ``text`` is not a number
    """
    cleaned = text.strip().replace(",", "").rstrip("%")
    if not _NUMERIC.match(cleaned):
        return None
    try:
        value = Decimal(cleaned)
    except InvalidOperation:
        return None
    if value == value.to_integral_value():
        return str(int(value))
    return format(value.normalize(), "f")


def sentence_words(text: str) -> list[str]:
    """Lowercased words and punctuation marks, numbers canonicalized."""
    words = []
    for word in _WORDS.findall(text.lower()):
        number = canonical_number(word)
        words.append(number if number is not None else word)
    return words


class OperatorLexicon:
    """Surface keywords that realize each operator in a sentence.

    Operators without keywords are vacuous: they never fail a check.
    """

    def __init__(self, keywords: Mapping[str, Iterable[str]]):
        self._keywords = {op: frozenset(normalize_text(k) for k in kws) for op, kws in keywords.items()}
        self._patterns = {
            op: [re.compile(r"(?<!\w)" + r"\s+".join(map(re.escape, kw.split()))) for kw in sorted(kws)]
            for op, kws in self._keywords.items()
        }

    def keywords(self, operator: str) -> frozenset[str]:
        return self._keywords.get(operator, frozenset())

    def is_vacuous(self, operator: str) -> bool:
        return not self.keywords(operator)

    def satisfied(self, operator: str, text: str) -> bool:
        """Whether a keyword of the operator starts a word in the normalized text."""
        patterns = self._patterns.get(operator)
        if not patterns:
            return True
        return any(p.search(text) for p in patterns)

    @classmethod
    def from_record(
        cls, record: Mapping[str, Any], registry: OperatorRegistry | None = None
    ) -> "OperatorLexicon":
        """
        Build a lexicon from a decoded lexicon file.

        Accepts either ``{"ordinals": [...], "operators": {op: [kw, ...]}}`` or
        a flat ``{op: [kw, ...]}`` mapping. ``{ordinal}`` in a keyword expands
        over the ordinals. Registry operators missing from the record are vacuous.
        """
        operators = record.get("operators", record)
        ordinals = record.get("ordinals", []) if "operators" in record else []
        if not isinstance(operators, Mapping):
            raise ConfigurationError("lexicon 'operators' must be an object")

        keywords: dict[str, set[str]] = {}
        for op, entries in operators.items():
            if not isinstance(entries, list):
                raise ConfigurationError(f"lexicon entry for {op!r} must be a list")
            expanded: set[str] = set()
            for keyword in entries:
                if "{ordinal}" in keyword:
                    expanded.update(keyword.replace("{ordinal}", o) for o in ordinals)
                else:
                    expanded.add(keyword)
            keywords[op] = expanded

        for op in (registry or DEFAULT_REGISTRY).symbols:
            keywords.setdefault(op, set())
        return cls(keywords)

    @classmethod
    def from_file(cls, path: Path, registry: OperatorRegistry | None = None) -> "OperatorLexicon":
        """Load a lexicon file."""
        try:
            record = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigurationError(f"cannot read lexicon {path}: {e}")
        logger.debug("Loaded lexicon from %s", path)
        return cls.from_record(record, registry)

    @classmethod
    def default(cls) -> "OperatorLexicon":
        """Lexicon from the configured (by default packaged) file."""
        return cls.from_file(default_config.lexicon_path)


@dataclass(frozen=True)
class Checkables:
    """What a sentence must surface to be consistent with its form."""

    operators: frozenset[str]
    numbers: frozenset[str]
    headers: frozenset[str]


@dataclass(frozen=True)
class Consistency:
    """Outcome of a consistency check with the checkables that were missed."""

    passed: bool
    missing_operators: tuple[str, ...] = ()
    missing_numbers: tuple[str, ...] = ()
    missing_headers: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.passed

    def describe(self) -> str:
        parts = []
        if self.missing_operators:
            parts.append(f"operators: {', '.join(self.missing_operators)}")
        if self.missing_numbers:
            parts.append(f"numbers: {', '.join(self.missing_numbers)}")
        if self.missing_headers:
            parts.append(f"headers: {', '.join(self.missing_headers)}")
        return "; ".join(parts)


@dataclass(frozen=True)
class SampleFailure:
    """A sample that failed a metric."""

    index: int
    detail: str


@dataclass(frozen=True)
class ScoreReport:
    """Corpus-level score with per-sample values."""

    metric: str
    score: float
    values: tuple[float, ...] = ()
    failures: tuple[SampleFailure, ...] = field(default=())

    @property
    def title(self) -> str:
        return f"{self.metric.upper()} report"

    @property
    def columns(self) -> tuple[str, ...]:
        return ("sample", "value", "detail")

    def rows(self) -> list[tuple[Any, ...]]:
        details = {failure.index: failure.detail for failure in self.failures}
        return [(i, round(value, 6), details.get(i, "")) for i, value in enumerate(self.values)]

    def summary(self) -> str:
        if not self.values:
            return f"{self.metric}: {self.score:.2f}"
        return f"{self.metric}: {self.score:.2f} over {len(self.values)} sample(s)"

    def to_record(self) -> dict[str, Any]:
        return {
            "metric": self.metric,
            "score": self.score,
            "values": list(self.values),
            "failures": [{"index": f.index, "detail": f.detail} for f in self.failures],
        }


def extract_checkables(sample: Sample) -> Checkables:
    """
    Collect the operators, numbers and headers a sentence must surface.

    Numbers are canonical numeric terminal words that are not table headers.
    The index argument of nth_* operators is left to the operator's ordinal
    keywords.

    Raises:
        FormError: If the logical form does not parse
    """
    tree = sample.tree
    table_headers = {normalize_text(h) for h in sample.table_header}

    skipped: set[int] = set()
    for node in tree.operators():
        if node.name in _NTH_OPERATORS and len(node.children) >= 3:
            skipped.add(node.children[2].node_id)

    numbers: set[str] = set()
    headers: set[str] = set()
    for terminal in tree.terminals():
        name = normalize_text(terminal.name)
        if name == ALL_ROWS:
            continue
        if name in table_headers:
            headers.add(name)
            continue
        words = name.split()
        headers.update(word for word in words if word in table_headers)
        if terminal.node_id in skipped:
            continue
        for word in words:
            if word in table_headers:
                continue
            number = canonical_number(word)
            if number is not None:
                numbers.add(number)

    return Checkables(
        operators=frozenset(node.name for node in tree.operators()),
        numbers=frozenset(numbers),
        headers=frozenset(headers),
    )


def consistency_indicator(
    sample: Sample,
    prediction: str,
    mode: BlecMode = BlecMode.BLEC,
    lexicon: OperatorLexicon | None = None,
) -> Consistency:
    """
    Decide whether a prediction is logically consistent with the sample's form.

    Args:
        sample: Gold sample carrying the logical form and table
        prediction: Generated sentence
        mode: ``blec`` checks operators and numbers, ``blec_star`` also headers
        lexicon: Operator keywords (default lexicon when omitted)

    Returns:
        Indicator with the missed checkables
    """
    lexicon = lexicon or OperatorLexicon.default()
    checkables = extract_checkables(sample)
    text = normalize_text(prediction)
    numbers = {w for w in sentence_words(prediction) if _NUMERIC.match(w)}

    missing_operators = sorted(op for op in checkables.operators if not lexicon.satisfied(op, text))
    missing_numbers = sorted(n for n in checkables.numbers if n not in numbers)
    missing_headers: list[str] = []
    if mode is BlecMode.BLEC_STAR:
        missing_headers = sorted(h for h in checkables.headers if h not in text)

    return Consistency(
        passed=not (missing_operators or missing_numbers or missing_headers),
        missing_operators=tuple(missing_operators),
        missing_numbers=tuple(missing_numbers),
        missing_headers=tuple(missing_headers),
    )


def _check_aligned(dataset: Sequence[Any], predictions: Sequence[str]) -> None:
    if not dataset:
        raise EmptyDataset("cannot score an empty dataset")
    if len(dataset) != len(predictions):
        raise LengthMismatch(f"{len(dataset)} sample(s) but {len(predictions)} prediction(s)")


def corpus_score(
    dataset: Sequence[Sample],
    predictions: Sequence[str],
    mode: BlecMode = BlecMode.BLEC,
    lexicon: OperatorLexicon | None = None,
) -> ScoreReport:
    """
    Score a prediction set with BLEC or BLEC*.

    Returns:
        Report with score = 100 x mean indicator and per-sample failures

    Raises:
        EmptyDataset: If the dataset is empty
        LengthMismatch: If predictions are not aligned with the dataset
    """
    _check_aligned(dataset, predictions)
    lexicon = lexicon or OperatorLexicon.default()

    values = []
    failures = []
    for index, (sample, prediction) in enumerate(zip(dataset, predictions)):
        result = consistency_indicator(sample, prediction, mode, lexicon)
        values.append(1.0 if result.passed else 0.0)
        if not result.passed:
            failures.append(SampleFailure(index=index, detail=result.describe()))

    score = 100.0 * sum(values) / len(values)
    logger.info("%s = %.2f (%d/%d passed)", mode.value, score, int(sum(values)), len(values))
    return ScoreReport(metric=mode.value, score=score, values=tuple(values), failures=tuple(failures))


def mispredicted_token_rate(
    sample: Sample,
    prediction: str,
    include_operators: bool = False,
    lexicon: OperatorLexicon | None = None,
) -> float:
    """
    Share of the form's tokens that the prediction fails to reproduce.

    Countable tokens are terminal words other than ``all_rows``; with
    ``include_operators`` operators whose keywords are absent count as well.
    The denominator is the full token count of the form, punctuation included.

    Returns:
        Rate in [0, 1]
    """
    tree = sample.tree
    present = set(sentence_words(prediction))

    missing = 0
    for terminal in tree.terminals():
        for position in terminal.head_positions:
            word = tree.tokens[position].text
            if word.lower() == ALL_ROWS:
                continue
            if not all(part in present for part in sentence_words(word)):
                missing += 1

    if include_operators:
        lexicon = lexicon or OperatorLexicon.default()
        text = normalize_text(prediction)
        missing += sum(1 for op in tree.operators() if not lexicon.satisfied(op.name, text))

    return missing / len(tree.tokens)


def mtr_score(
    dataset: Sequence[Sample],
    predictions: Sequence[str],
    include_operators: bool = False,
    lexicon: OperatorLexicon | None = None,
) -> ScoreReport:
    """Corpus mispredicted-token rate, reported as 100 x mean rate."""
    _check_aligned(dataset, predictions)
    if include_operators:
        lexicon = lexicon or OperatorLexicon.default()
    values = tuple(
        mispredicted_token_rate(sample, prediction, include_operators, lexicon)
        for sample, prediction in zip(dataset, predictions)
    )
    return ScoreReport(metric="mtr", score=100.0 * sum(values) / len(values), values=values)


def bleu4(references: Sequence[str], hypotheses: Sequence[str]) -> float:
    """
    Corpus BLEU-4 of hypotheses against single references.

    Lowercased text with the international (mteval-v14) tokenizer, no
    smoothing; n-gram orders with no hypothesis n-grams are skipped. A corpus
    whose references and hypotheses are all blank matches trivially and scores 100.

    Returns:
        Score in [0, 100]

    Raises:
        EmptyDataset: If the corpus is empty
        LengthMismatch: If the sequences differ in length
    """
    _check_aligned(references, hypotheses)
    if not any(t.strip() for t in (*references, *hypotheses)):
        return 100.0
    scorer = BLEU(tokenize="intl", lowercase=True, smooth_method="none", effective_order=True)
    result = scorer.corpus_score(list(hypotheses), [list(references)])
    return float(result.score)


def bleu_score(references: Sequence[str], hypotheses: Sequence[str]) -> ScoreReport:
    """BLEU-4 wrapped in a report."""
    return ScoreReport(metric="bleu", score=bleu4(references, hypotheses))
