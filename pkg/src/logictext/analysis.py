"""Complexity measures of logical forms and complexity-bucketed reports."""

import logging
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum
from typing import Any

from logictext.dataset_io import Sample
from logictext.exceptions import LengthMismatch
from logictext.logic_form import LogicTree, normalize_text
from logictext.metrics import mispredicted_token_rate

logger = logging.getLogger(__name__)

CONVENTION = "depth counts nodes (root = 1); nodes exclude punctuation; multi-word terminals are one node"


class Axis(str, Enum):
    """Complexity axis used for bucketing."""

    DEPTH = "depth"
    NODES = "nodes"


@dataclass(frozen=True)
class Complexity:
    """Depth and node count of a logical form."""

    depth: int
    nodes: int


def complexity(tree: LogicTree) -> Complexity:
    """
    Measure a tree.

    Depth is the number of nodes on the longest root-to-leaf path; nodes
    counts operators and terminals. The "= true" assertion is not counted.
    """
    depth = 0
    stack = [(tree.root, 1)]
    nodes = 0
    while stack:
        node, level = stack.pop()
        nodes += 1
        depth = max(depth, level)
        stack.extend((child, level + 1) for child in node.children)
    return Complexity(depth=depth, nodes=nodes)


@dataclass(frozen=True)
class Bucket:
    """Samples whose complexity falls in [low, high]."""

    low: int
    high: int
    count: int
    mean_mtr: float | None

    @property
    def label(self) -> str:
        return str(self.low) if self.low == self.high else f"{self.low}-{self.high}"


@dataclass(frozen=True)
class BucketReport:
    """Mean MTR and sample count per complexity bucket."""

    axis: Axis
    width: int
    buckets: tuple[Bucket, ...]

    @property
    def title(self) -> str:
        return f"MTR by {self.axis.value} (width {self.width}; {CONVENTION})"

    @property
    def columns(self) -> tuple[str, ...]:
        return (self.axis.value, "count", "mean_mtr")

    def rows(self) -> list[tuple[Any, ...]]:
        return [
            (b.label, b.count, "" if b.mean_mtr is None else round(b.mean_mtr, 6))
            for b in self.buckets
        ]

    def summary(self) -> str:
        total = sum(b.count for b in self.buckets)
        return f"{total} sample(s) in {len(self.buckets)} bucket(s)"

    def to_record(self) -> dict[str, Any]:
        return {
            "axis": self.axis.value,
            "width": self.width,
            "convention": CONVENTION,
            "buckets": [
                {"low": b.low, "high": b.high, "count": b.count, "mean_mtr": b.mean_mtr}
                for b in self.buckets
            ],
        }


def bucket_report(
    dataset: Sequence[Sample],
    predictions: Sequence[str] | None = None,
    axis: Axis = Axis.DEPTH,
    width: int = 1,
) -> BucketReport:
    """
    Group samples by complexity and average their MTR per bucket.

    Buckets are [1, width], [width + 1, 2 * width], ...; only non-empty
    buckets are reported. Without predictions only counts are reported.

    Raises:
        LengthMismatch: If predictions are not aligned with the dataset
        ValueError: If width is not positive
    """
    if width < 1:
        raise ValueError(f"bucket width must be positive, got {width}")
    if predictions is not None and len(predictions) != len(dataset):
        raise LengthMismatch(f"{len(dataset)} sample(s) but {len(predictions)} prediction(s)")

    grouped: dict[int, list[float | None]] = {}
    for index, sample in enumerate(dataset):
        measure = complexity(sample.tree)
        value = measure.depth if axis is Axis.DEPTH else measure.nodes
        low = (value - 1) // width * width + 1
        rate = None if predictions is None else mispredicted_token_rate(sample, predictions[index])
        grouped.setdefault(low, []).append(rate)

    buckets = []
    for low in sorted(grouped):
        rates = grouped[low]
        known = [r for r in rates if r is not None]
        buckets.append(
            Bucket(
                low=low,
                high=low + width - 1,
                count=len(rates),
                mean_mtr=sum(known) / len(known) if known else None,
            )
        )

    logger.info("Bucketed %d sample(s) by %s into %d bucket(s)", len(dataset), axis.value, len(buckets))
    return BucketReport(axis=axis, width=width, buckets=tuple(buckets))


def cooccurrence(dataset: Sequence[Sample]) -> Counter[tuple[str, str]]:
    """Count (operator, header) pairs where the header is a direct argument of the operator."""
    counts: Counter[tuple[str, str]] = Counter()
    for sample in dataset:
        headers = {normalize_text(h) for h in sample.table_header}
        for node in sample.tree.operators():
            for child in node.children:
                name = normalize_text(child.name)
                if not child.is_operator and name in headers:
                    counts[(node.name, name)] += 1
    return counts


@dataclass(frozen=True)
class PairsReport:
    """Most frequent operator-header pairs."""

    pairs: tuple[tuple[str, str, int], ...]
    total: int

    @property
    def title(self) -> str:
        return "Operator-header co-occurrence"

    @property
    def columns(self) -> tuple[str, ...]:
        return ("operator", "header", "count")

    def rows(self) -> list[tuple[Any, ...]]:
        return list(self.pairs)

    def summary(self) -> str:
        return f"{len(self.pairs)} of {self.total} distinct pair(s) shown"

    def to_record(self) -> dict[str, Any]:
        return {
            "pairs": [{"operator": op, "header": h, "count": n} for op, h, n in self.pairs],
            "distinct": self.total,
        }


def pairs_report(counts: Counter[tuple[str, str]], top: int) -> PairsReport:
    """Top ``top`` pairs by count, ties broken alphabetically."""
    ordered = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return PairsReport(
        pairs=tuple((op, header, n) for (op, header), n in ordered[:top]),
        total=len(counts),
    )
