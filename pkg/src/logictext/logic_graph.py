"""Logical graphs and structure-aware attention masks.

The logical graph connects every operator to each of its direct arguments.
The attention mask derived from it restricts which tokens of the linearized
form may attend to which: an operator sees its own clause punctuation and the
heads of its arguments, a terminal word sees its own node, its parent
operator and the parent's clause punctuation.
"""

import logging
from collections.abc import Iterable
from dataclasses import dataclass
from enum import Enum
from typing import Any

import numpy as np
from rdflib import RDF, RDFS, Graph, Literal, Namespace

from logictext.exceptions import ShapeError
from logictext.logic_form import LogicNode, LogicTree

logger = logging.getLogger(__name__)

LF = Namespace("urn:logictext:")

# Logit written into masked cells in additive mode.
MASKED_LOGIT = -1e9


class MaskPolicy(str, Enum):
    """Which structural relations a token may see."""

    CHILDREN_ONLY = "children_only"
    PARENT_AND_CHILDREN = "parent_and_children"


class ApplyMode(str, Enum):
    """How a mask is combined with attention scores."""

    LITERAL = "literal"
    ADDITIVE = "additive"


@dataclass(frozen=True)
class LogicGraph:
    """Undirected parent-child edge set of a logical-form tree."""

    nodes: tuple[LogicNode, ...]
    edges: frozenset[tuple[int, int]]

    def has_edge(self, a: int, b: int) -> bool:
        """Whether nodes a and b are joined, in either direction."""
        return (a, b) in self.edges or (b, a) in self.edges

    def degree(self, node_id: int) -> int:
        """Number of edges touching the node."""
        return sum(1 for edge in self.edges if node_id in edge)

    def neighbours(self, node_id: int) -> set[int]:
        """Ids of the parent and children of the node."""
        return {b if a == node_id else a for a, b in self.edges if node_id in (a, b)}


@dataclass(frozen=True, eq=False)
class MaskMatrix:
    """Square 0/1 visibility matrix over the tokens of a logical form."""

    tokens: tuple[str, ...]
    policy: MaskPolicy
    cells: np.ndarray

    @property
    def order(self) -> int:
        return len(self.tokens)

    def row(self, position: int) -> tuple[int, ...]:
        return tuple(int(value) for value in self.cells[position])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MaskMatrix):
            return NotImplemented
        return (
            self.tokens == other.tokens
            and self.policy == other.policy
            and np.array_equal(self.cells, other.cells)
        )

    def to_record(self) -> dict[str, Any]:
        """Dense export record: token labels, policy and row-major rows."""
        return {
            "tokens": list(self.tokens),
            "policy": self.policy.value,
            "mask": self.cells.astype(int).tolist(),
        }


def build_graph(tree: LogicTree) -> LogicGraph:
    """
    Build the logical graph of a tree.

    Args:
        tree: Parsed logical form

    Returns:
        Graph with one (operator, child) edge per direct argument
    """
    edges = frozenset(
        (node.node_id, child.node_id) for node in tree.root.walk() for child in node.children
    )
    return LogicGraph(nodes=tree.nodes(), edges=edges)


def attention_mask(
    tree: LogicTree,
    policy: MaskPolicy = MaskPolicy.CHILDREN_ONLY,
) -> MaskMatrix:
    """
    Derive the attention-mask matrix of a tree.

    Punctuation tokens take the row of the operator owning them. Under
    ``parent_and_children`` every operator additionally sees its parent
    operator token.

    Args:
        tree: Parsed logical form
        policy: Visibility policy

    Returns:
        Mask with ones on the diagonal and on every permitted cell
    """
    n = len(tree.tokens)
    cells = np.eye(n, dtype=np.uint8)
    parents = tree.parents()

    for node in tree.root.walk():
        parent = parents.get(node.node_id)
        if node.is_operator:
            punctuation = tree.punctuation_positions(node.node_id)
            rows = [node.span[0], *punctuation]
            visible = list(rows)
            for child in node.children:
                visible.extend(child.head_positions)
            if policy is MaskPolicy.PARENT_AND_CHILDREN and parent is not None:
                visible.append(parent.span[0])
        else:
            rows = list(node.head_positions)
            visible = list(rows)
            if parent is not None:
                visible.append(parent.span[0])
                visible.extend(tree.punctuation_positions(parent.node_id))
        cells[np.ix_(rows, visible)] = 1

    return MaskMatrix(tokens=tree.tokens.texts, policy=policy, cells=cells)


def apply_mask(
    mask: MaskMatrix,
    scores: Iterable[Iterable[float]] | np.ndarray,
    mode: ApplyMode = ApplyMode.ADDITIVE,
) -> np.ndarray:
    """
    Combine a mask with raw attention scores and normalize each row.

    ``literal`` evaluates softmax(M * A) as written, so masked cells keep a
    logit of 0 and still receive weight. ``additive`` writes a large negative
    logit into masked cells before the softmax.

    Args:
        mask: Attention mask
        scores: n x n attention scores
        mode: Combination mode

    Returns:
        Row-stochastic n x n matrix

    Raises:
        ShapeError: If the score matrix is not n x n
    """
    values = np.asarray(scores, dtype=np.float64)
    if values.shape != mask.cells.shape:
        raise ShapeError(f"scores have shape {values.shape}, mask has {mask.cells.shape}")

    if mode is ApplyMode.LITERAL:
        logits = mask.cells * values
    else:
        logits = np.where(mask.cells == 1, values, MASKED_LOGIT)

    shifted = logits - logits.max(axis=1, keepdims=True)
    weights = np.exp(shifted)
    return weights / weights.sum(axis=1, keepdims=True)


def mask_record(mask: MaskMatrix, sample_id: str | int | None = None) -> dict[str, Any]:
    """Export record of a mask, keyed by sample id for batched files."""
    record = mask.to_record()
    if sample_id is not None:
        record = {"id": sample_id, **record}
    return record


def graph_to_rdf(tree: LogicTree) -> Graph:
    """
    Render the logical graph as RDF.

    Nodes are ``urn:logictext:n<id>`` in preorder, typed Operator or Terminal,
    labelled with their name, and linked to their arguments through
    ``child`` with an ``argumentIndex`` on the argument.

    Args:
        tree: Parsed logical form

    Returns:
        RDF graph of the tree
    """
    graph = Graph()
    graph.bind("lf", LF)

    for node in tree.root.walk():
        subject = LF[f"n{node.node_id}"]
        graph.add((subject, RDF.type, LF.Operator if node.is_operator else LF.Terminal))
        graph.add((subject, RDFS.label, Literal(node.name)))
        for index, child in enumerate(node.children):
            child_ref = LF[f"n{child.node_id}"]
            graph.add((subject, LF.child, child_ref))
            graph.add((child_ref, LF.argumentIndex, Literal(index)))

    if tree.asserts_true:
        graph.add((LF.n0, LF.assertsTrue, Literal(True)))

    logger.debug("Rendered logical graph as %d triples", len(graph))
    return graph


def graph_to_dict(tree: LogicTree) -> dict[str, list[dict[str, Any]]]:
    """Nodes and edges of the logical graph as plain dictionaries."""
    graph = build_graph(tree)
    nodes = [
        {"id": node.node_id, "kind": node.kind.value, "label": node.name}
        for node in graph.nodes
    ]
    edges = [{"source": a, "target": b} for a, b in sorted(graph.edges)]
    return {"nodes": nodes, "edges": edges}
