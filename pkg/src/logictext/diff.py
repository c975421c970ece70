"""Logical-form comparison utilities."""

from dataclasses import dataclass

from rdflib import Graph
from rdflib.compare import graph_diff, to_isomorphic

from logictext.logic_form import LogicTree, linearize, parse_form, terminal_renames
from logictext.logic_graph import graph_to_rdf


@dataclass(frozen=True)
class FormDiff:
    """Triple-level difference between two logical forms."""

    first: str
    second: str
    in_both: Graph
    only_in_first: Graph
    only_in_second: Graph
    renames: tuple[tuple[str, str], ...] | None

    @property
    def identical(self) -> bool:
        return not self.only_in_first and not self.only_in_second

    @property
    def same_structure(self) -> bool:
        """True when the forms differ at most in terminal names."""
        return self.renames is not None


def compare_trees(first: LogicTree, second: LogicTree) -> FormDiff:
    """
    Compare two parsed logical forms.

    Args:
        first: First form
        second: Second form

    Returns:
        Common and exclusive triples of their RDF graphs, plus the terminal
        renames turning the first into the second when the shapes agree
    """
    in_both, only_in_first, only_in_second = graph_diff(
        to_isomorphic(graph_to_rdf(first)), to_isomorphic(graph_to_rdf(second))
    )
    renames = terminal_renames(first, second)
    return FormDiff(
        first=linearize(first),
        second=linearize(second),
        in_both=in_both,
        only_in_first=only_in_first,
        only_in_second=only_in_second,
        renames=None if renames is None else tuple(sorted(renames)),
    )


def compare_forms(first: str, second: str) -> FormDiff:
    """Parse and compare two linearized logical forms."""
    return compare_trees(parse_form(first), parse_form(second))


def format_triple(triple: tuple) -> str:  # type: ignore[type-arg]
    """
    Format an RDF triple for display.

    Args:
        triple: RDF triple (subject, predicate, object)

    Returns:
        Formatted string
    """

    def format_node(node: object) -> str:
        s = str(node)
        if s.startswith("urn:logictext:"):
            return s.removeprefix("urn:logictext:")
        if "#" in s:
            return s.split("#")[-1]
        return s

    subject, predicate, obj = triple
    return f"{format_node(subject)} → {format_node(predicate)} → {format_node(obj)}"


def print_form_diff(result: FormDiff, limit: int = 20) -> None:
    """
    Print a human-readable form comparison.

    Args:
        result: Comparison to print
        limit: Maximum triples listed per side
    """
    print("=" * 80)
    print("Logical Form Comparison")
    print("=" * 80)
    print(f"\nForm 1: {result.first}")
    print(f"Form 2: {result.second}")

    print("\n📊 Statistics:")
    print(f"  Common triples:  {len(result.in_both)}")
    print(f"  Only in form 1:  {len(result.only_in_first)}")
    print(f"  Only in form 2:  {len(result.only_in_second)}")

    if result.identical:
        print("\n✅ Forms are identical")
    elif result.same_structure:
        print("\n🔁 Same structure, renamed terminals:")
        for old, new in result.renames or ():
            print(f"  {old} → {new}")
    else:
        print("\n❌ Forms differ in structure")

    for label, sign, triples in (
        ("Removed in form 2", "-", result.only_in_first),
        ("Added in form 2", "+", result.only_in_second),
    ):
        if not triples:
            continue
        print(f"\n{label}:")
        ordered = sorted(triples)
        for triple in ordered[:limit]:
            print(f"  {sign} {format_triple(triple)}")
        if len(ordered) > limit:
            print(f"  ... and {len(ordered) - limit} more")

    print("\n" + "=" * 80)
