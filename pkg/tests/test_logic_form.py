"""Tests for logical-form tokenizing, parsing and linearizing."""

import pytest

from logictext.exceptions import (
    EmptyArgument,
    EmptyForm,
    MalformedClause,
    StraySeparator,
    UnbalancedBraces,
)
from logictext.logic_form import (
    DEFAULT_REGISTRY,
    LogicNode,
    LogicTree,
    NodeKind,
    OperatorRegistry,
    TokenRole,
    linearize,
    parse,
    parse_form,
    rename_terminal,
    terminal_renames,
    tokenize,
)
from tests.factories import (
    CASE_STUDY_FORM,
    EXAMPLE1_FORM,
    GAMES_FORM,
    SAMPLE1_FORM,
    SAMPLE2_FORM,
    SAMPLE3_CF_FORM,
    SAMPLE3_FORM,
    random_forms,
)

FIXTURE_FORMS = [GAMES_FORM, CASE_STUDY_FORM, EXAMPLE1_FORM, SAMPLE1_FORM, SAMPLE2_FORM, SAMPLE3_FORM, SAMPLE3_CF_FORM]


def _shape(node: LogicNode) -> tuple:
    return (node.kind, node.name, tuple(_shape(child) for child in node.children))


def test_tokenize_games_form() -> None:
    """Test that the running example splits into its 11 tokens."""
    form = tokenize(GAMES_FORM)
    assert form.texts == (
        "hop", "{", "argmax", "{", "all_rows", ";", "attendance", "}", ";", "date", "}"
    ), "Token texts should match the linearized form"
    assert [t.position for t in form] == list(range(11)), "Positions should be consecutive"
    assert form[0].role is TokenRole.OPERATOR
    assert form[4].role is TokenRole.TERMINAL_WORD
    assert form[5].role is TokenRole.SEPARATOR


@pytest.mark.parametrize("source", ["", "   ", "\n\t"])
def test_tokenize_empty(source: str) -> None:
    """Test that empty input is rejected."""
    with pytest.raises(EmptyForm):
        tokenize(source)


def test_tokenize_records_assertion() -> None:
    """Test that a trailing '= true' is stripped and recorded."""
    form = tokenize(SAMPLE1_FORM)
    assert form.assertion == "true", "Assertion suffix should be recorded"
    assert "=" not in form.texts, "Assertion should not be tokenized"


def test_structural_roles_match_text() -> None:
    """Test that punctuation roles are assigned exactly to punctuation text."""
    for source in FIXTURE_FORMS:
        for token in tokenize(source):
            assert token.role.is_structural == (token.text in "{;}"), f"Bad role for {token}"


def test_multiword_terminal_owned_by_one_node() -> None:
    """Test that a multi-word terminal is one node spanning its words."""
    tree = parse_form(SAMPLE1_FORM)
    terminal = tree.terminals()[-1]
    assert terminal.name == "dj , take me away"
    assert terminal.span[1] - terminal.span[0] == 5, "Terminal should span 5 word-tokens"
    owners = {tree.tokens[p].node_id for p in range(*terminal.span)}
    assert owners == {terminal.node_id}, "All words should be owned by the terminal"
    assert tree.asserts_true


def test_parse_games_form(games_tree: LogicTree) -> None:
    """Test the tree shape of the running example."""
    root = games_tree.root
    assert root.name == "hop" and root.is_operator
    assert [c.name for c in root.children] == ["argmax", "date"]
    assert [c.name for c in root.children[0].children] == ["all_rows", "attendance"]
    assert not games_tree.asserts_true


def test_parse_example_chain() -> None:
    """Test the nested filter chain of a counting form."""
    tree = parse_form(EXAMPLE1_FORM)
    names = []
    node = tree.root
    while node.is_operator:
        names.append(node.name)
        node = node.children[0]
    assert names == ["eq", "count", "filter_less", "filter_greater"]
    assert [c.name for c in tree.root.children[0].children[0].children[0].children] == [
        "all_rows", "year", "1975"
    ]
    assert tree.root.children[1].name == "5"
    assert tree.asserts_true


@pytest.mark.parametrize(
    ("source", "error", "position"),
    [
        ("argmax { all_rows", UnbalancedBraces, 1),
        ("hop { all_rows ; date } }", UnbalancedBraces, 6),
        ("all_rows ; date", StraySeparator, 1),
        ("hop { all_rows ; ; date }", EmptyArgument, 4),
        ("hop { }", EmptyArgument, 2),
        ("{ all_rows ; date }", MalformedClause, 0),
        ("argmax all_rows", MalformedClause, 0),
        ("hop { all_rows ; date } = false", MalformedClause, None),
    ],
)
def test_parse_errors(source: str, error: type, position: int | None) -> None:
    """Test that malformed forms raise the matching error with its position."""
    with pytest.raises(error) as excinfo:
        parse_form(source)
    if position is not None:
        assert excinfo.value.position == position, f"Wrong position for {source!r}"


def test_parse_deep_nesting() -> None:
    """Test that nesting past the recursion limit is a malformed form."""
    depth = 20_000
    with pytest.raises(MalformedClause, match="nest too deeply"):
        parse_form("max { " * depth + "all_rows" + " }" * depth)


def test_unknown_operator_parses() -> None:
    """Test that the registry does not gate parsing."""
    tree = parse_form("frobnicate { all_rows ; attendance }")
    assert tree.root.is_operator and tree.root.name == "frobnicate"
    assert "frobnicate" not in DEFAULT_REGISTRY


def test_registry_is_case_sensitive() -> None:
    """Test exact-match registry lookup."""
    assert "argmax" in DEFAULT_REGISTRY
    assert "Argmax" not in DEFAULT_REGISTRY


def test_registry_register_and_arity() -> None:
    """Test extending a registry and its advisory arity check."""
    registry = OperatorRegistry({"hop": 2})
    registry.register("pick", 1)
    assert registry.arity("pick") == 1
    assert len(registry) == 2

    warnings = registry.check_arity(parse_form("hop { pick { all_rows ; x } ; date ; y }"))
    assert len(warnings) == 2, f"Both operators should be flagged: {warnings}"
    assert DEFAULT_REGISTRY.check_arity(parse_form(CASE_STUDY_FORM)) == []


def test_linearize_canonical_round_trip() -> None:
    """Test that canonical text survives parse and linearize unchanged."""
    assert linearize(parse_form(GAMES_FORM)) == GAMES_FORM
    assert linearize(parse_form(EXAMPLE1_FORM)) == EXAMPLE1_FORM


def test_linearize_normalizes_whitespace() -> None:
    """Test that irregular spacing is normalized."""
    tree = parse_form("hop{argmax {all_rows;attendance } ;date}")
    assert linearize(tree) == GAMES_FORM
    assert tokenize(linearize(tree)).texts == tokenize(GAMES_FORM).texts


def test_linearize_leaf() -> None:
    """Test a single-terminal tree."""
    tree = parse_form("all_rows")
    assert linearize(tree) == "all_rows"
    assert tree.root.kind is NodeKind.TERMINAL


@pytest.mark.parametrize("source", FIXTURE_FORMS + random_forms(1000))
def test_linearize_is_fixpoint(source: str) -> None:
    """Test that linearize(parse(.)) is stable and structure-preserving."""
    tree = parse_form(source)
    once = linearize(tree)
    again = parse_form(once)
    assert linearize(again) == once, "Canonical form should be a fixpoint"
    assert _shape(again.root) == _shape(tree.root), "Structure should be preserved"
    assert tokenize(once).texts == tokenize(source).texts


@pytest.mark.parametrize("source", FIXTURE_FORMS + random_forms(100, seed=99))
def test_spans_and_ownership(source: str) -> None:
    """Test span nesting and that every token resolves to a tree node."""
    tree = parse_form(source)
    assert tree.root.span == (0, len(tree.tokens)), "Root should cover every token"

    for node in tree.root.walk():
        if node.is_operator:
            assert node.children, "Operators need at least one child"
        previous_end = node.span[0]
        for child in node.children:
            assert child.span[0] >= previous_end, "Children spans should be ordered and disjoint"
            assert node.span[0] < child.span[0] and child.span[1] < node.span[1]
            previous_end = child.span[1]

    node_ids = {node.node_id for node in tree.nodes()}
    assert all(token.node_id in node_ids for token in tree.tokens)
    assert [n.node_id for n in tree.nodes()] == list(range(len(node_ids))), "Ids follow preorder"


def test_parse_accepts_explicit_registry() -> None:
    """Test that parse runs on a pre-tokenized form with a custom registry."""
    tree = parse(tokenize("pick { all_rows }"), OperatorRegistry({"pick": 1}))
    assert tree.root.name == "pick"


def test_rename_terminal() -> None:
    """Test that renaming rewrites every matching terminal."""
    tree = parse_form("eq { hop { argmax { all_rows ; attendance } ; attendance } ; 5 }")
    renamed = rename_terminal(tree, "attendance", "assist")
    assert linearize(renamed) == "eq { hop { argmax { all_rows ; assist } ; assist } ; 5 }"
    assert terminal_renames(tree, renamed) == {("attendance", "assist")}


def test_terminal_renames_detects_structure_changes() -> None:
    """Test that operator or shape changes are not reported as renames."""
    original = parse_form(SAMPLE1_FORM)
    assert terminal_renames(original, parse_form(SAMPLE1_FORM)) == set()
    assert terminal_renames(original, parse_form(SAMPLE1_FORM.replace("argmax", "argmin"))) is None
    assert terminal_renames(parse_form(GAMES_FORM), parse_form(CASE_STUDY_FORM)) is None
