"""Tokenizer, parser and linearizer for Logic2Text logical forms.

A logical form is a brace-and-semicolon nested expression such as
``hop { argmax { all_rows ; attendance } ; date } = true``. Every
``name { a ; b ; ... }`` clause becomes an operator node whose children are
the listed arguments; every other ``;``-delimited segment becomes one
terminal node holding one token per whitespace-delimited word.

There is no escaping: ``{``, ``}`` and ``;`` are always structural.
"""

import logging
import re
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, replace
from enum import Enum

from logictext.exceptions import (
    EmptyArgument,
    EmptyForm,
    MalformedClause,
    StraySeparator,
    UnbalancedBraces,
)

logger = logging.getLogger(__name__)

OPEN, SEP, CLOSE = "{", ";", "}"
ALL_ROWS = "all_rows"

_STRUCTURAL = re.compile(r"([{};])")
_ASSERTION = re.compile(r"=\s*([^\s{};=]+)\s*$")


class TokenRole(str, Enum):
    """Role of a token in the linearized form."""

    OPERATOR = "operator"
    TERMINAL_WORD = "terminal-word"
    OPEN_BRACE = "open-brace"
    SEPARATOR = "separator"
    CLOSE_BRACE = "close-brace"

    @property
    def is_structural(self) -> bool:
        return self in (TokenRole.OPEN_BRACE, TokenRole.SEPARATOR, TokenRole.CLOSE_BRACE)


_PUNCTUATION_ROLES = {OPEN: TokenRole.OPEN_BRACE, SEP: TokenRole.SEPARATOR, CLOSE: TokenRole.CLOSE_BRACE}


class NodeKind(str, Enum):
    """Kind of a logical-form tree node."""

    OPERATOR = "operator"
    TERMINAL = "terminal"


@dataclass(frozen=True)
class Token:
    """One token of a linearized logical form."""

    text: str
    role: TokenRole
    position: int
    node_id: int | None = None


@dataclass(frozen=True)
class TokenizedForm:
    """Token sequence of a logical form; the coordinate system of masks."""

    tokens: tuple[Token, ...]
    assertion: str | None = None

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[Token]:
        return iter(self.tokens)

    def __getitem__(self, position: int) -> Token:
        return self.tokens[position]

    @property
    def texts(self) -> tuple[str, ...]:
        """Token texts in order."""
        return tuple(token.text for token in self.tokens)


@dataclass(frozen=True)
class LogicNode:
    """Operator or terminal node of a parsed logical form."""

    kind: NodeKind
    name: str
    children: tuple["LogicNode", ...]
    span: tuple[int, int]
    node_id: int

    @property
    def is_operator(self) -> bool:
        return self.kind is NodeKind.OPERATOR

    @property
    def head_positions(self) -> tuple[int, ...]:
        """Positions of the tokens that name this node."""
        if self.is_operator:
            return (self.span[0],)
        return tuple(range(*self.span))

    def walk(self) -> Iterator["LogicNode"]:
        """Yield this node and its descendants in preorder."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))


@dataclass(frozen=True)
class LogicTree:
    """Parsed logical form."""

    root: LogicNode
    tokens: TokenizedForm
    asserts_true: bool = False

    def nodes(self) -> tuple[LogicNode, ...]:
        """All nodes in preorder; index equals node_id."""
        return tuple(self.root.walk())

    def node(self, node_id: int) -> LogicNode:
        return self.nodes()[node_id]

    def operators(self) -> tuple[LogicNode, ...]:
        return tuple(node for node in self.root.walk() if node.is_operator)

    def terminals(self) -> tuple[LogicNode, ...]:
        return tuple(node for node in self.root.walk() if not node.is_operator)

    def parents(self) -> dict[int, LogicNode]:
        """Map node_id to the parent node (the root has no entry)."""
        result: dict[int, LogicNode] = {}
        for node in self.root.walk():
            for child in node.children:
                result[child.node_id] = node
        return result

    def owned_positions(self, node_id: int) -> tuple[int, ...]:
        """Positions of every token owned by a node (head and punctuation)."""
        return tuple(token.position for token in self.tokens if token.node_id == node_id)

    def punctuation_positions(self, node_id: int) -> tuple[int, ...]:
        """Positions of the braces and separators of an operator's clause."""
        return tuple(
            token.position
            for token in self.tokens
            if token.node_id == node_id and token.role.is_structural
        )


class OperatorRegistry:
    """Known operator symbols with optional arity hints.

    The registry is advisory: unknown symbols followed by ``{`` still parse.
    """

    def __init__(self, arities: Mapping[str, int | None] | None = None):
        self._arities: dict[str, int | None] = dict(arities or {})

    def __contains__(self, symbol: object) -> bool:
        return symbol in self._arities

    def __len__(self) -> int:
        return len(self._arities)

    @property
    def symbols(self) -> tuple[str, ...]:
        return tuple(self._arities)

    def register(self, symbol: str, arity: int | None = None) -> None:
        """Add or update an operator symbol."""
        self._arities[symbol] = arity

    def arity(self, symbol: str) -> int | None:
        """Hinted argument count, or None when the symbol has no hint."""
        return self._arities.get(symbol)

    def check_arity(self, tree: LogicTree) -> list[str]:
        """Describe operator nodes whose child count differs from the hint."""
        warnings = []
        for node in tree.operators():
            expected = self._arities.get(node.name)
            if expected is not None and expected != len(node.children):
                warnings.append(
                    f"{node.name} at token {node.span[0]} has {len(node.children)} "
                    f"argument(s), expected {expected}"
                )
        return warnings


DEFAULT_ARITIES: dict[str, int | None] = {
    "eq": 2,
    "not_eq": 2,
    "round_eq": 2,
    "str_eq": 2,
    "not_str_eq": 2,
    "and": 2,
    "only": 1,
    "hop": 2,
    "num_hop": 2,
    "str_hop": 2,
    "diff": 2,
    "greater": 2,
    "less": 2,
    "count": 1,
    "avg": 2,
    "sum": 2,
    "max": 2,
    "min": 2,
    "argmax": 2,
    "argmin": 2,
    "nth_max": 3,
    "nth_min": 3,
    "nth_argmax": 3,
    "nth_argmin": 3,
    "filter_eq": 3,
    "filter_not_eq": 3,
    "filter_str_eq": 3,
    "filter_str_not_eq": 3,
    "filter_less": 3,
    "filter_greater": 3,
    "filter_less_eq": 3,
    "filter_greater_eq": 3,
    "filter_all": 2,
    "all_eq": 3,
    "all_not_eq": 3,
    "all_str_eq": 3,
    "all_less": 3,
    "all_greater": 3,
    "all_less_eq": 3,
    "all_greater_eq": 3,
    "most_eq": 3,
    "most_not_eq": 3,
    "most_str_eq": 3,
    "most_less": 3,
    "most_greater": 3,
    "most_less_eq": 3,
    "most_greater_eq": 3,
}


def default_registry() -> OperatorRegistry:
    """Registry with the public Logic2Text operator set."""
    return OperatorRegistry(DEFAULT_ARITIES)


DEFAULT_REGISTRY = default_registry()


def normalize_text(text: str) -> str:
    """Lowercase and collapse whitespace."""
    return " ".join(text.lower().split())


def tokenize(source: str) -> TokenizedForm:
    """
    Split a linearized logical form into tokens.

    A trailing assertion such as ``= true`` is stripped and recorded on the
    result. Node ownership is filled in by :func:`parse`.

    Args:
        source: Linearized logical form

    Returns:
        Token sequence with roles assigned

    Raises:
        EmptyForm: If the source is empty after trimming
    """
    text = source.strip()
    if not text:
        raise EmptyForm("logical form is empty")

    assertion = None
    match = _ASSERTION.search(text)
    if match and match.start() > max(text.rfind(c) for c in (OPEN, SEP, CLOSE)):
        assertion = match.group(1)
        text = text[: match.start()].strip()
        if not text:
            raise EmptyForm("logical form has an assertion but no body")

    words: list[str] = []
    for segment in _STRUCTURAL.split(text):
        if segment in _PUNCTUATION_ROLES:
            words.append(segment)
        else:
            words.extend(segment.split())

    tokens = []
    for position, word in enumerate(words):
        if word in _PUNCTUATION_ROLES:
            role = _PUNCTUATION_ROLES[word]
        elif position + 1 < len(words) and words[position + 1] == OPEN:
            role = TokenRole.OPERATOR
        else:
            role = TokenRole.TERMINAL_WORD
        tokens.append(Token(text=word, role=role, position=position))

    return TokenizedForm(tokens=tuple(tokens), assertion=assertion)


class _Parser:
    """Recursive-descent parser over a token sequence."""

    def __init__(self, form: TokenizedForm, registry: OperatorRegistry):
        self.tokens = form.tokens
        self.registry = registry
        self.pos = 0
        self.owners: list[int | None] = [None] * len(form.tokens)
        self._next_id = 0

    def _peek(self) -> Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _allocate(self) -> int:
        node_id = self._next_id
        self._next_id += 1
        return node_id

    def parse_root(self) -> LogicNode:
        first = self._peek()
        if first is not None and first.role is TokenRole.SEPARATOR:
            raise StraySeparator("separator outside any clause", first.position)
        if first is not None and first.role is TokenRole.CLOSE_BRACE:
            raise UnbalancedBraces("closing brace without an open clause", first.position)

        root = self.parse_argument()

        trailing = self._peek()
        if trailing is not None:
            if trailing.role is TokenRole.SEPARATOR:
                raise StraySeparator("separator outside any clause", trailing.position)
            if trailing.role is TokenRole.CLOSE_BRACE:
                raise UnbalancedBraces("closing brace without an open clause", trailing.position)
            raise MalformedClause("unexpected tokens after the top-level clause", trailing.position)

        if not root.is_operator and root.span[1] - root.span[0] > 1:
            head = self.tokens[root.span[0]]
            if head.text in self.registry:
                raise MalformedClause(f"operator {head.text!r} is not followed by '{{'", head.position)

        return root

    def parse_argument(self) -> LogicNode:
        token = self._peek()
        if token is None:
            raise EmptyArgument("missing argument at end of form", len(self.tokens))
        if token.role is TokenRole.OPERATOR:
            return self.parse_clause()
        if token.role is TokenRole.TERMINAL_WORD:
            return self.parse_terminal()
        if token.role is TokenRole.OPEN_BRACE:
            raise MalformedClause("clause has no operator", token.position)
        raise EmptyArgument("empty argument", token.position)

    def parse_clause(self) -> LogicNode:
        head = self.tokens[self.pos]
        node_id = self._allocate()
        self.owners[self.pos] = node_id
        open_brace = self.tokens[self.pos + 1]
        self.owners[self.pos + 1] = node_id
        self.pos += 2

        children = []
        while True:
            if self._peek() is None:
                raise UnbalancedBraces("clause is never closed", open_brace.position)
            children.append(self.parse_argument())

            token = self._peek()
            if token is None:
                raise UnbalancedBraces("clause is never closed", open_brace.position)
            if token.role is TokenRole.SEPARATOR:
                self.owners[self.pos] = node_id
                self.pos += 1
                continue
            if token.role is TokenRole.CLOSE_BRACE:
                self.owners[self.pos] = node_id
                self.pos += 1
                break
            raise MalformedClause("expected ';' or '}'", token.position)

        return LogicNode(
            kind=NodeKind.OPERATOR,
            name=head.text,
            children=tuple(children),
            span=(head.position, self.pos),
            node_id=node_id,
        )

    def parse_terminal(self) -> LogicNode:
        start = self.pos
        node_id = self._allocate()
        words = []
        while True:
            token = self._peek()
            if token is None or token.role is not TokenRole.TERMINAL_WORD:
                break
            words.append(token.text)
            self.owners[self.pos] = node_id
            self.pos += 1

        token = self._peek()
        if token is not None and token.role is TokenRole.OPERATOR:
            raise MalformedClause("terminal words run into an operator clause", token.position)

        return LogicNode(
            kind=NodeKind.TERMINAL,
            name=" ".join(words),
            children=(),
            span=(start, self.pos),
            node_id=node_id,
        )


def parse(form: TokenizedForm, registry: OperatorRegistry | None = None) -> LogicTree:
    """
    Parse a token sequence into a logical-form tree.

    Args:
        form: Output of :func:`tokenize`
        registry: Operator registry used for top-level sanity checks

    Returns:
        Tree whose tokens carry node ownership

    Raises:
        UnbalancedBraces: If a clause is never closed or a brace is stray
        StraySeparator: If a ';' appears outside any clause
        MalformedClause: If a clause lacks an operator, an operator lacks '{',
            the assertion suffix is not "= true", or clauses nest past the recursion limit
        EmptyArgument: If a clause argument is empty
    """
    if len(form) == 0:
        raise EmptyForm("logical form has no tokens")

    parser = _Parser(form, registry or DEFAULT_REGISTRY)
    try:
        root = parser.parse_root()
    except RecursionError:
        raise MalformedClause("clauses nest too deeply to parse", parser.pos) from None

    if form.assertion is not None and form.assertion != "true":
        raise MalformedClause(f"unsupported assertion suffix '= {form.assertion}'", len(form))

    owned = tuple(
        replace(token, node_id=owner) for token, owner in zip(form.tokens, parser.owners)
    )
    tree = LogicTree(
        root=root,
        tokens=TokenizedForm(tokens=owned, assertion=form.assertion),
        asserts_true=form.assertion == "true",
    )
    logger.debug("Parsed form with %d tokens into %d nodes", len(form), parser._next_id)
    return tree


def parse_form(source: str, registry: OperatorRegistry | None = None) -> LogicTree:
    """Tokenize and parse a linearized logical form."""
    return parse(tokenize(source), registry)


def _linearize_node(node: LogicNode, renames: Mapping[str, str]) -> str:
    if not node.is_operator:
        return renames.get(normalize_text(node.name), node.name)
    arguments = " ; ".join(_linearize_node(child, renames) for child in node.children)
    return f"{node.name} {{ {arguments} }}"


def linearize(tree: LogicTree, renames: Mapping[str, str] | None = None) -> str:
    """
    Render a tree in canonical text form.

    Args:
        tree: Parsed logical form
        renames: Optional map from normalized terminal name to replacement

    Returns:
        ``op { a ; b }`` text with single spaces, plus `` = true`` when asserted
    """
    text = _linearize_node(tree.root, renames or {})
    if tree.asserts_true:
        text += " = true"
    return text


def rename_terminal(tree: LogicTree, old: str, new: str) -> LogicTree:
    """Rename every terminal whose normalized name equals ``old``."""
    return parse_form(linearize(tree, {normalize_text(old): new}))


def terminal_renames(a: LogicTree, b: LogicTree) -> set[tuple[str, str]] | None:
    """
    Compare two trees node by node.

    Returns:
        None if the trees differ in shape or operators, otherwise the set of
        distinct (old, new) terminal name pairs that differ
    """
    if a.asserts_true != b.asserts_true:
        return None

    renames: set[tuple[str, str]] = set()
    pairs = [(a.root, b.root)]
    while pairs:
        left, right = pairs.pop()
        if left.kind is not right.kind or len(left.children) != len(right.children):
            return None
        if left.is_operator:
            if left.name != right.name:
                return None
            pairs.extend(zip(left.children, right.children))
        elif left.name != right.name:
            renames.add((left.name, right.name))
    return renames
