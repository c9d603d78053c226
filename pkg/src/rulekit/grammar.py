"""Lexer, parser, and canonical renderer for the design-rule language.

A rule names the code element it quantifies over, optionally narrows it
with ``with`` conditions and an ``of`` parent chain, and states what every
matched element ``must have``::

    function with type "void" of class must have name "update||destroy"

Conditions combine with ``and`` / ``or`` (``and`` binds tighter, both
left-associative) and may be parenthesized.  Quoted values are either
identifier patterns (see patterns.py) or verbatim expression text,
depending on the element they qualify.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .diagnostics import Diagnostic, Span, error, warning
from .patterns import PatternError, parse_pattern as _parse_pattern_literal


class ElementKind(Enum):
    CLASS = "class"
    FUNCTION = "function"
    ABSTRACT_FUNCTION = "abstract function"
    CONSTRUCTOR = "constructor"
    DECLARATION_STATEMENT = "declaration statement"
    PARAMETER = "parameter"
    TYPE = "type"
    EXTENSION = "extension"
    IMPLEMENTATION = "implementation"
    EXPRESSION_STATEMENT = "expression statement"
    INITIAL_VALUE = "initial value"
    RETURN_VALUE = "return value"
    ANNOTATION = "annotation"
    NAME = "name"
    SPECIFIER = "specifier"
    VISIBILITY = "visibility"

    @property
    def surface(self) -> str:
        return self.value


K = ElementKind

# Kinds that may open a rule (quantifier heads).
HEAD_KINDS = (
    K.CLASS,
    K.FUNCTION,
    K.ABSTRACT_FUNCTION,
    K.CONSTRUCTOR,
    K.DECLARATION_STATEMENT,
    K.PARAMETER,
)

# Legal condition kinds per owning element.  `return value` is not accepted
# under `class`: classes have no return value to constrain.
CHILD_KINDS: dict[ElementKind, frozenset[ElementKind]] = {
    K.CLASS: frozenset(
        {
            K.ANNOTATION,
            K.SPECIFIER,
            K.VISIBILITY,
            K.NAME,
            K.EXTENSION,
            K.IMPLEMENTATION,
            K.FUNCTION,
            K.ABSTRACT_FUNCTION,
            K.CONSTRUCTOR,
            K.DECLARATION_STATEMENT,
            K.CLASS,
        }
    ),
    K.FUNCTION: frozenset(
        {
            K.ANNOTATION,
            K.SPECIFIER,
            K.VISIBILITY,
            K.TYPE,
            K.NAME,
            K.PARAMETER,
            K.RETURN_VALUE,
            K.DECLARATION_STATEMENT,
            K.EXPRESSION_STATEMENT,
        }
    ),
    K.ABSTRACT_FUNCTION: frozenset(
        {K.ANNOTATION, K.SPECIFIER, K.VISIBILITY, K.TYPE, K.NAME, K.PARAMETER}
    ),
    K.CONSTRUCTOR: frozenset(
        {
            K.ANNOTATION,
            K.SPECIFIER,
            K.VISIBILITY,
            K.PARAMETER,
            K.RETURN_VALUE,
            K.DECLARATION_STATEMENT,
            K.EXPRESSION_STATEMENT,
        }
    ),
    K.DECLARATION_STATEMENT: frozenset(
        {K.ANNOTATION, K.SPECIFIER, K.VISIBILITY, K.TYPE, K.NAME, K.INITIAL_VALUE}
    ),
    K.PARAMETER: frozenset({K.TYPE, K.NAME}),
    K.TYPE: frozenset(),
    K.EXTENSION: frozenset(),
    K.IMPLEMENTATION: frozenset(),
    K.EXPRESSION_STATEMENT: frozenset(),
    K.INITIAL_VALUE: frozenset(),
    K.RETURN_VALUE: frozenset(),
    K.ANNOTATION: frozenset(),
    K.NAME: frozenset(),
    K.SPECIFIER: frozenset(),
    K.VISIBILITY: frozenset(),
}

# Legal `of` parents per element kind (empty = the element takes no parent).
PARENT_KINDS: dict[ElementKind, tuple[ElementKind, ...]] = {
    K.CLASS: (K.CLASS,),
    K.FUNCTION: (K.CLASS,),
    K.ABSTRACT_FUNCTION: (K.CLASS,),
    K.CONSTRUCTOR: (K.CLASS,),
    K.DECLARATION_STATEMENT: (K.CLASS, K.FUNCTION, K.CONSTRUCTOR),
    K.PARAMETER: (),
    K.TYPE: (),
    K.EXTENSION: (),
    K.IMPLEMENTATION: (),
    K.EXPRESSION_STATEMENT: (K.FUNCTION, K.CONSTRUCTOR),
    K.INITIAL_VALUE: (K.DECLARATION_STATEMENT,),
    K.RETURN_VALUE: (),
    K.ANNOTATION: (),
    K.NAME: (),
    K.SPECIFIER: (),
    K.VISIBILITY: (),
}

# How each kind's quoted value is interpreted.
VALUE_NONE = frozenset(HEAD_KINDS)
VALUE_PATTERN = frozenset({K.NAME, K.SPECIFIER, K.VISIBILITY})
VALUE_EXPR = frozenset(
    {K.EXPRESSION_STATEMENT, K.INITIAL_VALUE, K.RETURN_VALUE, K.ANNOTATION}
)
VALUE_PATTERN_OR_EXPR = frozenset({K.TYPE})
# extension / implementation take `of` + (pattern | superclass/interface keyword)
VALUE_AFTER_OF = frozenset({K.EXTENSION, K.IMPLEMENTATION})

KIND_BY_KEYWORD = {k.surface: k for k in ElementKind}

TWO_WORD_FIRST = {
    "abstract": "function",
    "declaration": "statement",
    "expression": "statement",
    "initial": "value",
    "return": "value",
}

STRUCTURAL_KEYWORDS = ("with", "of", "must", "have", "and", "or", "superclass", "interface")

_SINGLE_WORD_KEYWORDS = frozenset(
    [k.surface for k in ElementKind if " " not in k.surface] + list(STRUCTURAL_KEYWORDS)
)


# ---------------------------------------------------------------------------
# Tokens


@dataclass(frozen=True)
class Token:
    kind: str  # kw | lit | lparen | rparen | partial | word
    value: str
    start: int
    end: int

    @property
    def span(self) -> Span:
        return Span(self.start, self.end)


def tokenize(text: str, prefix: bool = False) -> tuple[list[Token], list[Diagnostic]]:
    """Lex rule text.  In prefix mode a trailing lone first word of a
    two-word keyword lexes as a `partial` token instead of an error."""
    tokens: list[Token] = []
    diags: list[Diagnostic] = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c == "(":
            tokens.append(Token("lparen", "(", i, i + 1))
            i += 1
            continue
        if c == ")":
            tokens.append(Token("rparen", ")", i, i + 1))
            i += 1
            continue
        if c == '"':
            j = text.find('"', i + 1)
            if j < 0:
                diags.append(error("unterminated quote", i, n))
                tokens.append(Token("lit", text[i + 1 :], i, n))
                break
            tokens.append(Token("lit", text[i + 1 : j], i, j + 1))
            i = j + 1
            continue
        if c.isalpha():
            j = i
            while j < n and text[j].isalpha():
                j += 1
            word = text[i:j]
            second = TWO_WORD_FIRST.get(word)
            if second is not None:
                m = j
                while m < n and text[m].isspace():
                    m += 1
                e = m + len(second)
                if text[m:e] == second and (e >= n or not text[e].isalpha()):
                    kw = f"{word} {second}"
                    tokens.append(Token("kw", kw, i, e))
                    i = e
                    continue
                if prefix and m >= n:
                    tokens.append(Token("partial", word, i, j))
                    i = j
                    continue
                diags.append(
                    error(
                        f"expected '{second}' after '{word}'",
                        i,
                        j,
                        hint=f"write '{word} {second}'",
                    )
                )
                tokens.append(Token("word", word, i, j))
                i = j
                continue
            if word in _SINGLE_WORD_KEYWORDS:
                tokens.append(Token("kw", word, i, j))
            else:
                diags.append(error(f"unknown keyword '{word}'", i, j))
                tokens.append(Token("word", word, i, j))
            i = j
            continue
        diags.append(error(f"unexpected character {c!r}", i, i + 1))
        i += 1
    return tokens, diags


# ---------------------------------------------------------------------------
# AST


@dataclass
class ElementNode:
    """One element clause: kind, optional quoted value, optional `with`
    condition expression, optional `of` parent chain.

    For extension/implementation a missing value means the bare
    `of superclass` / `of interface` form (existence only).
    """

    kind: ElementKind
    value: str | None = None
    with_expr: "ConditionExpr | None" = None
    parent: "ElementNode | None" = None
    span: Span | None = field(default=None, compare=False)
    value_span: Span | None = field(default=None, compare=False)


@dataclass
class Leaf:
    element: ElementNode


@dataclass
class And:
    left: "ConditionExpr"
    right: "ConditionExpr"


@dataclass
class Or:
    left: "ConditionExpr"
    right: "ConditionExpr"


ConditionExpr = Leaf | And | Or


@dataclass
class RuleAst:
    quantifier: ElementNode
    constraint: ConditionExpr


@dataclass
class ParseResult:
    ast: RuleAst | None
    diagnostics: list[Diagnostic]
    incomplete: bool = False

    @property
    def ok(self) -> bool:
        return self.ast is not None


def iter_leaves(expr: ConditionExpr):
    if isinstance(expr, Leaf):
        yield expr.element
    else:
        yield from iter_leaves(expr.left)
        yield from iter_leaves(expr.right)


def iter_elements(ast: RuleAst):
    """All element nodes of a rule: head chain plus every condition leaf,
    recursively."""

    def walk_element(e: ElementNode):
        yield e
        if e.with_expr is not None:
            for leaf in iter_leaves(e.with_expr):
                yield from walk_element(leaf)
        if e.parent is not None:
            yield from walk_element(e.parent)

    yield from walk_element(ast.quantifier)
    for leaf in iter_leaves(ast.constraint):
        yield from walk_element(leaf)


# ---------------------------------------------------------------------------
# Parser


class _SoftFail(Exception):
    pass


class _Parser:
    def __init__(self, tokens: list[Token], text: str, prefix: bool = False):
        self.toks = tokens
        self.text = text
        self.n = len(tokens)
        self.pos = 0
        self.prefix = prefix
        self.far_pos = -1
        self.far_msg: tuple[str, str | None] = ("invalid rule", None)

    # -- token primitives

    def peek(self) -> Token | None:
        return self.toks[self.pos] if self.pos < self.n else None

    def at_kw(self, *names: str) -> bool:
        t = self.peek()
        return t is not None and t.kind == "kw" and t.value in names

    def advance(self) -> Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def fail(self, msg: str, hint: str | None = None):
        if self.pos > self.far_pos:
            self.far_pos = self.pos
            self.far_msg = (msg, hint)
        raise _SoftFail()

    def expect_kw(self, name: str, msg: str, hint: str | None = None) -> Token:
        if not self.at_kw(name):
            self.fail(msg, hint)
        return self.advance()

    # -- grammar

    def parse_rule(self) -> RuleAst:
        head = self.parse_element(set(HEAD_KINDS), "a rule must start with")
        self.expect_kw("must", "expected 'must have' after the rule's element")
        self.expect_kw("have", "missing 'have' after 'must'")
        constraint = self.parse_or(head.kind)
        if self.pos < self.n:
            self.fail("expected end of rule")
        return RuleAst(head, constraint)

    def parse_element(self, allowed: set[ElementKind], role: str) -> ElementNode:
        t = self.peek()
        if t is None or t.kind != "kw" or t.value not in KIND_BY_KEYWORD:
            names = ", ".join(sorted(k.surface for k in allowed))
            self.fail(f"{role} one of: {names}")
        kind = KIND_BY_KEYWORD[t.value]
        if kind not in allowed:
            names = ", ".join(sorted(k.surface for k in allowed))
            self.fail(f"'{t.value}' is not valid here; {role} one of: {names}")
        kw_tok = self.advance()
        value: str | None = None
        value_span: Span | None = None
        if kind in VALUE_AFTER_OF:
            self.expect_kw(
                "of",
                f"expected 'of' after '{kind.surface}'",
                hint=f'{kind.surface} of "..."',
            )
            marker = "superclass" if kind is K.EXTENSION else "interface"
            nxt = self.peek()
            if nxt is not None and nxt.kind == "lit":
                tok = self.advance()
                value, value_span = tok.value, tok.span
            elif self.at_kw(marker):
                self.advance()
            else:
                self.fail(
                    f"expected a quoted pattern or '{marker}' after "
                    f"'{kind.surface} of'"
                )
        elif kind not in VALUE_NONE:
            nxt = self.peek()
            if nxt is not None and nxt.kind == "lit":
                tok = self.advance()
                value, value_span = tok.value, tok.span
        with_expr = None
        if self.at_kw("with"):
            if not CHILD_KINDS[kind]:
                self.fail(f"'{kind.surface}' cannot take 'with' conditions")
            self.advance()
            with_expr = self.parse_or(kind)
        parent = None
        if self.at_kw("of") and PARENT_KINDS[kind]:
            # The `of` may belong to an enclosing element instead (e.g. the
            # function in `function with parameter of class`), so back off
            # when the parent clause does not parse here.
            save = self.pos
            self.advance()
            try:
                parent = self.parse_element(
                    set(PARENT_KINDS[kind]),
                    f"the parent of '{kind.surface}' must be",
                )
            except _SoftFail:
                self.pos = save
                parent = None
        return ElementNode(kind, value, with_expr, parent, kw_tok.span, value_span)

    def parse_or(self, ctx: ElementKind) -> ConditionExpr:
        left = self.parse_and(ctx)
        while self.at_kw("or"):
            save = self.pos
            self.advance()
            try:
                right = self.parse_and(ctx)
            except _SoftFail:
                self.pos = save
                break
            left = Or(left, right)
        return left

    def parse_and(self, ctx: ElementKind) -> ConditionExpr:
        left = self.parse_operand(ctx)
        while self.at_kw("and"):
            save = self.pos
            self.advance()
            try:
                right = self.parse_operand(ctx)
            except _SoftFail:
                self.pos = save
                break
            left = And(left, right)
        return left

    def parse_operand(self, ctx: ElementKind) -> ConditionExpr:
        t = self.peek()
        if t is not None and t.kind == "lparen":
            self.advance()
            inner = self.parse_or(ctx)
            if self.peek() is None or self.peek().kind != "rparen":
                self.fail("expected ')'")
            self.advance()
            return inner
        el = self.parse_element(
            set(CHILD_KINDS[ctx]),
            f"a condition of '{ctx.surface}' must be",
        )
        return Leaf(el)


_DUP_MUST_MESSAGE = "only one 'must' is allowed"


def _validate_element_values(elements) -> list[Diagnostic]:
    """Check quoted values: pattern-valued elements need a well-formed
    pattern, expression-valued ones non-empty text.  Spans point inside
    the literal."""
    diags: list[Diagnostic] = []
    for el in elements:
        if el.value is None:
            continue
        span = el.value_span or Span(0, 0)
        base = span.start + 1  # step over the opening quote
        if el.kind in VALUE_PATTERN or el.kind in VALUE_AFTER_OF:
            try:
                _parse_pattern_literal(el.value)
            except PatternError as e:
                d = e.diagnostic
                diags.append(
                    error(
                        f"invalid pattern: {d.message}",
                        base + d.span.start,
                        base + d.span.end,
                        d.hint,
                    )
                )
        elif not el.value.strip():
            # type/expr values fall back to verbatim comparison but may
            # not be blank
            diags.append(error("empty value", span.start, span.end))
    return diags


def _find_duplicate_must(tokens: list[Token]) -> Token | None:
    musts = [t for t in tokens if t.kind == "kw" and t.value == "must"]
    return musts[1] if len(musts) > 1 else None


def _run_parser(
    text: str, prefix: bool = False
) -> tuple[RuleAst | None, list[Diagnostic], bool]:
    tokens, lex_diags = tokenize(text, prefix=prefix)
    if any(d.is_error for d in lex_diags):
        return None, lex_diags, False
    if not tokens:
        return None, [error("empty rule", 0, max(len(text), 0))], False
    dup = _find_duplicate_must(tokens)
    if dup is not None:
        return None, [error(_DUP_MUST_MESSAGE, dup.start, dup.end)], False
    p = _Parser(tokens, text, prefix=prefix)
    try:
        ast = p.parse_rule()
        value_diags = _validate_element_values(iter_elements(ast))
        if any(d.is_error for d in value_diags):
            return None, lex_diags + value_diags, False
        return ast, list(lex_diags), False
    except _SoftFail:
        pass
    at_eof = p.far_pos >= p.n
    if at_eof:
        end = len(text)
        diag = warning(
            "incomplete rule",
            tokens[-1].start if tokens else 0,
            end,
            hint=p.far_msg[0],
        )
        return None, lex_diags + [diag], True
    bad = tokens[p.far_pos]
    msg, hint = p.far_msg
    return None, lex_diags + [error(msg, bad.start, bad.end, hint)], False


def parse_rule(text: str) -> ParseResult:
    """Parse rule text into a RuleAst, or diagnostics with spans."""
    ast, diags, incomplete = _run_parser(text)
    return ParseResult(ast, diags, incomplete)


def parse_element(text: str) -> ElementNode:
    """Parse a standalone element clause (no `must have`), e.g.
    `function with parameter of class`.  Raises ValueError with the
    diagnostic message on failure."""
    tokens, lex_diags = tokenize(text)
    bad = [d for d in lex_diags if d.is_error]
    if bad:
        raise ValueError(bad[0].message)
    p = _Parser(tokens, text)
    try:
        el = p.parse_element(set(ElementKind), "an element clause must start with")
        if p.pos < p.n:
            p.fail("unexpected trailing input")
    except _SoftFail:
        raise ValueError(p.far_msg[0]) from None
    def walk(e):
        yield e
        if e.with_expr is not None:
            for leaf in iter_leaves(e.with_expr):
                yield from walk(leaf)
        if e.parent is not None:
            yield from walk(e.parent)
    value_diags = _validate_element_values(walk(el))
    if any(d.is_error for d in value_diags):
        raise ValueError(value_diags[0].message)
    return el


def viable_prefix(text: str) -> bool:
    """True when `text` is a prefix of at least one well-formed rule
    (including a complete rule)."""
    tokens, lex_diags = tokenize(text, prefix=True)
    if any(d.is_error for d in lex_diags):
        return False
    if not tokens:
        return True
    if _find_duplicate_must(tokens) is not None:
        return False
    if tokens[-1].kind == "partial":
        return False
    p = _Parser(tokens, text, prefix=True)
    try:
        p.parse_rule()
        return True
    except _SoftFail:
        return p.far_pos >= p.n


# ---------------------------------------------------------------------------
# Rendering
#
# The language lets a connective or an `of` clause attach to the innermost
# still-open clause at its left (the parser is greedy there), so the
# renderer parenthesizes exactly the operands whose right edge would
# otherwise swallow what follows.

_PREC_OR = 1
_PREC_AND = 2
_PREC_LEAF = 3


def _prec(x: ConditionExpr) -> int:
    if isinstance(x, Leaf):
        return _PREC_LEAF
    return _PREC_AND if isinstance(x, And) else _PREC_OR


def render_rule(ast: RuleAst) -> str:
    """Canonical text: lowercase keywords, single spaces, double quotes,
    parentheses only where re-parsing would otherwise change structure."""
    head = _render_element(ast.quantifier)
    constraint, _ = _render_exp(ast.constraint, 0, False)
    return f"{head} must have {constraint}"


def _render_element(e: ElementNode) -> str:
    parts = [e.kind.surface]
    if e.kind in VALUE_AFTER_OF:
        marker = "superclass" if e.kind is K.EXTENSION else "interface"
        parts.append("of")
        parts.append(f'"{e.value}"' if e.value is not None else marker)
    elif e.value is not None:
        parts.append(f'"{e.value}"')
    if e.with_expr is not None:
        rendered, _ = _render_exp(e.with_expr, 0, False)
        if e.parent is not None and _absorbs_of(e.with_expr, e.parent.kind):
            rendered = f"({rendered})"
        parts.append("with")
        parts.append(rendered)
    if e.parent is not None:
        parts.append("of")
        parts.append(_render_element(e.parent))
    return " ".join(parts)


# The "leading" of a rendered expression: the element kind of its first
# token when it starts with an element clause, or the set of all top-level
# leaf kinds when it starts with a parenthesized group.
_Leading = tuple[bool, frozenset[ElementKind]]


def _render_exp(
    x: ConditionExpr, parent_prec: int, is_right: bool
) -> tuple[str, _Leading]:
    if isinstance(x, Leaf):
        return _render_element(x.element), (False, frozenset({x.element.kind}))
    prec = _PREC_AND if isinstance(x, And) else _PREC_OR
    op = "and" if isinstance(x, And) else "or"
    left_s, left_lead = _render_exp(x.left, prec, False)
    right_s, right_lead = _render_exp(x.right, prec, True)
    left_wrapped = _prec(x.left) < prec
    if not left_wrapped and _absorbs_connective(x.left, right_lead):
        left_s = f"({left_s})"
        left_wrapped = True
    if left_wrapped:
        left_lead = (True, frozenset(el.kind for el in iter_leaves(x.left)))
    s = f"{left_s} {op} {right_s}"
    if prec < parent_prec or (prec == parent_prec and is_right):
        return f"({s})", (True, frozenset(el.kind for el in iter_leaves(x)))
    return s, left_lead


def _right_edge(x: ConditionExpr) -> list[tuple[ElementNode, bool]]:
    """Elements still syntactically open at the right edge of a rendered
    expression, innermost first, flagged with whether the element's own
    condition expression is open (vs. only its `of` slot)."""
    if isinstance(x, (And, Or)):
        if _prec(x.right) <= _prec(x):
            return []  # right operand renders parenthesized, closing the edge
        return _right_edge(x.right)
    return _element_right_edge(x.element)


def _element_right_edge(e: ElementNode) -> list[tuple[ElementNode, bool]]:
    if e.parent is not None:
        return _element_right_edge(e.parent)
    out: list[tuple[ElementNode, bool]] = []
    if e.with_expr is not None:
        out.extend(_right_edge(e.with_expr))
        out.append((e, True))
    else:
        out.append((e, False))
    return out


def _absorbs_of(with_expr: ConditionExpr, parent_kind: ElementKind) -> bool:
    """Would `of <parent_kind> ...` be grabbed by something inside this
    with-expression instead of its owner?"""
    return any(
        parent_kind in PARENT_KINDS[el.kind] for el, _ in _right_edge(with_expr)
    )


def _absorbs_connective(left: ConditionExpr, right_lead: _Leading) -> bool:
    """Would `op <right>` be grabbed by an open inner clause at the right
    edge of `left` instead of continuing at the enclosing level?"""
    _, kinds = right_lead
    for el, exp_open in _right_edge(left):
        if exp_open and kinds <= CHILD_KINDS[el.kind]:
            return True
    return False
