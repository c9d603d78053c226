"""Compile rule ASTs into quantifier/constraint query pairs over the code
tree, and render queries as XPath 1.0 over the canonical XML export.

A rule compiles to two queries against the same element kind: the
quantifier selects every element the rule applies to, the constraint
re-selects those that also satisfy the must-have clause.  Violations are
the difference.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .grammar import And, ConditionExpr, ElementKind, ElementNode, Leaf, RuleAst
from .javaparse import normalize_expr
from .patterns import Anchor, PatternError, PatternExpr, parse_pattern

K = ElementKind

# Code-tree node kinds selected by each node-like element kind.  A bare
# `declaration statement` covers both fields and local declarations; its
# owner or `of` chain narrows it down.
ELEMENT_NODE_KINDS: dict[ElementKind, tuple[str, ...]] = {
    K.CLASS: ("classDecl",),
    K.FUNCTION: ("methodDecl",),
    K.ABSTRACT_FUNCTION: ("abstractMethodDecl",),
    K.CONSTRUCTOR: ("constructorDecl",),
    K.DECLARATION_STATEMENT: ("fieldDecl", "localDeclStmt"),
    K.PARAMETER: ("parameter",),
    K.ANNOTATION: ("annotation",),
    K.RETURN_VALUE: ("returnStmt",),
    K.EXPRESSION_STATEMENT: ("expressionStmt",),
}

# Element kinds that test an attribute of the owning node instead of
# matching a node of their own.
ATTRIBUTE_KINDS: dict[ElementKind, str] = {
    K.NAME: "name",
    K.VISIBILITY: "visibility",
    K.SPECIFIER: "specifiers",
    K.TYPE: "typeText",
    K.EXTENSION: "superclassText",
    K.IMPLEMENTATION: "interfaceTexts",
    K.INITIAL_VALUE: "initializerText",
}

# Value attribute carried by node-like kinds.
NODE_VALUE_ATTRS: dict[ElementKind, str] = {
    K.ANNOTATION: "annotationText",
    K.RETURN_VALUE: "returnExprText",
    K.EXPRESSION_STATEMENT: "expressionText",
}

LIST_ATTRS = frozenset({"specifiers", "interfaceTexts"})

# Kinds that live directly in a class body (the member axis); statements
# are found at any block depth inside a body instead.
MEMBER_KINDS = frozenset(
    {K.CLASS, K.FUNCTION, K.ABSTRACT_FUNCTION, K.CONSTRUCTOR, K.DECLARATION_STATEMENT}
)
DIRECT_CHILD_KINDS = frozenset({K.PARAMETER, K.ANNOTATION})


@dataclass(frozen=True)
class AttrTest:
    """One attribute predicate: a pattern match, a normalized-expression
    equality, or a non-empty existence test."""

    attr: str
    mode: str  # pattern | expr | exists
    pattern: PatternExpr | None = None
    expr: str | None = None

    @property
    def is_list(self) -> bool:
        return self.attr in LIST_ATTRS


@dataclass
class QLeaf:
    query: "NodeQuery"


@dataclass
class QAnd:
    left: "QueryCond"
    right: "QueryCond"


@dataclass
class QOr:
    left: "QueryCond"
    right: "QueryCond"


QueryCond = QLeaf | QAnd | QOr


@dataclass
class NodeQuery:
    """A selection of code-tree nodes (or, for attribute kinds, a test on
    the owning node).

    axis tells how a condition leaf relates to its owner: "attr" tests the
    owner itself, "direct" scans direct children, "subtree" scans all
    descendants.  The quantifier's own axis is "global".
    """

    target: ElementKind
    node_kinds: tuple[str, ...]
    axis: str
    self_predicates: list[AttrTest] = field(default_factory=list)
    child_conditions: QueryCond | None = None
    ancestor_chain: list["NodeQuery"] = field(default_factory=list)


@dataclass
class QueryPair:
    quantifier: NodeQuery
    constraint: NodeQuery
    eoi_kind: ElementKind


class CompileError(ValueError):
    pass


def _value_test(kind: ElementKind, value: str | None) -> AttrTest | None:
    """The attribute test expressed by an element's quoted value (or bare
    existence for value-less attribute kinds)."""
    if kind in ATTRIBUTE_KINDS:
        attr = ATTRIBUTE_KINDS[kind]
    elif kind in NODE_VALUE_ATTRS:
        attr = NODE_VALUE_ATTRS[kind]
    else:
        return None
    if value is None:
        if kind in (K.ANNOTATION, K.EXPRESSION_STATEMENT):
            return None  # bare node existence; the text is never empty
        return AttrTest(attr, "exists")
    if kind in (K.NAME, K.VISIBILITY, K.SPECIFIER, K.EXTENSION, K.IMPLEMENTATION):
        return AttrTest(attr, "pattern", pattern=parse_pattern(value))
    if kind is K.TYPE:
        try:
            return AttrTest(attr, "pattern", pattern=parse_pattern(value))
        except PatternError:
            return AttrTest(attr, "expr", expr=normalize_expr(value))
    return AttrTest(attr, "expr", expr=normalize_expr(value))


def _resolve_decl_kinds(
    chain: list[NodeQuery], owner: ElementKind | None
) -> tuple[str, ...]:
    """Pick fieldDecl vs localDeclStmt for a declaration statement from its
    nearest explicit parent, else from the owning element."""
    anchor = chain[0].target if chain else owner
    if anchor is K.CLASS:
        return ("fieldDecl",)
    if anchor in (K.FUNCTION, K.CONSTRUCTOR):
        return ("localDeclStmt",)
    return ("fieldDecl", "localDeclStmt")


def _compile_chain(e: ElementNode) -> list[NodeQuery]:
    """Flatten the `of` chain into nearest-first context queries."""
    chain: list[NodeQuery] = []
    p = e.parent
    while p is not None:
        chain.append(_compile_element(p, axis="chain", include_chain=False))
        p = p.parent
    return chain


def _compile_element(
    e: ElementNode,
    axis: str,
    owner: ElementKind | None = None,
    include_chain: bool = True,
) -> NodeQuery:
    chain = _compile_chain(e) if include_chain else []
    tests: list[AttrTest] = []
    vt = _value_test(e.kind, e.value)
    if vt is not None:
        tests.append(vt)
    conds = _compile_expr(e.with_expr, e.kind) if e.with_expr is not None else None
    if e.kind is K.DECLARATION_STATEMENT:
        node_kinds = _resolve_decl_kinds(chain, owner)
    else:
        node_kinds = ELEMENT_NODE_KINDS.get(e.kind, ())
    return NodeQuery(e.kind, node_kinds, axis, tests, conds, chain)


def _leaf_axis(owner: ElementKind, kind: ElementKind, has_chain: bool) -> str:
    if kind in ATTRIBUTE_KINDS and not has_chain:
        return "attr"
    if has_chain:
        return "subtree"
    if kind in DIRECT_CHILD_KINDS:
        return "direct"
    if owner is K.CLASS and kind in MEMBER_KINDS:
        return "direct"
    return "subtree"


def _compile_leaf(e: ElementNode, owner: ElementKind) -> NodeQuery:
    if e.kind in ATTRIBUTE_KINDS and e.parent is not None:
        # An attribute condition anchored to an explicit parent tests that
        # attribute on a contained node of the parent's kind, e.g.
        # `initial value "0" of declaration statement`.
        anchor = _compile_element(e.parent, axis="subtree", owner=owner)
        vt = _value_test(e.kind, e.value)
        if vt is not None:
            anchor.self_predicates = anchor.self_predicates + [vt]
        return anchor
    axis = _leaf_axis(owner, e.kind, e.parent is not None)
    return _compile_element(e, axis=axis, owner=owner)


def _compile_expr(x: ConditionExpr, owner: ElementKind) -> QueryCond:
    if isinstance(x, Leaf):
        return QLeaf(_compile_leaf(x.element, owner))
    if isinstance(x, And):
        return QAnd(_compile_expr(x.left, owner), _compile_expr(x.right, owner))
    return QOr(_compile_expr(x.left, owner), _compile_expr(x.right, owner))


def compile_rule(ast: RuleAst) -> QueryPair:
    head = ast.quantifier
    quantifier = _compile_element(head, axis="global")
    must = _compile_expr(ast.constraint, head.kind)
    constraint = NodeQuery(
        quantifier.target,
        quantifier.node_kinds,
        "global",
        list(quantifier.self_predicates),
        QAnd(quantifier.child_conditions, must)
        if quantifier.child_conditions is not None
        else must,
        list(quantifier.ancestor_chain),
    )
    return QueryPair(quantifier, constraint, head.kind)


# ---------------------------------------------------------------------------
# XPath rendering


def _xq(s: str) -> str:
    # literals never contain a double quote (the rule lexer stops at one)
    return f'"{s}"'


def _attr_ref(attr: str) -> str:
    return f"@{attr}"


def _pattern_part_xpath(attr: str, is_list: bool, part) -> str:
    lit = part.literal
    a = _attr_ref(attr)
    if is_list:
        padded = f"concat(' ',{a},' ')"
        if part.anchor is Anchor.EXACT:
            test = f"contains({padded},{_xq(' ' + lit + ' ')})"
        elif part.anchor is Anchor.PREFIX:
            test = f"contains({padded},{_xq(' ' + lit)})"
        elif part.anchor is Anchor.SUFFIX:
            test = f"contains({padded},{_xq(lit + ' ')})"
        else:
            test = f"contains({a},{_xq(lit)})"
    else:
        if part.anchor is Anchor.EXACT:
            test = f"{a}={_xq(lit)}"
        elif part.anchor is Anchor.PREFIX:
            test = f"starts-with({a},{_xq(lit)})"
        elif part.anchor is Anchor.SUFFIX:
            test = (
                f"substring({a}, string-length({a}) - string-length({_xq(lit)}) + 1)"
                f" = {_xq(lit)}"
            )
        else:
            test = f"contains({a},{_xq(lit)})"
    return f"not({test})" if part.negated else test


def _attr_test_xpath(t: AttrTest) -> str:
    a = _attr_ref(t.attr)
    if t.mode == "exists":
        return f'{a}!=""'
    if t.mode == "expr":
        return f"{a}={_xq(t.expr)}"
    alts = []
    for conj in t.pattern.alternatives:
        parts = [_pattern_part_xpath(t.attr, t.is_list, p) for p in conj]
        alts.append(" and ".join(parts) if len(parts) == 1 else "(" + " and ".join(parts) + ")")
    if len(alts) == 1:
        return alts[0]
    return "(" + " or ".join(alts) + ")"


def _self_predicates_xpath(q: NodeQuery) -> list[str]:
    return [f"[{_attr_test_xpath(t)}]" for t in q.self_predicates]


def _chain_predicate(chain: list[NodeQuery]) -> str:
    """Nearest-enclosing ancestor predicate for a condition-bearing chain,
    nested innermost-out."""
    if not chain:
        return ""
    inner = _chain_predicate(chain[1:])
    q = chain[0]
    preds = "".join(_self_predicates_xpath(q))
    if q.child_conditions is not None:
        preds += f"[{_cond_xpath(q.child_conditions)}]"
    if len(q.node_kinds) == 1:
        axis = f"ancestor::{q.node_kinds[0]}[1]"
    else:
        selves = " or ".join(f"self::{nk}" for nk in q.node_kinds)
        axis = f"ancestor::*[{selves}][1]"
    return f"[{axis}{preds}{inner}]"


def _chain_is_plain(chain: list[NodeQuery]) -> bool:
    return all(
        not q.self_predicates and q.child_conditions is None and len(q.node_kinds) == 1
        for q in chain
    )


def _leaf_xpath(q: NodeQuery) -> str:
    """A condition leaf as a boolean predicate relative to the owner node."""
    if q.axis == "attr":
        tests = [_attr_test_xpath(t) for t in q.self_predicates]
        if q.child_conditions is not None:
            tests.append(_cond_xpath(q.child_conditions))
        return " and ".join(tests) if tests else "true()"
    prefix = "" if q.axis == "direct" else ".//"
    preds = "".join(_self_predicates_xpath(q))
    if q.child_conditions is not None:
        preds += f"[{_cond_xpath(q.child_conditions)}]"
    preds += _chain_predicate(q.ancestor_chain)
    paths = [f"{prefix}{nk}{preds}" for nk in q.node_kinds]
    return " or ".join(paths) if len(paths) == 1 else "(" + " or ".join(paths) + ")"


def _cond_xpath(c: QueryCond) -> str:
    if isinstance(c, QLeaf):
        return _leaf_xpath(c.query)
    left = _cond_xpath(c.left)
    right = _cond_xpath(c.right)
    if isinstance(c, QOr):
        return f"({left} or {right})"
    # `and` binds tighter than `or` in XPath, and or-groups above come
    # parenthesized, so plain joining is unambiguous.
    return f"{left} and {right}"


def render_xpath(q: NodeQuery) -> str:
    """XPath 1.0 selecting the query's nodes from the XML export root."""
    preds = "".join(_self_predicates_xpath(q))
    if q.child_conditions is not None:
        preds += f"[{_cond_xpath(q.child_conditions)}]"
    if _chain_is_plain(q.ancestor_chain):
        prefix = "".join(f"//{c.node_kinds[0]}" for c in reversed(q.ancestor_chain))
    else:
        prefix = ""
        preds += _chain_predicate(q.ancestor_chain)
    paths = [f"{prefix}//{nk}{preds}" for nk in q.node_kinds]
    return " | ".join(paths)
