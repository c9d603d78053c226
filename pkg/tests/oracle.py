"""Brute-force rule interpreter used as the independent oracle.

Walks the code tree and the rule AST directly with naive recursion and
re-declared semantic tables; deliberately shares nothing with the
query-compiler/evaluator path it checks.
"""

from __future__ import annotations

from rulekit.grammar import And, ConditionExpr, ElementKind, ElementNode, Or, RuleAst
from rulekit.javaparse import CodeNode, CodeTree
from rulekit.patterns import PatternError, match_pattern, match_pattern_any, parse_pattern

K = ElementKind

NODE_KINDS = {
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

ATTR_OF = {
    K.NAME: "name",
    K.VISIBILITY: "visibility",
    K.SPECIFIER: "specifiers",
    K.TYPE: "typeText",
    K.EXTENSION: "superclassText",
    K.IMPLEMENTATION: "interfaceTexts",
    K.INITIAL_VALUE: "initializerText",
    K.ANNOTATION: "annotationText",
    K.RETURN_VALUE: "returnExprText",
    K.EXPRESSION_STATEMENT: "expressionText",
}

PATTERN_VALUED = {K.NAME, K.VISIBILITY, K.SPECIFIER, K.EXTENSION, K.IMPLEMENTATION}
MEMBER_LIKE = {K.CLASS, K.FUNCTION, K.ABSTRACT_FUNCTION, K.CONSTRUCTOR, K.DECLARATION_STATEMENT}
DIRECT_LIKE = {K.PARAMETER, K.ANNOTATION}


def _strip(text: str) -> str:
    return "".join(text.split())


class OracleWalker:
    def __init__(self, tree: CodeTree):
        self.tree = tree
        self.parents: dict[int, CodeNode | None] = {id(tree.root): None}
        self.nodes: list[CodeNode] = []
        stack = [tree.root]
        while stack:
            n = stack.pop(0)
            self.nodes.append(n)
            for c in n.children:
                self.parents[id(c)] = n
            stack = list(n.children) + stack

    def descendants(self, node: CodeNode) -> list[CodeNode]:
        out = []
        for c in node.children:
            out.append(c)
            out.extend(self.descendants(c))
        return out

    def ancestors(self, node: CodeNode) -> list[CodeNode]:
        out = []
        cur = self.parents.get(id(node))
        while cur is not None:
            out.append(cur)
            cur = self.parents.get(id(cur))
        return out

    # --- element semantics, re-derived

    def node_kinds_for(self, e: ElementNode, owner_kind: ElementKind | None) -> tuple[str, ...]:
        if e.kind is not K.DECLARATION_STATEMENT:
            return NODE_KINDS[e.kind]
        anchor = e.parent.kind if e.parent is not None else owner_kind
        if anchor is K.CLASS:
            return ("fieldDecl",)
        if anchor in (K.FUNCTION, K.CONSTRUCTOR):
            return ("localDeclStmt",)
        return ("fieldDecl", "localDeclStmt")

    def value_holds(self, node: CodeNode, e: ElementNode) -> bool:
        attr = ATTR_OF.get(e.kind)
        if attr is None:
            return True
        raw = node.attributes.get(attr, "")
        values = raw if isinstance(raw, list) else [raw]
        if e.value is None:
            if e.kind in (K.ANNOTATION, K.EXPRESSION_STATEMENT):
                return True
            return any(v != "" for v in values)
        if e.kind in PATTERN_VALUED:
            pat = parse_pattern(e.value)
            if isinstance(raw, list):
                return match_pattern_any(pat, values)
            return match_pattern(pat, values[0])
        if e.kind is K.TYPE:
            try:
                pat = parse_pattern(e.value)
                return match_pattern(pat, values[0])
            except PatternError:
                return values[0] == _strip(e.value)
        return any(v == _strip(e.value) for v in values)

    def element_self_holds(self, node: CodeNode, e: ElementNode) -> bool:
        if not self.value_holds(node, e):
            return False
        if e.with_expr is not None and not self.expr_holds(node, e.with_expr, e.kind):
            return False
        return True

    def chain_holds(self, node: CodeNode, e: ElementNode) -> bool:
        cur = node
        p = e.parent
        while p is not None:
            kinds = self.node_kinds_for(p, None)
            anc = None
            for a in self.ancestors(cur):
                if a.kind in kinds:
                    anc = a
                    break
            if anc is None or not self.element_self_holds(anc, p):
                return False
            cur = anc
            p = p.parent
        return True

    def expr_holds(self, owner: CodeNode, x: ConditionExpr, owner_kind: ElementKind) -> bool:
        if isinstance(x, And):
            return self.expr_holds(owner, x.left, owner_kind) and self.expr_holds(
                owner, x.right, owner_kind
            )
        if isinstance(x, Or):
            return self.expr_holds(owner, x.left, owner_kind) or self.expr_holds(
                owner, x.right, owner_kind
            )
        return self.condition_holds(owner, x.element, owner_kind)

    def condition_holds(self, owner: CodeNode, e: ElementNode, owner_kind: ElementKind) -> bool:
        if e.kind in ATTR_OF and e.kind not in NODE_KINDS and e.parent is None:
            return self.value_holds(owner, e)
        if e.kind in ATTR_OF and e.kind not in NODE_KINDS:
            # attribute anchored to an explicit parent: some contained node
            # of the parent's kind carries the attribute
            anchor = e.parent
            kinds = self.node_kinds_for(anchor, None)
            for d in self.descendants(owner):
                if d.kind not in kinds:
                    continue
                if not self.element_self_holds(d, anchor):
                    continue
                if not self.chain_holds(d, anchor):
                    continue
                if self.value_holds(d, e):
                    return True
            return False
        kinds = self.node_kinds_for(e, owner_kind)
        if e.parent is not None:
            pool = self.descendants(owner)
        elif e.kind in DIRECT_LIKE:
            pool = list(owner.children)
        elif owner_kind is K.CLASS and e.kind in MEMBER_LIKE:
            pool = list(owner.children)
        else:
            pool = self.descendants(owner)
        for d in pool:
            if d.kind not in kinds:
                continue
            if not self.element_self_holds(d, e):
                continue
            if e.parent is not None and not self.chain_holds(d, e):
                continue
            return True
        return False


def oracle_select(ast: RuleAst, tree: CodeTree) -> tuple[list[CodeNode], list[CodeNode]]:
    """(quantifier nodes, constraint-holding nodes) for one tree, by naive
    enumeration over every node."""
    w = OracleWalker(tree)
    head = ast.quantifier
    kinds = w.node_kinds_for(head, None)
    quantified = []
    for node in w.nodes:
        if node.kind not in kinds:
            continue
        if not w.element_self_holds(node, head):
            continue
        if not w.chain_holds(node, head):
            continue
        quantified.append(node)
    holding = [n for n in quantified if w.expr_holds(n, ast.constraint, head.kind)]
    return quantified, holding


def oracle_spans(ast: RuleAst, trees: list[CodeTree]) -> tuple[set, set]:
    """(satisfied span keys, violated span keys) over a corpus."""
    sat, viol = set(), set()
    for tree in trees:
        q, c = oracle_select(ast, tree)
        ckeys = {n.span.key() for n in c}
        for n in q:
            (sat if n.span.key() in ckeys else viol).add(n.span.key())
    return sat, viol
