"""Execute query pairs over parsed code trees.

Each file is evaluated independently: the quantifier query yields the
elements the rule applies to, the constraint query the ones that also
satisfy it, and the difference becomes the violation list.  Results are
merged in deterministic (file, line, column) order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .javaparse import CodeNode, CodeTree, SourceSpan
from .patterns import match_pattern, match_pattern_any
from .querycomp import AttrTest, NodeQuery, QAnd, QOr, QueryCond, QueryPair


@dataclass(frozen=True)
class FileFilter:
    """Project-relative include prefixes or glob patterns; empty means all
    files.  `*` matches within a path segment, `**` across segments."""

    include: tuple[str, ...] = ()

    @staticmethod
    def of(*include: str) -> "FileFilter":
        return FileFilter(tuple(_normalize_path(p) for p in include))

    def matches(self, path: str) -> bool:
        if not self.include:
            return True
        path = _normalize_path(path)
        for inc in self.include:
            if "*" in inc:
                if _glob_regex(inc).fullmatch(path):
                    return True
            elif path.startswith(inc):
                return True
        return False

    def to_dict(self) -> dict:
        return {"include": list(self.include)}

    @staticmethod
    def from_dict(d: dict | None) -> "FileFilter":
        if not d:
            return FileFilter()
        return FileFilter.of(*d.get("include", []))


def _normalize_path(p: str) -> str:
    return p.replace("\\", "/").lstrip("/")


def _glob_regex(pattern: str) -> re.Pattern:
    out = []
    i = 0
    while i < len(pattern):
        c = pattern[i]
        if c == "*":
            if pattern[i : i + 2] == "**":
                out.append(".*")
                i += 2
            else:
                out.append("[^/]*")
                i += 1
        else:
            out.append(re.escape(c))
            i += 1
    return re.compile("".join(out))


@dataclass(frozen=True)
class MatchRecord:
    span: SourceSpan
    snippetText: str
    status: str  # satisfied | violated

    def to_dict(self) -> dict:
        return {
            "span": self.span.to_dict(),
            "snippetText": self.snippetText,
            "status": self.status,
        }


@dataclass
class EvalResult:
    satisfied: list[MatchRecord] = field(default_factory=list)
    violated: list[MatchRecord] = field(default_factory=list)
    filesConsidered: int = 0
    filterMatchedZero: bool = False

    def to_dict(self) -> dict:
        return {
            "satisfied": [m.to_dict() for m in self.satisfied],
            "violated": [m.to_dict() for m in self.violated],
            "filesConsidered": self.filesConsidered,
            "filterMatchedZero": self.filterMatchedZero,
        }


class _TreeIndex:
    """Parent pointers and kind buckets for one code tree."""

    def __init__(self, tree: CodeTree):
        self.tree = tree
        self.parent: dict[int, CodeNode | None] = {id(tree.root): None}
        self.by_kind: dict[str, list[CodeNode]] = {}
        self.order: dict[int, int] = {}
        for i, node in enumerate(tree.root.walk()):
            self.order[id(node)] = i
            self.by_kind.setdefault(node.kind, []).append(node)
            for c in node.children:
                self.parent[id(c)] = node

    def nearest_ancestor(self, node: CodeNode, kinds: tuple[str, ...]) -> CodeNode | None:
        cur = self.parent.get(id(node))
        while cur is not None:
            if cur.kind in kinds:
                return cur
            cur = self.parent.get(id(cur))
        return None


def _attr_values(node: CodeNode, attr: str) -> list[str]:
    v = node.attributes.get(attr, "")
    if isinstance(v, list):
        return list(v)
    return [v]


def _attr_test(node: CodeNode, t: AttrTest) -> bool:
    values = _attr_values(node, t.attr)
    if t.mode == "exists":
        return any(v != "" for v in values)
    if t.mode == "expr":
        return any(v == t.expr for v in values)
    if t.is_list:
        return match_pattern_any(t.pattern, values)
    return match_pattern(t.pattern, values[0] if values else "")


def _annotation_leaf_values(node: CodeNode) -> list[str]:
    return [c.attr("annotationText") for c in node.children if c.kind == "annotation"]


def _node_matches(node: CodeNode, q: NodeQuery, idx: _TreeIndex) -> bool:
    if node.kind not in q.node_kinds:
        return False
    for t in q.self_predicates:
        if not _attr_test(node, t):
            return False
    if not _chain_matches(node, q.ancestor_chain, idx):
        return False
    if q.child_conditions is not None and not _cond_holds(node, q.child_conditions, idx):
        return False
    return True


def _chain_matches(node: CodeNode, chain: list[NodeQuery], idx: _TreeIndex) -> bool:
    cur = node
    for ctx in chain:
        anc = idx.nearest_ancestor(cur, ctx.node_kinds)
        if anc is None:
            return False
        for t in ctx.self_predicates:
            if not _attr_test(anc, t):
                return False
        if ctx.child_conditions is not None and not _cond_holds(
            anc, ctx.child_conditions, idx
        ):
            return False
        cur = anc
    return True


def _candidates(owner: CodeNode, q: NodeQuery) -> list[CodeNode]:
    if q.axis == "direct":
        return [c for c in owner.children if c.kind in q.node_kinds]
    out = []
    for n in owner.walk():
        if n is owner:
            continue
        if n.kind in q.node_kinds:
            out.append(n)
    return out


def _cond_holds(owner: CodeNode, cond: QueryCond, idx: _TreeIndex) -> bool:
    if isinstance(cond, QAnd):
        return _cond_holds(owner, cond.left, idx) and _cond_holds(owner, cond.right, idx)
    if isinstance(cond, QOr):
        return _cond_holds(owner, cond.left, idx) or _cond_holds(owner, cond.right, idx)
    q = cond.query
    if q.axis == "attr":
        return all(_attr_test(owner, t) for t in q.self_predicates)
    return any(_node_matches(n, q, idx) for n in _candidates(owner, q))


def select_nodes(q: NodeQuery, tree: CodeTree) -> list[CodeNode]:
    """All nodes selected by a compiled query, in source order."""
    idx = _TreeIndex(tree)
    out = []
    for nk in q.node_kinds:
        out.extend(n for n in idx.by_kind.get(nk, []) if _node_matches(n, q, idx))
    out.sort(key=lambda n: idx.order[id(n)])
    return out


def _sort_key(record: MatchRecord):
    s = record.span
    return (s.file, s.startLine, s.startCol, -s.endLine, -s.endCol)


def evaluate(pair: QueryPair, corpus: list[CodeTree], filter: FileFilter) -> EvalResult:
    """Run the pair over every filtered tree; quantifier hits that fail the
    constraint query become violations."""
    result = EvalResult()
    considered = [t for t in corpus if filter.matches(t.path)]
    result.filesConsidered = len(considered)
    result.filterMatchedZero = bool(filter.include) and not considered
    satisfied: list[MatchRecord] = []
    violated: list[MatchRecord] = []
    for tree in considered:
        quantified = select_nodes(pair.quantifier, tree)
        holding = {n.span.key() for n in select_nodes(pair.constraint, tree)}
        for node in quantified:
            record = MatchRecord(
                node.span,
                tree.snippet(node.span),
                "satisfied" if node.span.key() in holding else "violated",
            )
            (satisfied if record.status == "satisfied" else violated).append(record)
    satisfied.sort(key=_sort_key)
    violated.sort(key=_sort_key)
    result.satisfied = satisfied
    result.violated = violated
    return result
