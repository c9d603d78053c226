"""Structured-editor model and its two-way conversion with rule text.

The model mirrors the graphical form: a class template whose elements are
inactive until given a characteristic, checkbox-style constraint flags,
per-element connectives, and an element-of-interest marker (defaulting to
the lowest common ancestor of everything marked as a constraint).

Conversion notes: parenthesized connective groups survive as dedicated
group containers; when text is first converted to a model, condition
clauses anchored with `of` are re-nested under their parent element, so
converting back may yield a different (semantically equivalent at the
member level) canonical sentence.  A second round trip is always a fixed
point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum

from .diagnostics import Diagnostic
from .evaluator import FileFilter
from .grammar import (
    HEAD_KINDS,
    PARENT_KINDS,
    VALUE_NONE,
    And,
    ConditionExpr,
    ElementKind,
    ElementNode,
    Leaf,
    Or,
    RuleAst,
    parse_rule,
    render_rule,
)

K = ElementKind

STRUCTURAL_KINDS = frozenset(HEAD_KINDS) | {K.CLASS}

# Characteristic and member slots shown per element in the template form.
TEMPLATE_CHILDREN: dict[ElementKind, tuple[ElementKind, ...]] = {
    K.CLASS: (
        K.ANNOTATION,
        K.VISIBILITY,
        K.SPECIFIER,
        K.NAME,
        K.EXTENSION,
        K.IMPLEMENTATION,
        K.DECLARATION_STATEMENT,
        K.FUNCTION,
        K.ABSTRACT_FUNCTION,
        K.CONSTRUCTOR,
    ),
    K.FUNCTION: (
        K.ANNOTATION,
        K.VISIBILITY,
        K.SPECIFIER,
        K.TYPE,
        K.NAME,
        K.PARAMETER,
        K.RETURN_VALUE,
        K.EXPRESSION_STATEMENT,
        K.DECLARATION_STATEMENT,
    ),
    K.ABSTRACT_FUNCTION: (
        K.ANNOTATION,
        K.VISIBILITY,
        K.SPECIFIER,
        K.TYPE,
        K.NAME,
        K.PARAMETER,
    ),
    K.CONSTRUCTOR: (
        K.ANNOTATION,
        K.VISIBILITY,
        K.SPECIFIER,
        K.PARAMETER,
        K.RETURN_VALUE,
        K.EXPRESSION_STATEMENT,
        K.DECLARATION_STATEMENT,
    ),
    K.DECLARATION_STATEMENT: (
        K.ANNOTATION,
        K.VISIBILITY,
        K.SPECIFIER,
        K.TYPE,
        K.NAME,
        K.INITIAL_VALUE,
    ),
    K.PARAMETER: (K.TYPE, K.NAME),
}

# Where a rule head gets nested when its `of` chain does not reach a class.
WRAPPERS: dict[ElementKind, tuple[ElementKind, ...]] = {
    K.CLASS: (),
    K.FUNCTION: (K.CLASS,),
    K.ABSTRACT_FUNCTION: (K.CLASS,),
    K.CONSTRUCTOR: (K.CLASS,),
    K.DECLARATION_STATEMENT: (K.CLASS,),
    K.PARAMETER: (K.CLASS, K.FUNCTION),
}


class ElementState(Enum):
    INACTIVE = "inactive"
    OF_INTEREST = "ofInterest"
    ACTIVE = "active"


class ModelSyncError(ValueError):
    def __init__(self, message: str, diagnostics: list[Diagnostic] | None = None,
                 element_id: str | None = None):
        super().__init__(message)
        self.message = message
        self.diagnostics = diagnostics or []
        self.element_id = element_id


@dataclass
class GuiElement:
    """One box in the structured form; kind None marks a connective group
    container introduced by parentheses."""

    id: str
    kind: ElementKind | None
    state: ElementState = ElementState.INACTIVE
    value_text: str | None = None
    constraint_flag: bool = False
    connective: str = "and"
    children: list["GuiElement"] = field(default_factory=list)
    text_span: tuple[int, int] | None = None

    @property
    def is_group(self) -> bool:
        return self.kind is None

    @property
    def eoi_eligible(self) -> bool:
        return self.kind in STRUCTURAL_KINDS if self.kind else False

    @property
    def active(self) -> bool:
        return self.state is ElementState.ACTIVE

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind.surface if self.kind else "group",
            "state": self.state.value,
            "valueText": self.value_text,
            "constraintFlag": self.constraint_flag,
            "connective": self.connective,
            "eoiEligible": self.eoi_eligible,
            "textSpan": list(self.text_span) if self.text_span else None,
            "children": [c.to_dict() for c in self.children],
        }

    @staticmethod
    def from_dict(d: dict) -> "GuiElement":
        kind = None if d["kind"] == "group" else ElementKind(d["kind"])
        el = GuiElement(
            id=d["id"],
            kind=kind,
            state=ElementState(d.get("state", "inactive")),
            value_text=d.get("valueText"),
            constraint_flag=bool(d.get("constraintFlag", False)),
            connective=d.get("connective", "and"),
            children=[GuiElement.from_dict(c) for c in d.get("children", [])],
        )
        span = d.get("textSpan")
        el.text_span = tuple(span) if span else None
        return el


@dataclass
class GuiRuleModel:
    root: GuiElement
    eoi_id: str | None = None
    title: str = ""
    description: str = ""
    tags: list[str] = field(default_factory=list)
    file_filter: FileFilter = field(default_factory=FileFilter)

    def find(self, element_id: str) -> GuiElement | None:
        for el in self.root.walk():
            if el.id == element_id:
                return el
        return None

    def parent_of(self, element_id: str) -> GuiElement | None:
        for el in self.root.walk():
            for c in el.children:
                if c.id == element_id:
                    return el
        return None

    def path_to(self, element_id: str) -> list[GuiElement] | None:
        def rec(el: GuiElement, acc: list[GuiElement]):
            acc.append(el)
            if el.id == element_id:
                return list(acc)
            for c in el.children:
                found = rec(c, acc)
                if found:
                    return found
            acc.pop()
            return None

        return rec(self.root, [])

    def to_dict(self) -> dict:
        return {
            "root": self.root.to_dict(),
            "eoiId": self.eoi_id,
            "title": self.title,
            "description": self.description,
            "tags": list(self.tags),
            "fileFilter": self.file_filter.to_dict(),
        }

    @staticmethod
    def from_dict(d: dict) -> "GuiRuleModel":
        return GuiRuleModel(
            root=GuiElement.from_dict(d["root"]),
            eoi_id=d.get("eoiId"),
            title=d.get("title", ""),
            description=d.get("description", ""),
            tags=list(d.get("tags", [])),
            file_filter=FileFilter.from_dict(d.get("fileFilter")),
        )


# ---------------------------------------------------------------------------
# Template construction


def _slug(kind: ElementKind) -> str:
    return kind.surface.replace(" ", "-")


def _new_element(kind: ElementKind, parent_id: str, counter) -> GuiElement:
    eid = f"{parent_id}/{_slug(kind)}:{next(counter)}" if parent_id else _slug(kind)
    el = GuiElement(id=eid, kind=kind)
    sub_counter = itertools.count()
    for ck in TEMPLATE_CHILDREN.get(kind, ()):
        if ck is K.CLASS:
            continue  # nested class boxes are added on demand
        el.children.append(_new_element(ck, eid, sub_counter))
    return el


def build_template() -> GuiRuleModel:
    """A blank form: the class outline with every slot inactive."""
    root = _new_element(K.CLASS, "", itertools.count())
    return GuiRuleModel(root=root)


def add_element(model: GuiRuleModel, parent_id: str, kind: ElementKind) -> GuiElement:
    """Add another instance of an element to its parent (the form's
    "Add [element]" button)."""
    parent = model.find(parent_id)
    if parent is None or parent.kind is None:
        raise ModelSyncError(f"no such element: {parent_id}")
    if kind not in TEMPLATE_CHILDREN.get(parent.kind, ()) and not (
        parent.kind is K.CLASS and kind is K.CLASS
    ):
        raise ModelSyncError(
            f"'{kind.surface}' cannot be added under '{parent.kind.surface}'",
            element_id=parent_id,
        )
    existing = sum(1 for c in parent.children for _ in [0] if c.kind is kind)
    el = _new_element(kind, parent.id, itertools.count(existing * 100))
    el.id = f"{parent.id}/{_slug(kind)}:+{existing}"
    parent.children.append(el)
    return el


# ---------------------------------------------------------------------------
# Activity and constraints


def has_active(el: GuiElement) -> bool:
    return any(c.active for c in el.walk())


def has_flagged(el: GuiElement) -> bool:
    return any(c.constraint_flag and c.active for c in el.walk())


def _enforce_constraint_closure(model: GuiRuleModel) -> None:
    """Re-establish the downward closure: every active descendant of a
    flagged element is flagged."""

    def down(el: GuiElement, inherited: bool):
        if inherited and el.active:
            el.constraint_flag = True
        for c in el.children:
            down(c, inherited or (el.constraint_flag and el.active))

    down(model.root, False)


def set_value(model: GuiRuleModel, element_id: str, value: str | None) -> None:
    el = model.find(element_id)
    if el is None or el.is_group:
        raise ModelSyncError(f"no such element: {element_id}")
    el.value_text = value
    el.state = ElementState.ACTIVE
    _activate_ancestors(model, element_id)
    _enforce_constraint_closure(model)


def activate(model: GuiRuleModel, element_id: str, active: bool = True) -> None:
    el = model.find(element_id)
    if el is None:
        raise ModelSyncError(f"no such element: {element_id}")
    el.state = ElementState.ACTIVE if active else ElementState.INACTIVE
    if active:
        _activate_ancestors(model, element_id)
    else:
        el.constraint_flag = False
        for c in el.walk():
            c.state = ElementState.INACTIVE
            c.constraint_flag = False
    _enforce_constraint_closure(model)


def _activate_ancestors(model: GuiRuleModel, element_id: str) -> None:
    path = model.path_to(element_id)
    if path:
        for el in path[:-1]:
            if not el.is_group and not el.active:
                el.state = ElementState.ACTIVE


def set_constraint(model: GuiRuleModel, element_id: str, flag: bool) -> None:
    """Toggle the constraint checkbox; marking an element marks all of its
    active content, clearing it also clears enclosing flags so the
    downward-closure invariant always holds."""
    el = model.find(element_id)
    if el is None:
        raise ModelSyncError(f"no such element: {element_id}")
    for c in el.walk():
        if flag and not c.active and c is not el:
            continue
        c.constraint_flag = flag
    if flag:
        el.state = ElementState.ACTIVE
        _activate_ancestors(model, element_id)
    else:
        path = model.path_to(element_id) or []
        for anc in path[:-1]:
            anc.constraint_flag = False
    _enforce_constraint_closure(model)


def set_connective(model: GuiRuleModel, element_id: str, connective: str) -> None:
    if connective not in ("and", "or"):
        raise ModelSyncError(f"connective must be 'and' or 'or', not {connective!r}")
    el = model.find(element_id)
    if el is None:
        raise ModelSyncError(f"no such element: {element_id}")
    el.connective = connective


def set_eoi(model: GuiRuleModel, element_id: str) -> None:
    el = model.find(element_id)
    if el is None or not el.eoi_eligible:
        raise ModelSyncError(
            f"element {element_id} cannot be the element of interest",
            element_id=element_id,
        )
    model.eoi_id = element_id


def guide_state(model: GuiRuleModel) -> dict:
    """Progress of the three authoring steps: describe code, mark
    constraints, review connectives."""
    step1 = has_active(model.root)
    step2 = any(el.constraint_flag and el.active for el in model.root.walk())
    current = 1 if not step1 else (2 if not step2 else 3)
    return {"step1Done": step1, "step2Done": step2, "currentStep": current}


# ---------------------------------------------------------------------------
# Default element of interest


def _structural_owner(path: list[GuiElement]) -> GuiElement:
    for el in reversed(path):
        if not el.is_group and el.kind in STRUCTURAL_KINDS:
            return el
    return path[0]


def default_eoi(model: GuiRuleModel) -> str:
    """Deepest structural element containing every constraint-flagged
    element; a flagged characteristic is owned by its enclosing element."""
    flagged = [el for el in model.root.walk() if el.constraint_flag and el.active]
    if not flagged:
        raise ModelSyncError("no constraint is marked yet")
    owner_paths = []
    for el in flagged:
        path = model.path_to(el.id)
        owner = _structural_owner(path)
        owner_paths.append(path[: path.index(owner) + 1])
    common = owner_paths[0]
    for path in owner_paths[1:]:
        limit = min(len(common), len(path))
        i = 0
        while i < limit and common[i].id == path[i].id:
            i += 1
        common = common[:i]
    return _structural_owner(common).id


# ---------------------------------------------------------------------------
# Model -> text


def _fold(parts: list[ConditionExpr], connective: str) -> ConditionExpr:
    expr = parts[0]
    for p in parts[1:]:
        expr = And(expr, p) if connective == "and" else Or(expr, p)
    return expr


def _to_condition(el: GuiElement) -> ConditionExpr:
    if el.is_group:
        parts = [_to_condition(c) for c in el.children if has_active(c)]
        return _fold(parts, el.connective)
    return Leaf(_to_element_node(el))


def _to_element_node(el: GuiElement, skip: GuiElement | None = None) -> ElementNode:
    conds = [
        _to_condition(c)
        for c in el.children
        if c is not skip and has_active(c)
    ]
    with_expr = _fold(conds, el.connective) if conds else None
    value = el.value_text if el.value_text else None
    if el.kind in VALUE_NONE:
        value = None
    return ElementNode(el.kind, value, with_expr, None)


def model_to_text(model: GuiRuleModel) -> str:
    """Render the form state as canonical rule text.  The element of
    interest (explicit or defaulted) becomes the head; constrained content
    inside it becomes the must-have clause; active ancestors become the
    `of` chain."""
    eoi_id = model.eoi_id or default_eoi(model)
    path = model.path_to(eoi_id)
    if path is None:
        raise ModelSyncError(f"no such element: {eoi_id}")
    eoi = path[-1]
    if not eoi.eoi_eligible:
        raise ModelSyncError(
            "the element of interest must be a structural element",
            element_id=eoi_id,
        )
    for el in model.root.walk():
        if el.constraint_flag and el.active and el.id != eoi.id:
            inside = any(p.id == eoi.id for p in model.path_to(el.id))
            if not inside:
                raise ModelSyncError(
                    "a constraint outside the element of interest cannot be "
                    "expressed; move the star up or the constraint down",
                    element_id=el.id,
                )
    must_children = [
        c for c in eoi.children if has_active(c) and has_flagged(c)
    ]
    quant_children = [
        c for c in eoi.children if has_active(c) and not has_flagged(c)
    ]
    if not must_children:
        raise ModelSyncError("no constraint is marked yet")
    head = _to_element_node_with(eoi, quant_children)
    # active enclosing elements become the `of` chain, nearest first
    ancestors = [p for p in path[:-1] if not p.is_group]
    chain = [a for a in reversed(ancestors) if _ancestor_used(a, path)]
    path_ids = {p.id for p in path}
    for anc in chain:
        tail = _chain_tail(head)
        if not PARENT_KINDS[tail.kind]:
            raise ModelSyncError(
                f"conditions on elements enclosing a "
                f"'{tail.kind.surface}' cannot be expressed",
                element_id=anc.id,
            )
        on_path = next(c for c in anc.children if c.id in path_ids)
        tail.parent = _to_element_node(anc, skip=on_path)
    must = _fold([_to_condition(c) for c in must_children], eoi.connective)
    text = render_rule(RuleAst(head, must))
    check = parse_rule(text)
    if not check.ok:
        raise ModelSyncError(
            "the form state does not translate to a well-formed rule",
            diagnostics=check.diagnostics,
        )
    return text


def _chain_tail(node: ElementNode) -> ElementNode:
    while node.parent is not None:
        node = node.parent
    return node


def _to_element_node_with(el: GuiElement, children: list[GuiElement]) -> ElementNode:
    conds = [_to_condition(c) for c in children]
    with_expr = _fold(conds, el.connective) if conds else None
    value = el.value_text if el.value_text and el.kind not in VALUE_NONE else None
    return ElementNode(el.kind, value, with_expr, None)


def _ancestor_used(anc: GuiElement, path: list[GuiElement]) -> bool:
    if anc.active:
        return True
    # an inactive ancestor still appears when something above it is used,
    # otherwise the nesting would silently change meaning
    idx = path.index(anc)
    return any(p.active for p in path[:idx] if not p.is_group)


# ---------------------------------------------------------------------------
# Text -> model


def text_to_model(text: str) -> GuiRuleModel:
    """Build the form state for parsed rule text: the head becomes the
    element of interest, the must-have content is constraint-flagged, and
    unused template slots stay inactive."""
    result = parse_rule(text)
    if not result.ok:
        raise ModelSyncError("rule text does not parse", diagnostics=result.diagnostics)
    ast = result.ast
    chain: list[ElementNode] = []
    node = ast.quantifier
    while node is not None:
        chain.append(node)
        node = node.parent
    outer_first = list(reversed(chain))
    wrappers = () if outer_first[0].kind is K.CLASS else WRAPPERS[outer_first[0].kind]
    counter = itertools.count(1000)
    root: GuiElement | None = None
    parent: GuiElement | None = None
    for wk in wrappers:
        el = _new_element(wk, parent.id if parent else "", counter)
        if parent is None:
            root = el
        else:
            parent.children.append(el)
        parent = el
    head_el: GuiElement | None = None
    for enode in outer_first:
        el = _build_single(enode, parent.id if parent else "", counter,
                           constraint=False)
        if parent is None:
            root = el
        else:
            parent.children.append(el)
        parent = el
        head_el = el
    _attach_expr(head_el, ast.constraint, itertools.count(5000), constraint=True)
    _complete_template(root)
    model = GuiRuleModel(root=root, eoi_id=head_el.id)
    return model


def _build_single(
    enode: ElementNode, parent_id: str, counter, constraint: bool
) -> GuiElement:
    """One element box (ignoring the node's own `of` chain)."""
    eid = f"{parent_id}/{_slug(enode.kind)}:{next(counter)}" if parent_id else _slug(enode.kind)
    el = GuiElement(
        id=eid,
        kind=enode.kind,
        state=ElementState.ACTIVE,
        value_text=enode.value,
        constraint_flag=constraint,
    )
    el.text_span = (enode.span.start, enode.span.end) if enode.span else None
    if enode.with_expr is not None:
        _attach_expr(el, enode.with_expr, counter, constraint=constraint)
    return el


def _from_element_node(
    enode: ElementNode, parent_id: str, counter, constraint: bool
) -> GuiElement:
    """An element with its `of` chain re-nested: `d of m of c` becomes the
    c box containing the m box containing the d box."""
    el = _build_single(enode, parent_id, counter, constraint)
    if enode.parent is None:
        return el
    chain: list[ElementNode] = []
    p = enode.parent
    while p is not None:
        chain.append(p)
        p = p.parent
    top: GuiElement | None = None
    cur: GuiElement | None = None
    for pn in reversed(chain):
        pel = _build_single(pn, cur.id if cur else parent_id, counter, constraint)
        if cur is None:
            top = pel
        else:
            cur.children.append(pel)
        cur = pel
    cur.children.append(el)
    return top


def _attach_expr(owner: GuiElement, expr: ConditionExpr, counter, constraint: bool):
    op, parts = _flatten(expr)
    owner.connective = op
    for part in parts:
        if isinstance(part, Leaf):
            child = _from_element_node(part.element, owner.id, counter, constraint)
            owner.children.append(child)
        else:
            group = GuiElement(
                id=f"{owner.id}/group:{next(counter)}",
                kind=None,
                state=ElementState.ACTIVE,
                constraint_flag=constraint,
            )
            _attach_expr(group, part, counter, constraint)
            owner.children.append(group)


def _flatten(expr: ConditionExpr) -> tuple[str, list[ConditionExpr]]:
    """n-ary view of a connective chain: Or(Or(a,b),c) -> ("or", [a,b,c])."""
    if isinstance(expr, Leaf):
        return "and", [expr]
    op_type = And if isinstance(expr, And) else Or
    op = "and" if op_type is And else "or"
    parts: list[ConditionExpr] = []

    def walk(x: ConditionExpr):
        if isinstance(x, op_type):
            walk(x.left)
            walk(x.right)
        else:
            parts.append(x)

    walk(expr)
    return op, parts


def _complete_template(el: GuiElement) -> None:
    """Append the unused template slots (inactive) after the slots a rule
    actually uses, so the form still shows the full outline."""
    if el.kind is None:
        for c in el.children:
            _complete_template(c)
        return
    for c in el.children:
        _complete_template(c)
    present = {c.kind for c in el.children if c.kind is not None}
    counter = itertools.count(9000)
    for ck in TEMPLATE_CHILDREN.get(el.kind, ()):
        if ck in present or ck is K.CLASS:
            continue
        el.children.append(_new_element(ck, el.id, counter))


def token_map(model: GuiRuleModel) -> list[dict]:
    """Text-span to element-id links for editor highlighting (available on
    models built from text)."""
    out = []
    for el in model.root.walk():
        if el.text_span is not None and el.active:
            out.append({"start": el.text_span[0], "end": el.text_span[1], "id": el.id})
    out.sort(key=lambda d: d["start"])
    return out
