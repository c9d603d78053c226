"""Editor assistance: grammar-driven autocomplete, in-context docs, lint.

Completion works by candidate testing against the parser itself: every
keyword (plus parentheses and a quoted-value placeholder) is appended to
the prefix before the cursor and kept when the result is still the prefix
of some well-formed rule.  When the prefix is already broken, positional
heuristics take over ("must" is always followed by "have"; after `with`
the children of the preceding element are offered).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .diagnostics import Diagnostic
from .grammar import (
    CHILD_KINDS,
    KIND_BY_KEYWORD,
    PARENT_KINDS,
    TWO_WORD_FIRST,
    ElementKind,
    Token,
    parse_rule,
    tokenize,
    viable_prefix,
)

LITERAL_PLACEHOLDER = '"..."'

_STRUCTURAL_ORDER = (
    "must",
    "have",
    "with",
    "of",
    "and",
    "or",
    "superclass",
    "interface",
    "(",
    ")",
    LITERAL_PLACEHOLDER,
)

_ELEMENT_KEYWORDS = tuple(sorted(k.surface for k in ElementKind))

CANDIDATE_TOKENS = _STRUCTURAL_ORDER[:-3] + _ELEMENT_KEYWORDS + ("(", ")", LITERAL_PLACEHOLDER)


@dataclass(frozen=True)
class Suggestion:
    token: str
    doc: str
    example: str

    def to_dict(self) -> dict:
        return {"token": self.token, "doc": self.doc, "example": self.example}


@dataclass(frozen=True)
class DocEntry:
    term: str
    description: str
    example: str

    def to_dict(self) -> dict:
        return {
            "term": self.term,
            "description": self.description,
            "example": self.example,
        }


@lru_cache(maxsize=1)
def doc_table() -> dict[str, DocEntry]:
    raw = resources.files("rulekit").joinpath("data/docs.json").read_text("utf-8")
    entries = [DocEntry(e["term"], e["description"], e["example"]) for e in json.loads(raw)]
    return {e.term: e for e in entries}


def _doc_for(token: str) -> tuple[str, str]:
    entry = doc_table().get(token)
    if entry is not None:
        return entry.description, entry.example
    if token == LITERAL_PLACEHOLDER:
        return (
            "A double-quoted value: an identifier pattern or exact expression text.",
            'name "get..."',
        )
    if token == "(":
        return ("Opens a group of conditions.", 'function must have (name "a" or name "b")')
    if token == ")":
        return ("Closes a group of conditions.", 'function must have (name "a" or name "b")')
    return "", ""


def _suggestion(token: str) -> Suggestion:
    doc, example = _doc_for(token)
    return Suggestion(token, doc, example)


def _order_key(token: str):
    if token in _STRUCTURAL_ORDER:
        return (0, _STRUCTURAL_ORDER.index(token), token)
    return (1, 0, token)


def _candidate_text(base: str, token: str) -> str:
    t = '"x"' if token == LITERAL_PLACEHOLDER else token
    return f"{base} {t}" if base and not base.endswith("(") else f"{base}{t}"


def complete(text: str, cursor: int) -> list[Suggestion]:
    """Valid next tokens at the cursor, derived from the parser; falls back
    to positional heuristics when the prefix itself no longer parses."""
    cursor = max(0, min(cursor, len(text)))
    prefix = text[:cursor]
    tokens, diags = tokenize(prefix, prefix=True)
    if any("unterminated quote" in d.message for d in diags):
        return []
    partial = ""
    base = prefix
    if tokens:
        last = tokens[-1]
        if last.kind == "partial":
            second = TWO_WORD_FIRST[last.value]
            completed = f"{last.value} {second}"
            if viable_prefix(prefix[: last.start] + completed):
                return [_suggestion(second)]
            return []
        if last.kind == "word" and last.end == len(prefix.rstrip()) == len(prefix):
            partial = last.value
            base = prefix[: last.start]
    out = []
    seen = set()
    for token in CANDIDATE_TOKENS:
        if token in seen:
            continue
        if partial and not token.startswith(partial):
            continue
        if viable_prefix(_candidate_text(base, token)):
            seen.add(token)
            out.append(token)
    if not out and not partial:
        out = [t for t in _fallback_tokens(tokens) if t not in seen]
    out.sort(key=_order_key)
    return [_suggestion(t) for t in out]


def _fallback_tokens(tokens: list[Token]) -> list[str]:
    """Positional heuristics for broken prefixes: look at the trailing
    keyword and the nearest element before it."""
    if not tokens:
        return []
    words = [t for t in tokens if t.kind == "kw"]
    if not words:
        return []
    last = words[-1].value
    if last == "must":
        return ["have"]
    if last == "with":
        el = _nearest_element(tokens[:-1])
        if el is not None:
            return [k.surface for k in sorted(CHILD_KINDS[el], key=lambda k: k.surface)] + ["("]
        return []
    if last == "have":
        head = _nearest_element(tokens, from_start=True)
        if head is not None:
            return [k.surface for k in sorted(CHILD_KINDS[head], key=lambda k: k.surface)] + ["("]
        return []
    if last == "of":
        el = _nearest_element(tokens[:-1])
        if el is not None and PARENT_KINDS[el]:
            return [k.surface for k in PARENT_KINDS[el]]
        return []
    return []


def _nearest_element(tokens: list[Token], from_start: bool = False) -> ElementKind | None:
    ordered = tokens if from_start else reversed(tokens)
    for t in ordered:
        if t.kind == "kw" and t.value in KIND_BY_KEYWORD:
            return KIND_BY_KEYWORD[t.value]
    return None


def hover_doc(text: str, offset: int) -> DocEntry | None:
    """Documentation for the keyword or element name under the cursor;
    None over literals, parentheses, or plain text."""
    tokens, _ = tokenize(text, prefix=True)
    for t in tokens:
        if t.start <= offset < t.end:
            if t.kind == "kw":
                return doc_table().get(t.value)
            return None
    return None


def lint(text: str) -> list[Diagnostic]:
    """Grammar diagnostics with spans; a duplicated `must` gets the
    dedicated message, an unfinished rule only a warning."""
    result = parse_rule(text)
    if result.ok:
        return [d for d in result.diagnostics if d.is_error]
    return result.diagnostics


__all__ = [
    "DocEntry",
    "LITERAL_PLACEHOLDER",
    "Suggestion",
    "complete",
    "doc_table",
    "hover_doc",
    "lint",
]
