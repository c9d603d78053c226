"""The quoted wildcard mini-language for matching identifiers and keywords.

Inside double quotes a rule may constrain a name-like value with simple
wildcards: ``...Repository`` (ends with), ``get...`` (starts with),
``...Dao...`` (contains), ``!BaseRepository`` (is not), combined with
``&&`` and ``||`` where ``&&`` binds tighter.  Three dots stand for any
sequence of characters; there are no regular expressions and no escaping.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .diagnostics import Diagnostic, error

# Characters allowed in a pattern literal: what Java allows in identifiers,
# plus <>[],. so written types like "List<String>" or "int[]" stay matchable.
LITERAL_CHARS = frozenset(
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_$<>[],"
)


class Anchor(Enum):
    EXACT = "exact"
    PREFIX = "prefix"
    SUFFIX = "suffix"
    CONTAINS = "contains"


@dataclass(frozen=True)
class PatternPart:
    negated: bool
    anchor: Anchor
    literal: str

    def test(self, subject: str) -> bool:
        """Anchor test against a single subject, negation applied (XOR)."""
        return self._anchor_test(subject) != self.negated

    def _anchor_test(self, subject: str) -> bool:
        if self.anchor is Anchor.EXACT:
            return subject == self.literal
        if self.anchor is Anchor.PREFIX:
            return subject.startswith(self.literal)
        if self.anchor is Anchor.SUFFIX:
            return subject.endswith(self.literal)
        return self.literal in subject

    def test_any(self, subjects: Iterable[str]) -> bool:
        """Part test against a list-valued subject (e.g. specifiers).

        A plain part holds when some entry passes the anchor test; a negated
        part holds when no entry does ("specifier \"!static\"" means the
        element has no static specifier).  For a single-entry list this
        coincides with test().
        """
        hit = any(self._anchor_test(s) for s in subjects)
        return hit != self.negated

    def render(self) -> str:
        bang = "!" if self.negated else ""
        if self.anchor is Anchor.EXACT:
            return f"{bang}{self.literal}"
        if self.anchor is Anchor.PREFIX:
            return f"{bang}{self.literal}..."
        if self.anchor is Anchor.SUFFIX:
            return f"{bang}...{self.literal}"
        return f"{bang}...{self.literal}..."


@dataclass(frozen=True)
class PatternExpr:
    """Disjunction of conjunctions of parts (`&&` binds tighter than `||`)."""

    alternatives: tuple[tuple[PatternPart, ...], ...]

    def __post_init__(self) -> None:
        if not self.alternatives or any(not alt for alt in self.alternatives):
            raise ValueError("pattern expression needs at least one part")

    def render(self) -> str:
        return "||".join(
            "&&".join(p.render() for p in alt) for alt in self.alternatives
        )


class PatternError(ValueError):
    def __init__(self, diagnostic: Diagnostic):
        super().__init__(diagnostic.message)
        self.diagnostic = diagnostic


def parse_pattern(text: str) -> PatternExpr:
    """Parse the contents of a quoted pattern (without the quotes).

    Raises PatternError carrying a Diagnostic whose span is relative to
    `text` on: empty parts, dangling `&&`/`||`, stray single `&`/`|`, dot
    runs that are not exactly three, and characters outside the literal
    alphabet.
    """
    if text == "":
        raise PatternError(error("empty pattern", 0, 0))
    alternatives: list[tuple[PatternPart, ...]] = []
    conj: list[PatternPart] = []
    i = 0
    n = len(text)
    while True:
        part, i = _parse_part(text, i)
        conj.append(part)
        if i >= n:
            break
        op = text[i : i + 2]
        if op == "&&":
            i += 2
        elif op == "||":
            alternatives.append(tuple(conj))
            conj = []
            i += 2
        else:
            raise PatternError(
                error(f"expected '&&' or '||', found {text[i]!r}", i, i + 1)
            )
        if i >= n:
            raise PatternError(error(f"dangling '{op}' at end of pattern", i - 2, i))
    alternatives.append(tuple(conj))
    return PatternExpr(tuple(alternatives))


def _parse_part(text: str, i: int) -> tuple[PatternPart, int]:
    start = i
    negated = False
    if i < len(text) and text[i] == "!":
        negated = True
        i += 1
    leading, i = _take_dots(text, i)
    lit_start = i
    while i < len(text) and text[i] in LITERAL_CHARS:
        i += 1
    literal = text[lit_start:i]
    if not literal:
        if i < len(text) and text[i] not in "&|.":
            raise PatternError(
                error(f"character {text[i]!r} not allowed in a pattern", i, i + 1)
            )
        raise PatternError(error("empty pattern part", start, max(i, start + 1)))
    trailing, i = _take_dots(text, i)
    if leading and trailing:
        anchor = Anchor.CONTAINS
    elif leading:
        anchor = Anchor.SUFFIX
    elif trailing:
        anchor = Anchor.PREFIX
    else:
        anchor = Anchor.EXACT
    return PatternPart(negated, anchor, literal), i


def _take_dots(text: str, i: int) -> tuple[bool, int]:
    run = 0
    while i + run < len(text) and text[i + run] == ".":
        run += 1
    if run == 0:
        return False, i
    if run != 3:
        raise PatternError(
            error("wildcard must be exactly three dots", i, i + run)
        )
    return True, i + 3


def match_pattern(pattern: PatternExpr, subject: str) -> bool:
    """True iff some `||`-alternative has all its parts passing on subject."""
    return any(all(p.test(subject) for p in alt) for alt in pattern.alternatives)


def match_pattern_any(pattern: PatternExpr, subjects: list[str]) -> bool:
    """Pattern match against a list-valued subject, part-wise (see test_any)."""
    return any(
        all(p.test_any(subjects) for p in alt) for alt in pattern.alternatives
    )
