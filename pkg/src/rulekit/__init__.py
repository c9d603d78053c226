"""rulekit: author and continuously check project-specific design rules.

Rules are written in a small English-like language ("class must have
declaration statement with visibility \"private\" ..."), compiled into a
quantifier/constraint query pair over a Java-subset syntax tree, and
evaluated to produce satisfying snippets and violations with source
locations.
"""

__version__ = "0.1.0"

from .diagnostics import Diagnostic, Severity, Span
from .grammar import (
    And,
    ConditionExpr,
    ElementKind,
    ElementNode,
    Leaf,
    Or,
    ParseResult,
    RuleAst,
    parse_element,
    parse_rule,
    render_rule,
)
from .patterns import PatternExpr, PatternPart, match_pattern, parse_pattern

__all__ = [
    "And",
    "ConditionExpr",
    "Diagnostic",
    "ElementKind",
    "ElementNode",
    "Leaf",
    "Or",
    "ParseResult",
    "PatternExpr",
    "PatternPart",
    "RuleAst",
    "Severity",
    "Span",
    "match_pattern",
    "parse_element",
    "parse_pattern",
    "parse_rule",
    "render_rule",
]
