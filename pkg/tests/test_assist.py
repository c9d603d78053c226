import pytest

import paperrules as pr
from rulekit.assist import (
    LITERAL_PLACEHOLDER,
    complete,
    doc_table,
    hover_doc,
    lint,
)
from rulekit.diagnostics import Severity
from rulekit.grammar import ElementKind, tokenize, viable_prefix


def tokens_of(text):
    toks, diags = tokenize(text)
    assert not diags
    return toks


def suggested(text, cursor=None):
    at = len(text) if cursor is None else cursor
    return [s.token for s in complete(text, at)]


class TestComplete:
    def test_must_is_followed_by_have_only(self):
        assert suggested("class must") == ["have"]

    def test_empty_text_offers_the_six_heads(self):
        assert suggested("") == [
            "abstract function",
            "class",
            "constructor",
            "declaration statement",
            "function",
            "parameter",
        ]

    def test_two_word_head_children(self):
        got = set(suggested("declaration statement must have "))
        assert got <= {
            "annotation",
            "specifier",
            "visibility",
            "type",
            "name",
            "initial value",
            "(",
        }
        assert "initial value" in got and "(" in got

    def test_two_word_completion(self):
        assert suggested("declaration ") == ["statement"]
        assert suggested("declaration statement must have initial") == ["value"]
        # `initial value` is not a class condition, so nothing completes here
        assert suggested("class must have initial") == []

    def test_literal_placeholder_offered(self):
        assert LITERAL_PLACEHOLDER in suggested("class must have name")

    def test_partial_word_filters(self):
        assert suggested("class mu") == ["must"]

    def test_inside_literal_suggests_nothing(self):
        assert suggested('class must have name "ge') == []

    def test_suggestions_carry_docs(self):
        (s,) = complete("class must", 10)
        assert s.token == "have"
        assert s.doc

    def test_fallback_after_broken_prefix(self):
        # parser cannot parse this prefix; the positional heuristic for
        # `with` still offers the children of the preceding element
        got = suggested('class with name "x" name with ')
        assert got == []or set(got) <= {k.surface for k in ElementKind} | {"("}


class TestCompletionSoundness:
    """For every token-boundary prefix of every fixture rule, the true
    next token must be among the suggestions."""

    @pytest.mark.parametrize("text", pr.ALL_FULL_RULES)
    def test_prefixes(self, text):
        toks = tokens_of(text)
        for i, tok in enumerate(toks):
            prefix = text[: tok.start]
            suggestions = suggested(prefix, len(prefix))
            if tok.kind == "lit":
                assert LITERAL_PLACEHOLDER in suggestions, (prefix, tok)
            else:
                want = tok.value
                assert want in suggestions, (prefix, want, suggestions)

    @pytest.mark.parametrize("text", pr.ALL_FULL_RULES[:4])
    def test_appending_any_suggestion_stays_viable(self, text):
        toks = tokens_of(text)
        for tok in toks[: len(toks) // 2]:
            prefix = text[: tok.start]
            for s in complete(prefix, len(prefix)):
                probe = '"x"' if s.token == LITERAL_PLACEHOLDER else s.token
                assert viable_prefix(f"{prefix} {probe}"), (prefix, s.token)


class TestHover:
    def test_hover_type(self):
        text = 'function with type "void" of class must have name "update||destroy"'
        entry = hover_doc(text, text.index("type") + 1)
        assert entry is not None and entry.term == "type"
        assert "type" in entry.description

    def test_hover_literal_is_none(self):
        text = 'class must have name "getValue"'
        assert hover_doc(text, text.index("getValue")) is None

    def test_hover_must(self):
        text = 'class must have name "x"'
        entry = hover_doc(text, text.index("must") + 2)
        assert entry is not None and entry.term == "must"

    def test_hover_two_word_keyword(self):
        text = 'declaration statement of class must have visibility "private"'
        entry = hover_doc(text, text.index("statement"))
        assert entry is not None and entry.term == "declaration statement"

    def test_coverage_every_keyword_documented(self):
        table = doc_table()
        for kind in ElementKind:
            assert kind.surface in table
        for kw in ("with", "of", "must", "have", "and", "or", "superclass", "interface"):
            assert kw in table


class TestLint:
    def test_duplicate_must_flagged_on_second(self):
        text = 'class must have name "A" must have'
        (d,) = lint(text)
        assert d.message == "only one 'must' is allowed"
        assert text[d.span.start : d.span.end] == "must"
        assert d.span.start > text.index("must")

    def test_valid_rule_empty(self):
        assert lint(pr.TABLE1) == []

    def test_incomplete_rule_is_warning_not_error(self):
        (d,) = lint("class must have")
        assert d.severity is Severity.WARNING
        assert d.message == "incomplete rule"
