import random

import paperrules as pr
from genrules import random_rule
from oracle import oracle_spans
from rulekit.evaluator import FileFilter, evaluate, select_nodes
from rulekit.grammar import parse_rule
from rulekit.javaparse import parse_java
from rulekit.querycomp import compile_rule


def pair_for(text):
    return compile_rule(parse_rule(text).ast)


def span_sets(result):
    return (
        {m.span.key() for m in result.satisfied},
        {m.span.key() for m in result.violated},
    )


class TestFileFilter:
    def test_empty_means_all(self, corpus):
        res = evaluate(pair_for("class must have name"), corpus, FileFilter())
        assert res.filesConsidered == len(corpus)
        assert not res.filterMatchedZero

    def test_prefix_include(self, corpus):
        res = evaluate(
            pair_for("class must have name"),
            corpus,
            FileFilter.of("src/com/bank/model"),
        )
        assert res.filesConsidered == 3

    def test_glob_within_segment(self, corpus):
        filt = FileFilter.of("src/com/bank/controller/*Controller.java")
        assert filt.matches("src/com/bank/controller/AuthController.java")
        assert not filt.matches("src/com/bank/controller/deep/AuthController.java")

    def test_glob_across_segments(self):
        filt = FileFilter.of("src/**/model/**")
        assert filt.matches("src/com/bank/model/Account.java")
        assert not filt.matches("src/com/bank/view/ConsoleView.java")

    def test_zero_match_filter_flag(self, corpus):
        res = evaluate(
            pair_for("class must have name"),
            corpus,
            FileFilter.of("does/not/exist"),
        )
        assert res.filterMatchedZero
        assert res.filesConsidered == 0
        assert res.satisfied == [] and res.violated == []

    def test_empty_corpus(self):
        res = evaluate(pair_for("class must have name"), [], FileFilter.of("x"))
        assert (res.satisfied, res.violated, res.filesConsidered) == ([], [], 0)
        assert res.filterMatchedZero
        res2 = evaluate(pair_for("class must have name"), [], FileFilter())
        assert not res2.filterMatchedZero

    def test_filter_soundness_adding_path_only_adds(self, corpus):
        pair = pair_for("class must have function")
        base = evaluate(pair, corpus, FileFilter.of("src/com/bank/model"))
        wider = evaluate(
            pair, corpus, FileFilter.of("src/com/bank/model", "src/com/bank/view")
        )
        b = span_sets(base)
        w = span_sets(wider)
        assert b[0] <= w[0] and b[1] <= w[1]


class TestSelectNodes:
    def test_kind_filter_only(self):
        tree, _ = parse_java("class A {} class B {}", "AB.java")
        nodes = select_nodes(pair_for("class must have name").quantifier, tree)
        assert [n.attr("name") for n in nodes] == ["A", "B"]

    def test_pattern_filter(self, corpus):
        pair = pair_for('function with name "get..." must have name')
        got = []
        for tree in corpus:
            got += [n.attr("name") for n in select_nodes(pair.quantifier, tree)]
        assert sorted(got) == [
            "getAccount",
            "getBalance",
            "getCity",
            "getCustomer",
            "getEmail",
            "getId",
            "getName",
            "getOwner",
        ]

    def test_ancestor_chain_restricts(self, corpus):
        pair = pair_for('function of class with name "...Controller" must have name')
        files = set()
        for tree in corpus:
            for n in select_nodes(pair.quantifier, tree):
                files.add(tree.path.rsplit("/", 1)[-1])
        assert files == {
            "AccountController.java",
            "CustomerController.java",
            "AuthController.java",
        }


class TestOracleEquivalence:
    def test_fixture_rules(self, corpus):
        for text in pr.ALL_FULL_RULES:
            ast = parse_rule(text).ast
            res = evaluate(compile_rule(ast), corpus, FileFilter())
            assert span_sets(res) == oracle_spans(ast, corpus), text

    def test_random_rules(self, corpus):
        rng = random.Random(20240515)
        for _ in range(150):
            ast = random_rule(rng, depth=3)
            res = evaluate(compile_rule(ast), corpus, FileFilter())
            assert span_sets(res) == oracle_spans(ast, corpus)


class TestResultShape:
    def test_partition_law(self, corpus):
        rng = random.Random(3)
        asts = [parse_rule(t).ast for t in pr.ALL_FULL_RULES]
        asts += [random_rule(rng, depth=3) for _ in range(50)]
        for ast in asts:
            pair = compile_rule(ast)
            res = evaluate(pair, corpus, FileFilter())
            quant = sum(len(select_nodes(pair.quantifier, t)) for t in corpus)
            assert len(res.satisfied) + len(res.violated) == quant
            sat, viol = span_sets(res)
            assert not (sat & viol)

    def test_order_stability(self, corpus):
        pair = pair_for(pr.FIG2_RULE)
        a = evaluate(pair, corpus, FileFilter())
        b = evaluate(pair, corpus, FileFilter())
        assert [m.span for m in a.violated] == [m.span for m in b.violated]
        keys = [(m.span.file, m.span.startLine, m.span.startCol) for m in a.violated]
        assert keys == sorted(keys)

    def test_snippet_equals_source_at_span(self, corpus):
        pair = pair_for(pr.RULE_III)
        res = evaluate(pair, corpus, FileFilter())
        by_path = {t.path: t for t in corpus}
        for m in res.satisfied + res.violated:
            assert m.snippetText == by_path[m.span.file].snippet(m.span)


class TestWalkthroughDeltas:
    """Violation counts for the three stages of the authoring walkthrough.
    These numbers are frozen into the web UI's end-to-end test, which
    replays the same edits against the live service."""

    STAGES = [
        ('class with visibility "public" must have function '
         'with type "void" and name "get...||search...||find..."', 11),
        ('class with visibility "public" must have function '
         'with type "void" or name "get...||search...||find..."', 2),
        ('class with visibility "public" must have function '
         'with type "void" or name "get...||search...||find...||login||make..."', 1),
    ]

    def test_violations_shrink_as_published(self, corpus):
        counts = []
        for text, expected in self.STAGES:
            ast = parse_rule(text).ast
            res = evaluate(compile_rule(ast), corpus, FileFilter())
            assert span_sets(res) == oracle_spans(ast, corpus)
            assert len(res.violated) == expected, text
            counts.append(len(res.violated))
        assert counts == sorted(counts, reverse=True)
        final = evaluate(compile_rule(parse_rule(self.STAGES[2][0]).ast), corpus, FileFilter())
        assert [m.span.file for m in final.violated] == ["src/com/bank/model/Transaction.java"]


class TestEoiScenario:
    def test_fig2_vs_fig3_sets_differ(self, corpus):
        fig2 = evaluate(pair_for(pr.FIG2_RULE), corpus, FileFilter())
        fig3 = evaluate(pair_for(pr.FIG3_RULE), corpus, FileFilter())
        v2 = {m.span.key() for m in fig2.violated}
        v3 = {m.span.key() for m in fig3.violated}
        assert v2 and v3 and v2 != v3
        # every class violating the class-level rule owns at least one
        # method violating the function-level rule
        files2 = {m.span.file for m in fig2.violated}
        assert {m.span.file for m in fig3.violated} <= files2
