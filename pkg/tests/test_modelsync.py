import random

import pytest

import paperrules as pr
from rulekit.evaluator import FileFilter, evaluate
from rulekit.grammar import ElementKind as K
from rulekit.grammar import parse_rule, render_rule
from rulekit.modelsync import (
    ModelSyncError,
    activate,
    add_element,
    build_template,
    default_eoi,
    guide_state,
    model_to_text,
    set_connective,
    set_constraint,
    set_eoi,
    set_value,
    text_to_model,
    token_map,
)
from rulekit.querycomp import compile_rule


def child_of(el, kind):
    return next(c for c in el.children if c.kind is kind)


def fig2_model():
    """class( visibility=public ) containing function( name=get... * )"""
    m = build_template()
    set_value(m, child_of(m.root, K.VISIBILITY).id, "public")
    fn = child_of(m.root, K.FUNCTION)
    name = child_of(fn, K.NAME)
    set_value(m, name.id, "get...")
    set_constraint(m, name.id, True)
    return m


class TestDefaultEoi:
    def test_single_constraint_selects_containing_function(self):
        m = fig2_model()
        eoi = m.find(default_eoi(m))
        assert eoi.kind is K.FUNCTION

    def test_two_siblings_select_class(self):
        m = build_template()
        decl = child_of(m.root, K.DECLARATION_STATEMENT)
        set_value(m, child_of(decl, K.VISIBILITY).id, "private")
        set_constraint(m, child_of(decl, K.VISIBILITY).id, True)
        fn = child_of(m.root, K.FUNCTION)
        set_value(m, child_of(fn, K.NAME).id, "get...")
        set_constraint(m, child_of(fn, K.NAME).id, True)
        assert m.find(default_eoi(m)).kind is K.CLASS

    def test_two_parameters_select_function(self):
        m = build_template()
        fn = child_of(m.root, K.FUNCTION)
        p1 = child_of(fn, K.PARAMETER)
        set_value(m, child_of(p1, K.TYPE).id, "int")
        set_constraint(m, child_of(p1, K.TYPE).id, True)
        p2 = add_element(m, fn.id, K.PARAMETER)
        set_value(m, child_of(p2, K.NAME).id, "id")
        set_constraint(m, child_of(p2, K.NAME).id, True)
        assert m.find(default_eoi(m)).kind is K.FUNCTION

    def test_no_constraint_is_error(self):
        with pytest.raises(ModelSyncError, match="no constraint"):
            default_eoi(build_template())


class TestModelToText:
    def test_fig2_function_eoi(self):
        assert model_to_text(fig2_model()) == pr.FIG2_RULE

    def test_fig3_class_eoi_after_star_click(self):
        m = fig2_model()
        set_eoi(m, m.root.id)
        assert model_to_text(m) == pr.FIG3_RULE

    def test_walkthrough_final_state(self):
        m = build_template()
        set_value(m, child_of(m.root, K.VISIBILITY).id, "public")
        fn = child_of(m.root, K.FUNCTION)
        set_value(m, child_of(fn, K.TYPE).id, "void")
        set_value(m, child_of(fn, K.NAME).id, "get...||search...||find...")
        set_constraint(m, child_of(fn, K.TYPE).id, True)
        set_constraint(m, child_of(fn, K.NAME).id, True)
        set_eoi(m, m.root.id)
        and_text = model_to_text(m)
        assert and_text == (
            'class with visibility "public" must have function '
            'with type "void" and name "get...||search...||find..."'
        )
        set_connective(m, fn.id, "or")
        or_text = model_to_text(m)
        assert or_text == render_rule(parse_rule(pr.WALKTHROUGH_V1).ast)

    def test_constraint_outside_eoi_rejected(self):
        m = fig2_model()
        vis = child_of(m.root, K.VISIBILITY)
        set_constraint(m, vis.id, True)
        fn = child_of(m.root, K.FUNCTION)
        set_eoi(m, fn.id)
        with pytest.raises(ModelSyncError, match="outside the element of interest"):
            model_to_text(m)

    def test_parameter_eoi_with_ancestor_conditions_rejected(self):
        m = build_template()
        set_value(m, child_of(m.root, K.VISIBILITY).id, "public")
        fn = child_of(m.root, K.FUNCTION)
        param = child_of(fn, K.PARAMETER)
        set_value(m, child_of(param, K.TYPE).id, "String")
        set_constraint(m, child_of(param, K.TYPE).id, True)
        set_eoi(m, param.id)
        with pytest.raises(ModelSyncError, match="cannot be expressed"):
            model_to_text(m)


class TestTextToModel:
    def test_table1_shape(self):
        m = text_to_model(pr.TABLE1)
        assert m.root.kind is K.CLASS and m.root.active
        assert m.find(m.eoi_id).kind is K.CLASS
        flagged = [e for e in m.root.walk() if e.constraint_flag and e.active]
        kinds = {e.kind for e in flagged}
        assert K.DECLARATION_STATEMENT in kinds and K.FUNCTION in kinds

    def test_minimal_rule(self):
        m = text_to_model('function must have name "x"')
        assert m.find(m.eoi_id).kind is K.FUNCTION
        assert m.root.kind is K.CLASS
        assert not m.root.active  # synthetic wrapper stays inactive

    def test_unparseable_text_propagates_diagnostics(self):
        with pytest.raises(ModelSyncError) as e:
            text_to_model("class must must have")
        assert e.value.diagnostics

    @pytest.mark.parametrize("text", pr.ALL_FULL_RULES)
    def test_fixture_rules_reach_canonical_fixed_point(self, text):
        canonical = render_rule(parse_rule(text).ast)
        once = model_to_text(text_to_model(text))
        assert once == canonical
        assert model_to_text(text_to_model(once)) == once

    @pytest.mark.parametrize("text", pr.ALL_FULL_RULES)
    def test_round_trip_preserves_compiled_queries(self, text, corpus):
        source_pair = compile_rule(parse_rule(text).ast)
        round_pair = compile_rule(parse_rule(model_to_text(text_to_model(text))).ast)
        a = evaluate(source_pair, corpus, FileFilter())
        b = evaluate(round_pair, corpus, FileFilter())
        assert [m.span for m in a.satisfied] == [m.span for m in b.satisfied]
        assert [m.span for m in a.violated] == [m.span for m in b.violated]

    def test_token_map_covers_elements(self):
        text = pr.USAGE_RULE_4
        m = text_to_model(text)
        spans = token_map(m)
        words = [text[s["start"] : s["end"]] for s in spans]
        assert words == ["function", "type", "class", "name"]
        assert len({s["id"] for s in spans}) == len(spans)


class TestEoiInvariance:
    def test_same_snippets_different_queries(self, corpus):
        m = fig2_model()
        fig2_text = model_to_text(m)
        set_eoi(m, m.root.id)
        fig3_text = model_to_text(m)
        assert fig2_text.split()[0] == "function"
        assert fig3_text.split()[0] == "class"
        p2 = compile_rule(parse_rule(fig2_text).ast)
        p3 = compile_rule(parse_rule(fig3_text).ast)
        assert p2.eoi_kind is K.FUNCTION and p3.eoi_kind is K.CLASS
        v2 = {m_.span.key() for m_ in evaluate(p2, corpus, FileFilter()).violated}
        v3 = {m_.span.key() for m_ in evaluate(p3, corpus, FileFilter()).violated}
        assert v2 != v3 and v2 and v3


class TestInvariantsUnderMutation:
    KINDS = [K.VISIBILITY, K.NAME, K.TYPE, K.SPECIFIER]

    def test_constraint_closure_random_toggles(self):
        rng = random.Random(99)
        m = build_template()
        elements = [e for e in m.root.walk()]
        for _ in range(300):
            el = rng.choice(elements)
            action = rng.random()
            if action < 0.4:
                activate(m, el.id, rng.random() < 0.8)
            elif action < 0.8:
                set_constraint(m, el.id, rng.random() < 0.6)
            elif el.kind in self.KINDS:
                set_value(m, el.id, "x")
            # closure: a flagged element has every active descendant flagged
            for e in m.root.walk():
                if e.constraint_flag and e.active:
                    for d in e.walk():
                        if d.active and not d.is_group:
                            assert d.constraint_flag, (e.id, d.id)

    def test_default_connective_is_and(self):
        m = build_template()
        assert all(e.connective == "and" for e in m.root.walk())

    def test_guide_steps(self):
        m = build_template()
        assert guide_state(m) == {"step1Done": False, "step2Done": False, "currentStep": 1}
        vis = child_of(m.root, K.VISIBILITY)
        set_value(m, vis.id, "public")
        assert guide_state(m)["currentStep"] == 2
        set_constraint(m, vis.id, True)
        assert guide_state(m)["currentStep"] == 3

    def test_serialization_round_trip(self):
        from rulekit.modelsync import GuiRuleModel

        m = fig2_model()
        m.title = "getters"
        m.tags = ["demo"]
        d = m.to_dict()
        m2 = GuiRuleModel.from_dict(d)
        assert m2.to_dict() == d
        assert model_to_text(m2) == model_to_text(m)
