"""Evaluation of compiled operations over fixed instances."""

import pytest

from dbmorph import (
    App,
    Comparison,
    ComponentFunction,
    Const,
    FuncKind,
    FuncSymbol,
    FunctionTable,
    IncompleteInterpretationError,
    Instance,
    NULL,
    NormalizedImplication,
    Place,
    RelAtom,
    RelationSymbol,
    Schema,
    SchemaError,
    TarskiInterpretation,
    TRUTH,
    Var,
    alpha_star,
    apply_component,
    apply_v,
    component_image,
    eval_term,
    make_operads,
    satisfies,
)
from dbmorph.interp import component_assignment, eval_guard, place_domain
from dbmorph.irdb import hash_tuple
from dbmorph.logic import NotNull, hash_symbol
from dbmorph.model import EMPTY_NAME
from dbmorph.operads import IDENTITY_OP

from conftest import arrow_and_interp


# ---------------------------------------------------------------------------
# skolem tables


def test_function_table_lookup_and_default():
    t = FunctionTable("f1", {("e1",): "o1"}, default="o9")
    assert t.lookup(("e1",)) == "o1"
    assert t.lookup(("e2",)) == "o9"


def test_function_table_without_default_is_partial():
    t = FunctionTable("f1", {("e1",): "o1"})
    with pytest.raises(IncompleteInterpretationError):
        t.lookup(("e2",))


def test_interpretation_requires_a_table_per_symbol(example1):
    arrow, it = arrow_and_interp(example1, "example1", "m_bc", "interp_bc.json")
    assert it.skolem_value("f1", ("e1",)) == "o1"
    with pytest.raises(IncompleteInterpretationError):
        it.skolem_value("f9", ("e1",))


# ---------------------------------------------------------------------------
# term and guard evaluation


def plain_interp(example1):
    arrow, it = arrow_and_interp(example1, "example1", "m_bc", "interp_bc.json")
    return arrow, it


def test_eval_term_variables_constants_and_hash(example1):
    _, it = plain_interp(example1)
    g = {"x": "e1"}
    assert eval_term(g, Var("x"), it) == "e1"
    assert eval_term(g, Const(5), it) == 5
    assert eval_term(g, Const(TRUTH), it) == 1
    h = App(hash_symbol(), (Var("x"),))
    assert eval_term(g, h, it) == hash_tuple(("e1",))


def test_eval_term_unbound_variable(example1):
    _, it = plain_interp(example1)
    with pytest.raises(SchemaError):
        eval_term({}, Var("x"), it)


def test_eval_term_skolem_goes_through_the_table(example1):
    _, it = plain_interp(example1)
    f1 = FuncSymbol("f1", FuncKind.SKOLEM)
    assert eval_term({"x": "e3"}, App(f1, (Var("x"),)), it) == "o2"


def test_eval_guard_rejects_relational_atoms(example1):
    _, it = plain_interp(example1)
    with pytest.raises(SchemaError):
        eval_guard({}, RelAtom("Emp", (Const("e1"),)), it)


def test_eval_guard_notnull_and_negation(example1):
    _, it = plain_interp(example1)
    assert eval_guard({"x": 1}, NotNull(Var("x")), it)
    assert not eval_guard({"x": NULL}, NotNull(Var("x")), it)
    assert eval_guard({"x": NULL}, NotNull(Var("x"), negated=True), it)


# ---------------------------------------------------------------------------
# component assignment and application


def test_join_guard_requires_equal_values(example1):
    arrow, it = plain_interp(example1)
    q1 = arrow.operation("q_1")
    assert apply_component(it, q1, (("e1",), ("e1",))) == ("e1", "o1")
    assert apply_component(it, q1, (("e1",), ("e3",))) == ()


def test_component_assignment_compacts_shared_variables(example1):
    arrow, _ = plain_interp(example1)
    q1 = arrow.operation("q_1")
    assert component_assignment(q1, (("e1",), ("e1",))) == {"x": "e1"}
    assert component_assignment(q1, (("e1",), ("e2",))) is None


def test_component_assignment_checks_arities(example1):
    arrow, _ = plain_interp(example1)
    q1 = arrow.operation("q_1")
    with pytest.raises(SchemaError):
        component_assignment(q1, (("e1",),))
    with pytest.raises(SchemaError):
        component_assignment(q1, (("e1", "x"), ("e1",)))


def test_null_joins_null_but_fails_comparisons():
    a = Schema("A", [RelationSymbol("r", ("c1",)), RelationSymbol("r2", ("c1",))])
    b = Schema("B", [RelationSymbol("s", ("c1",))])
    impl = NormalizedImplication(
        ("x",),
        (RelAtom("r", (Var("x"),)), RelAtom("r2", (Var("x"),))),
        RelAtom("s", (Var("x"),)),
    )
    (op,) = make_operads([impl], a, b).operations
    it = TarskiInterpretation(
        Instance.build(a, {"r": [(NULL,)], "r2": [(NULL,)]}),
        Instance.build(b, {}),
        {},
    )
    # two NULL place values are syntactically one value, so the join passes
    assert apply_component(it, op, ((NULL,), (NULL,))) == (NULL,)
    guarded = NormalizedImplication(
        ("x",),
        (RelAtom("r", (Var("x"),)), RelAtom("r2", (Var("x"),)), Comparison(Var("x"), "=", Var("x"))),
        RelAtom("s", (Var("x"),)),
    )
    (gop,) = make_operads([guarded], a, b).operations
    assert apply_component(it, gop, ((NULL,), (NULL,))) == ()


def test_failed_guard_yields_the_empty_tuple():
    a = Schema("A", [RelationSymbol("r", ("c1",))])
    b = Schema("B", [RelationSymbol("s", ("c1",))])
    impl = NormalizedImplication(
        ("x",),
        (RelAtom("r", (Var("x"),)), Comparison(Var("x"), "<", Const(10))),
        RelAtom("s", (Var("x"),)),
    )
    (op,) = make_operads([impl], a, b).operations
    it = TarskiInterpretation(
        Instance.build(a, {"r": [(5,), (15,)]}), Instance.build(b, {}), {}
    )
    assert apply_component(it, op, ((5,),)) == (5,)
    assert apply_component(it, op, ((15,),)) == ()


# ---------------------------------------------------------------------------
# place domains


def test_place_domain_of_a_positive_place(example1):
    _, it = plain_interp(example1)
    assert place_domain(it, Place("Emp", ("x",))) == frozenset(
        {("e1",), ("e2",), ("e3",)}
    )


def test_negated_place_complements_over_the_active_domain(example1):
    _, it = plain_interp(example1)
    dom = it.domain_values()
    out = place_domain(it, Place("Local1", ("x",), negated=True))
    assert out == frozenset({(v,) for v in dom} - {("e1",), ("e3",)})


def test_explicit_domain_overrides_the_active_one(example1):
    arrow, it = plain_interp(example1)
    narrowed = TarskiInterpretation(
        it.source, it.target, it.skolem, domain=frozenset({"e1", "e2"})
    )
    out = place_domain(narrowed, Place("Local1", ("x",), negated=True))
    assert out == frozenset({("e2",)})


def test_char_places_resolve_target_then_extras_then_source(example1):
    arrow, it = arrow_and_interp(example1, "example1", "m_ac", "interp_ac.json")
    q3 = arrow.operation("q_3")
    over65 = q3.places[1]
    assert over65.char
    assert it.place_relation(over65).rows == frozenset({("e2",), ("e3",)})
    without_extras = TarskiInterpretation(it.source, it.target, it.skolem)
    with pytest.raises(SchemaError):
        without_extras.place_relation(over65)


# ---------------------------------------------------------------------------
# component functions


def test_component_graph_is_total(example1):
    arrow, it = plain_interp(example1)
    comp = ComponentFunction(it, arrow.operation("q_1"))
    sizes = [len(d) for d in comp.domains]
    assert sizes == [3, 2]
    assert len(comp.graph()) == 6
    assert comp.apply((("e3",), ("e3",))) == ("e3", "o2")
    with pytest.raises(SchemaError):
        comp.apply((("e9",), ("e9",)))


def test_component_image_drops_the_failure_sentinel(example1):
    arrow, it = plain_interp(example1)
    comp = ComponentFunction(it, arrow.operation("q_1"))
    assert comp.image() == frozenset({("e1", "o1"), ("e3", "o2")})


def test_component_image_relation_uses_the_factorization_name(example1):
    arrow, it = plain_interp(example1)
    rel = component_image(it, arrow.operation("q_1"))
    assert rel.symbol.name == "r_q1"
    assert rel.symbol.columns == ("employee", "office")
    assert rel.rows == frozenset({("e1", "o1"), ("e3", "o2")})


def test_identity_component_image_is_the_unit(example1):
    _, it = plain_interp(example1)
    comp = ComponentFunction(it, IDENTITY_OP)
    assert comp.image() == frozenset({()})


def test_apply_v_copies_target_rows(example1):
    arrow, it = plain_interp(example1)
    q1 = arrow.operation("q_1")
    assert apply_v(it, q1, ("e1", "o1")) == ("e1", "o1")
    assert apply_v(it, q1, ("e1", "o9")) == ()


# ---------------------------------------------------------------------------
# morphisms and satisfaction


def test_alpha_star_builds_all_components(example1):
    arrow, it = plain_interp(example1)
    morphism = alpha_star(it, arrow)
    assert len(morphism.components) == 2
    assert morphism.component("q_2").op.target == "CanRetire"
    assert morphism.component(arrow.identity.name) is morphism.q_bot
    assert morphism.source is it.source and morphism.target is it.target
    with pytest.raises(SchemaError):
        morphism.component("q_9")


def test_alpha_star_checks_schema_names(example1):
    arrow, it = plain_interp(example1)
    swapped = TarskiInterpretation(it.target, it.source, it.skolem)
    with pytest.raises(SchemaError):
        alpha_star(swapped, arrow)


def test_satisfaction_of_all_three_example_mappings(example1):
    for mapping, interp in (
        ("m_ab", "interp_ab.json"),
        ("m_bc", "interp_bc.json"),
        ("m_ac", "interp_ac.json"),
    ):
        arrow, it = arrow_and_interp(example1, "example1", mapping, interp)
        report = satisfies(it, arrow)
        assert report.satisfied, (mapping, report.violations)
        assert report.violations == ()


def test_violations_name_the_operation_and_row(example4):
    arrow, it = arrow_and_interp(example4, "example4", "m_ab", "interp_bad.json")
    report = satisfies(it, arrow)
    assert not report.satisfied
    assert report.violations == (("q_1", (132, "opera")),)


def test_op_images_iterates_ordinary_components(example1):
    arrow, it = plain_interp(example1)
    morphism = alpha_star(it, arrow)
    images = {op.name: img for op, img in morphism.op_images()}
    assert images["q_1"] == frozenset({("e1", "o1"), ("e3", "o2")})
    assert images["q_2"] == frozenset({("e2",), ("e3",)})
