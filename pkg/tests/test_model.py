"""Relational core: values, relations, schemas, instances."""

import pytest
from hypothesis import given, strategies as st

from dbmorph import (
    BOTTOM,
    EMPTY_NAME,
    NULL,
    TRUTH,
    Instance,
    Relation,
    RelationSymbol,
    Schema,
    SchemaError,
    active_domain,
)
from dbmorph.model import BOTTOM_ROWS, project, row_key, sort_rows, value_key


def test_null_and_truth_are_singletons():
    from dbmorph.model import _Null, _Truth

    assert _Null() is NULL
    assert _Truth() is TRUTH
    assert repr(NULL) == "NULL"
    assert NULL is not TRUTH


def test_value_key_orders_null_before_ints_before_strings():
    values = ["b", 5, NULL, "a", -3, TRUTH]
    ordered = sorted(values, key=value_key)
    assert ordered == [NULL, TRUTH, -3, 5, "a", "b"]


def test_value_key_does_not_coerce_int_and_string():
    assert value_key(132) != value_key("132")


def test_sort_rows_is_deterministic():
    rows = {(2, "x"), (NULL, "a"), (2, "a"), (1, "z")}
    assert sort_rows(rows) == [(NULL, "a"), (1, "z"), (2, "a"), (2, "x")]


domain_values = st.one_of(st.integers(-5, 5), st.text("ab", max_size=2), st.just(NULL))


@given(st.lists(st.tuples(domain_values, domain_values)))
def test_sort_rows_is_stable_under_shuffling(rows):
    assert sort_rows(rows) == sort_rows(reversed(rows))
    assert sort_rows(sort_rows(rows)) == sort_rows(rows)


def test_relation_symbol_rejects_duplicate_columns():
    with pytest.raises(SchemaError):
        RelationSymbol("r", ("a", "a"))


def test_relation_symbol_rejects_empty_name():
    with pytest.raises(SchemaError):
        RelationSymbol("", ("a",))


def test_relation_checks_arity():
    sym = RelationSymbol("r", ("a", "b"))
    with pytest.raises(SchemaError):
        Relation(sym, frozenset({(1,)}))


def test_relation_rejects_bools_and_floats():
    # bool is an int subclass; it must still be rejected
    sym = RelationSymbol("r", ("a",))
    with pytest.raises(SchemaError):
        Relation(sym, frozenset({(True,)}))
    with pytest.raises(SchemaError):
        Relation(sym, frozenset({(1.5,)}))


def test_relation_accepts_null_values():
    sym = RelationSymbol("r", ("a", "b"))
    rel = Relation(sym, frozenset({(NULL, 1)}))
    assert (NULL, 1) in rel
    assert rel.values() == frozenset({NULL, 1})
    assert len(rel) == 1


def test_schema_always_contains_the_nullary_symbol():
    schema = Schema("S", [RelationSymbol("r", ("a",))])
    assert EMPTY_NAME in schema
    assert schema.symbol(EMPTY_NAME).arity == 0
    assert [s.name for s in schema.ordinary_symbols()] == ["r"]


def test_schema_rejects_declaring_the_nullary_symbol():
    with pytest.raises(SchemaError):
        Schema("S", [RelationSymbol(EMPTY_NAME, ())])


def test_schema_rejects_nullary_ordinary_symbols():
    with pytest.raises(SchemaError):
        Schema("S", [RelationSymbol("r", ())])


def test_schema_rejects_duplicate_symbols():
    with pytest.raises(SchemaError):
        Schema("S", [RelationSymbol("r", ("a",)), RelationSymbol("r", ("b",))])


def test_schema_unknown_symbol_lookup():
    schema = Schema("S", [])
    with pytest.raises(SchemaError):
        schema.symbol("nope")


def test_ordinary_symbols_are_name_sorted():
    schema = Schema("S", [RelationSymbol(n, ("a",)) for n in ("z", "m", "a")])
    assert [s.name for s in schema.ordinary_symbols()] == ["a", "m", "z"]


def test_instance_fills_missing_relations_and_bottom():
    schema = Schema("S", [RelationSymbol("r", ("a",)), RelationSymbol("s", ("a",))])
    inst = Instance.build(schema, {"r": [(1,)]})
    assert inst.rows("r") == frozenset({(1,)})
    assert inst.rows("s") == frozenset()
    assert inst.relation(EMPTY_NAME) is BOTTOM
    assert inst.rows(EMPTY_NAME) == BOTTOM_ROWS == frozenset({()})


def test_instance_rejects_foreign_symbols():
    schema = Schema("S", [RelationSymbol("r", ("a",))])
    other = RelationSymbol("r", ("b",))
    with pytest.raises(SchemaError):
        Instance(schema, {"r": Relation(other, frozenset())})
    with pytest.raises(SchemaError):
        Instance.build(schema, {"s": [(1,)]})


def test_active_domain_ignores_bottom():
    schema = Schema("S", [RelationSymbol("r", ("a", "b"))])
    inst = Instance.build(schema, {"r": [(1, "x"), (2, NULL)]})
    assert active_domain(inst) == frozenset({1, 2, "x", NULL})


def test_project_selects_and_reorders_positions():
    sym = RelationSymbol("r", ("a", "b", "c"))
    rel = Relation(sym, frozenset({(1, 2, 3), (4, 5, 6)}))
    out = project(rel, (3, 1))
    assert out.rows == frozenset({(3, 1), (6, 4)})
    assert out.symbol.columns == ("c", "a")


def test_project_renames_on_repeated_positions():
    sym = RelationSymbol("r", ("a", "b"))
    rel = Relation(sym, frozenset({(1, 2)}))
    out = project(rel, (1, 1))
    assert out.rows == frozenset({(1, 1)})
    assert out.symbol.columns == ("c1", "c2")


def test_project_rejects_out_of_range_positions():
    sym = RelationSymbol("r", ("a",))
    rel = Relation(sym, frozenset({(1,)}))
    with pytest.raises(SchemaError):
        project(rel, (2,))
    with pytest.raises(SchemaError):
        project(rel, (0,))


@given(
    st.sets(st.tuples(domain_values, domain_values, domain_values), max_size=6),
    st.lists(st.integers(1, 3), min_size=1, max_size=4),
)
def test_project_row_count_never_grows(rows, positions):
    sym = RelationSymbol("r", ("a", "b", "c"))
    rel = Relation(sym, frozenset(rows))
    out = project(rel, positions)
    assert len(out) <= len(rel)
    assert out.rows == frozenset(tuple(r[p - 1] for p in positions) for r in rows)
