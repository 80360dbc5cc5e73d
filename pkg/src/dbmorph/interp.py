"""Interpretation of compiled arrows over concrete instances.

An interpretation fixes a source and a target instance, finite tables for
the skolem function symbols, and nothing else: the hash built-in and the
characteristic functions are derived.  Each operad operation then denotes a
total component function R_1 × … × R_k → rows ∪ {()}: the i-th factor is
the relation named by the i-th place symbol (complemented over the active
domain when the place is negated), and an argument tuple maps to the
evaluated head tuple when the equal-variable join guard and every built-in
guard hold, to the empty tuple otherwise.

The interpretation satisfies the arrow exactly when every component's image
is contained in the target relation it points at.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import IncompleteInterpretationError, SchemaError
from .irdb import hash_tuple
from .logic import (
    App,
    Comparison,
    Const,
    FuncKind,
    Literal,
    NotNull,
    RelAtom,
    Term,
    Var,
    eval_comparison,
)
from .model import (
    EMPTY_NAME,
    NULL,
    TRUTH,
    DomainValue,
    Instance,
    Relation,
    RelationSymbol,
    Row,
    active_domain,
    row_key,
    sort_rows,
)
from .operads import (
    OperadArrow,
    OperadOperation,
    Place,
    build_equal_var_set,
    cmp,
    simple_var_positions,
)

__all__ = [
    "FunctionTable",
    "TarskiInterpretation",
    "eval_term",
    "eval_guard",
    "component_assignment",
    "apply_component",
    "place_domain",
    "ComponentFunction",
    "component_image",
    "apply_v",
    "InstanceMorphism",
    "alpha_star",
    "SatisfactionReport",
    "satisfies",
]


@dataclass
class FunctionTable:
    """Finite graph of one skolem symbol; ``default`` of None means missing
    arguments are an error."""

    name: str
    entries: dict
    default: "DomainValue | None" = None

    def __post_init__(self) -> None:
        self.entries = {tuple(k): v for k, v in self.entries.items()}

    def lookup(self, args: Row) -> DomainValue:
        if args in self.entries:
            return self.entries[args]
        if self.default is not None:
            return self.default
        raise IncompleteInterpretationError(
            f"function {self.name} has no entry for {args!r} and no default"
        )


@dataclass
class TarskiInterpretation:
    source: Instance
    target: Instance
    skolem: dict
    extras: tuple = ()
    domain: "frozenset | None" = None

    def __post_init__(self) -> None:
        self.skolem = dict(self.skolem)
        self.extras = tuple(self.extras)

    def skolem_value(self, name: str, args: Row) -> DomainValue:
        table = self.skolem.get(name)
        if table is None:
            raise IncompleteInterpretationError(f"no table for skolem symbol {name}")
        return table.lookup(args)

    def char_relation(self, name: str) -> Relation:
        for inst in (self.target, *self.extras, self.source):
            if name in inst.schema and name != EMPTY_NAME:
                return inst.relation(name)
        raise SchemaError(f"characteristic function references unknown relation {name}")

    def place_relation(self, place: Place) -> Relation:
        if place.char:
            return self.char_relation(place.symbol)
        return self.source.relation(place.symbol)

    def domain_values(self) -> frozenset:
        if self.domain is not None:
            return self.domain
        values = set(active_domain(self.source)) | set(active_domain(self.target))
        for inst in self.extras:
            values |= active_domain(inst)
        return frozenset(values)


def eval_term(g: dict, term: Term, it: TarskiInterpretation) -> DomainValue:
    if isinstance(term, Var):
        try:
            return g[term.name]
        except KeyError:
            raise SchemaError(f"variable {term.name} has no value under the assignment") from None
    if isinstance(term, Const):
        return 1 if term.value is TRUTH else term.value
    args = tuple(eval_term(g, a, it) for a in term.args)
    if term.func.kind is FuncKind.SKOLEM:
        return it.skolem_value(term.func.name, args)
    if term.func.kind is FuncKind.HASH:
        return hash_tuple(args)
    return 1 if args in it.char_relation(term.func.relation).rows else 0


def eval_guard(g: dict, lit: Literal, it: TarskiInterpretation) -> bool:
    if isinstance(lit, Comparison):
        holds = eval_comparison(
            lit.op, eval_term(g, lit.left, it), eval_term(g, lit.right, it)
        )
    elif isinstance(lit, NotNull):
        holds = eval_term(g, lit.term, it) is not NULL
    else:
        raise SchemaError("relational atoms are place symbols, not guards")
    return holds != lit.negated


def component_assignment(op: OperadOperation, args: tuple) -> "dict | None":
    """The compacted assignment for an argument tuple, or None when the
    equal-variable join guard fails."""
    if len(args) != len(op.places):
        raise SchemaError(
            f"operation {op.name} takes {len(op.places)} tuples, got {len(args)}"
        )
    for place, tup in zip(op.places, args):
        if len(tup) != place.arity:
            raise SchemaError(
                f"operation {op.name}: tuple {tup!r} does not fit atom "
                f"{place.symbol}/{place.arity}"
            )
    equal_sets = build_equal_var_set(op)
    for group in equal_sets:
        vals = {args[j - 1][i - 1] for (i, j) in group}
        if len(vals) > 1:
            return None
    return dict(zip(op.variable_order, cmp(equal_sets, args)))


def apply_component(it: TarskiInterpretation, op: OperadOperation, args: tuple) -> Row:
    """Evaluate one argument tuple: join guard, then built-in guards, then
    the head terms.  Returns the empty tuple when any guard fails."""
    g = component_assignment(op, args)
    if g is None:
        return ()
    for lit in op.guards:
        if not eval_guard(g, lit, it):
            return ()
    return tuple(eval_term(g, t, it) for t in op.target_terms)


def place_domain(it: TarskiInterpretation, place: Place) -> frozenset:
    """α(r) for a positive place; the active-domain complement for a negated
    one."""
    rel = it.place_relation(place)
    if not place.negated:
        return rel.rows
    values = sorted(it.domain_values(), key=lambda v: (str(type(v)), str(v)))
    universe = itertools.product(values, repeat=place.arity)
    return frozenset(t for t in universe if t not in rel.rows)


class ComponentFunction:
    """The total map an operation denotes under a fixed interpretation."""

    def __init__(self, it: TarskiInterpretation, op: OperadOperation):
        self.it = it
        self.op = op
        if op.target == EMPTY_NAME:
            self.codomain = it.target.relation(EMPTY_NAME)
        else:
            self.codomain = it.target.relation(op.target)
        self._domains: "tuple | None" = None
        self._graph: "dict | None" = None

    @property
    def domains(self) -> tuple:
        if self._domains is None:
            self._domains = tuple(
                tuple(sort_rows(place_domain(self.it, p))) for p in self.op.places
            )
        return self._domains

    def domain_product(self):
        return itertools.product(*self.domains)

    def graph(self) -> dict:
        if self._graph is None:
            self._graph = {
                args: apply_component(self.it, self.op, args)
                for args in self.domain_product()
            }
        return self._graph

    def apply(self, args: tuple) -> Row:
        graph = self.graph()
        try:
            return graph[args]
        except KeyError:
            raise SchemaError(
                f"arguments {args!r} lie outside the domain of {self.op.name}"
            ) from None

    def image(self) -> frozenset:
        # the identity targets r_∅, whose only row IS the empty tuple; for
        # every other operation () is the failure sentinel
        if self.op.target == EMPTY_NAME:
            return frozenset(self.graph().values())
        return frozenset(out for out in self.graph().values() if out != ())


def component_image(it: TarskiInterpretation, op: OperadOperation) -> Relation:
    """The image relation, bound to the operation's fresh factorization
    symbol (same columns as the target)."""
    sym = RelationSymbol(op.rq_name, op.target_columns)
    return Relation(sym, ComponentFunction(it, op).image())


def apply_v(it: TarskiInterpretation, op: OperadOperation, b: Row) -> Row:
    """The copy operation r_q → r_B: identity on rows of α(r_B), empty tuple
    otherwise."""
    rel = it.target.relation(op.target) if op.target != EMPTY_NAME else it.target.relation(EMPTY_NAME)
    return b if b in rel.rows else ()


@dataclass
class InstanceMorphism:
    """All component functions of an arrow under one interpretation."""

    arrow: OperadArrow
    it: TarskiInterpretation
    components: tuple
    q_bot: ComponentFunction

    @property
    def source(self) -> Instance:
        return self.it.source

    @property
    def target(self) -> Instance:
        return self.it.target

    def component(self, name: str) -> ComponentFunction:
        if name == self.arrow.identity.name:
            return self.q_bot
        for c in self.components:
            if c.op.name == name:
                return c
        raise SchemaError(f"morphism has no component {name}")

    def op_images(self):
        for c in self.components:
            yield c.op, c.image()


def alpha_star(it: TarskiInterpretation, arrow: OperadArrow) -> InstanceMorphism:
    """Interpret every operation; the identity becomes q_⊥ : ⊥ → ⊥."""
    if it.source.schema.name != arrow.source_schema.name:
        raise SchemaError(
            f"source instance is over {it.source.schema.name}, arrow expects "
            f"{arrow.source_schema.name}"
        )
    if it.target.schema.name != arrow.target_schema.name:
        raise SchemaError(
            f"target instance is over {it.target.schema.name}, arrow expects "
            f"{arrow.target_schema.name}"
        )
    components = tuple(ComponentFunction(it, op) for op in arrow.operations)
    return InstanceMorphism(arrow, it, components, ComponentFunction(it, arrow.identity))


@dataclass(frozen=True)
class SatisfactionReport:
    satisfied: bool
    violations: tuple  # (operation name, offending output row)


def satisfies(it: TarskiInterpretation, arrow: OperadArrow) -> SatisfactionReport:
    """The interpretation satisfies the arrow iff every component image is
    contained in its target relation."""
    bad = []
    for op in arrow.operations:
        component = ComponentFunction(it, op)
        target_rows = component.codomain.rows
        for out in sort_rows(component.image()):
            if out not in target_rows:
                bad.append((op.name, out))
    return SatisfactionReport(not bad, tuple(bad))
