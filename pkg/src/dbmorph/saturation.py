"""Saturation of a satisfying interpretation.

Wherever the target relation contains alternative rows that agree with a
component's output on every simple-variable head position, the skolem
terms at the remaining positions could just as well have produced those
rows.  Saturation materializes one extra function per (triggering
arguments, alternative row) pair; each extra agrees with the base
component everywhere else.  Operations whose heads contain no skolem
symbol contribute nothing: built-ins and constants cannot be reassigned.

The extras never change the information flux (they agree with the base on
all simple-variable positions), so the saturated morphism equals the base
one in the database category.  Grouping components that share a domain and
codomain and taking the union of their graphs yields the set-valued
p-function of the mapping.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import PreconditionError, SchemaError
from .flux import FluxKernel, flux_kernel, flux_positions
from .interp import (
    ComponentFunction,
    InstanceMorphism,
    TarskiInterpretation,
    alpha_star,
    component_assignment,
    eval_term,
    satisfies,
)
from .logic import App, FuncKind, term_functions
from .model import Instance, Relation, Row, sort_rows
from .operads import OperadArrow, OperadOperation, simple_var_positions

__all__ = [
    "ExtraFunction",
    "SkippedCandidate",
    "SaturatedMorphism",
    "extension_relation",
    "agreement_selection",
    "saturate",
    "PFunction",
    "derive_pfunction",
    "FluxInvarianceReport",
    "check_flux_invariance",
]


def _head_skolems(op: OperadOperation) -> frozenset:
    return frozenset(
        f.name
        for t in op.target_terms
        for f in term_functions(t)
        if f.kind is FuncKind.SKOLEM
    )


def _selection_rows(
    it: TarskiInterpretation, op: OperadOperation, g: dict
) -> frozenset:
    """Target rows agreeing with the assignment at every simple-variable
    head position.  Agreement is tuple identity, as in the join guard."""
    fixed = {j: g[op.target_terms[j - 1].name] for j in simple_var_positions(op)}
    return frozenset(
        row
        for row in it.target.rows(op.target)
        if all(row[j - 1] == v for j, v in fixed.items())
    )


def agreement_selection(it: TarskiInterpretation, op: OperadOperation, g: dict) -> Relation:
    """The full positional-match selection, base output included."""
    sym = it.target.schema.symbol(op.target)
    return Relation(sym, _selection_rows(it, op, g))


def extension_relation(
    it: TarskiInterpretation, op: OperadOperation, g: dict
) -> Relation:
    """Alternative rows for one non-failing application: the positional-match
    selection minus the output the base component actually produced."""
    sym = it.target.schema.symbol(op.target)
    produced = tuple(eval_term(g, t, it) for t in op.target_terms)
    return Relation(sym, _selection_rows(it, op, g) - {produced})


@dataclass(frozen=True)
class ExtraFunction:
    """A single-point deviation from a base component: ``output`` at
    ``trigger``, the base graph everywhere else.  ``perturbation`` records
    the implied skolem reassignments ((symbol, args) -> value)."""

    component: ComponentFunction = field(compare=False)
    op_index: int
    op_name: str
    trigger: tuple
    output: Row
    perturbation: tuple

    def apply(self, args: tuple) -> Row:
        if args == self.trigger:
            return self.output
        return self.component.apply(args)

    def image(self) -> frozenset:
        rows = set()
        for args, out in self.component.graph().items():
            if args == self.trigger:
                rows.add(self.output)
            elif out != ():
                rows.add(out)
        return frozenset(rows)


@dataclass(frozen=True)
class SkippedCandidate:
    op_index: int
    op_name: str
    trigger: tuple
    candidate: Row
    reason: str


def _candidate_extra(
    it: TarskiInterpretation,
    component: ComponentFunction,
    op_index: int,
    g: dict,
    trigger: tuple,
    produced: Row,
    candidate: Row,
) -> "ExtraFunction | SkippedCandidate":
    """Build the extra for one alternative row, or explain why none exists:
    a disagreement at a non-skolem head position, or two occurrences of one
    skolem application demanding different values."""
    op = component.op
    demands: dict = {}
    for j, term in enumerate(op.target_terms, 1):
        want = candidate[j - 1]
        if isinstance(term, App) and term.func.kind is FuncKind.SKOLEM:
            key = (term.func.name, tuple(eval_term(g, a, it) for a in term.args))
            if key in demands and demands[key] != want:
                return SkippedCandidate(
                    op_index,
                    op.name,
                    trigger,
                    candidate,
                    f"skolem {term.func.name} would need two values at one point",
                )
            demands[key] = want
        elif want != produced[j - 1]:
            return SkippedCandidate(
                op_index,
                op.name,
                trigger,
                candidate,
                f"head position {j} is not a skolem term and cannot be reassigned",
            )
    perturbation = tuple(sorted(demands.items()))
    return ExtraFunction(
        component=component,
        op_index=op_index,
        op_name=op.name,
        trigger=trigger,
        output=candidate,
        perturbation=perturbation,
    )


@dataclass(frozen=True)
class SaturatedMorphism:
    base: InstanceMorphism
    extras: tuple
    skipped: tuple

    @property
    def arrow(self) -> OperadArrow:
        return self.base.arrow

    @property
    def source(self) -> Instance:
        return self.base.source

    @property
    def target(self) -> Instance:
        return self.base.target

    def op_images(self):
        """Base images first, then each extra's deviated image; flux sees
        the saturated morphism through these."""
        yield from self.base.op_images()
        for extra in self.extras:
            yield extra.component.op, extra.image()

    def family(self, op_name: str) -> tuple:
        """The base component of an operation together with its extras."""
        base = self.base.component(op_name)
        return (base,) + tuple(e for e in self.extras if e.op_name == op_name)


def saturate(it: TarskiInterpretation, arrow: OperadArrow) -> SaturatedMorphism:
    """Enumerate (operation, arguments, alternative row) deterministically.

    Requires a satisfying interpretation.  Operations with skolem-free
    heads are skipped outright; arguments with failing guards contribute
    nothing; every alternative row yields one extra or one skip report.
    """
    report = satisfies(it, arrow)
    if not report.satisfied:
        offender = report.violations[0]
        raise PreconditionError(
            "interpretation does not satisfy the mapping: "
            f"{offender[0]} produces {offender[1]!r} outside its target relation"
        )
    base = alpha_star(it, arrow)
    extras: list = []
    skipped: list = []
    for op_index, component in enumerate(base.components, 1):
        op = component.op
        if not _head_skolems(op):
            continue
        graph = component.graph()
        for trigger in component.domain_product():
            produced = graph[trigger]
            if produced == ():
                continue
            g = component_assignment(op, trigger)
            rows = _selection_rows(it, op, g) - {produced}
            for candidate in sort_rows(rows):
                built = _candidate_extra(
                    it, component, op_index, g, trigger, produced, candidate
                )
                if isinstance(built, ExtraFunction):
                    extras.append(built)
                else:
                    skipped.append(built)
    return SaturatedMorphism(base, tuple(extras), tuple(skipped))


@dataclass(frozen=True)
class PFunction:
    """Set-valued function from one shared domain: args -> every row that
    some family member produces there."""

    name: str
    domain: tuple
    codomain: str
    graph: tuple  # ((args, frozenset of rows), ...) sorted

    def apply(self, args: tuple) -> frozenset:
        for a, rows in self.graph:
            if a == args:
                return rows
        raise SchemaError(f"{self.name} is not defined at {args!r}")

    def sorted_graph(self):
        return self.graph


def _domain_descriptor(op: OperadOperation) -> tuple:
    return tuple((p.symbol, p.negated, p.char) for p in op.places)


def derive_pfunction(sat: SaturatedMorphism, op_index: int) -> PFunction:
    """Union of the graphs of every component (bases and extras alike) that
    shares the chosen operation's domain and codomain."""
    ops = sat.arrow.operations
    if not 1 <= op_index <= len(ops):
        raise SchemaError(f"operation index {op_index} out of range 1..{len(ops)}")
    chosen = ops[op_index - 1]
    key = (_domain_descriptor(chosen), chosen.target)

    members: list = []
    for component in sat.base.components:
        if (_domain_descriptor(component.op), component.op.target) == key:
            members.append(component)
    for extra in sat.extras:
        op = extra.component.op
        if (_domain_descriptor(op), op.target) == key:
            members.append(extra)

    anchor = sat.base.component(chosen.name)
    graph = []
    for args in anchor.domain_product():
        outputs = frozenset(
            out for m in members if (out := m.apply(args)) != ()
        )
        graph.append((args, outputs))
    return PFunction(
        name=f"f_{chosen.name}",
        domain=_domain_descriptor(chosen),
        codomain=chosen.target,
        graph=tuple(graph),
    )


@dataclass(frozen=True)
class FluxInvarianceReport:
    ok: bool
    failures: tuple


def check_flux_invariance(it: TarskiInterpretation, arrow: OperadArrow) -> FluxInvarianceReport:
    """Saturation must not move the flux: every extra agrees with its base
    on the simple-variable positions pointwise, and swapping any single
    extra for its base component leaves the kernel set-identical."""
    sat = saturate(it, arrow)
    failures: list = []

    for extra in sat.extras:
        component = extra.component
        pos = sorted(simple_var_positions(component.op))
        for args, out in component.graph().items():
            alt = extra.apply(args)
            if out == () or alt == ():
                continue
            if tuple(out[j - 1] for j in pos) != tuple(alt[j - 1] for j in pos):
                failures.append(
                    ("pointwise", extra.op_name, extra.trigger, extra.output, args)
                )

    base_kernel = flux_kernel(sat.base)
    for extra in sat.extras:
        members = []
        for component in sat.base.components:
            pos = flux_positions(component.op)
            if not pos:
                continue
            image = (
                extra.image()
                if component is extra.component
                else component.image()
            )
            members.append(
                frozenset(tuple(row[j - 1] for j in pos) for row in image)
            )
        if FluxKernel(members).members != base_kernel.members:
            failures.append(("kernel", extra.op_name, extra.trigger, extra.output))

    return FluxInvarianceReport(not failures, tuple(failures))
