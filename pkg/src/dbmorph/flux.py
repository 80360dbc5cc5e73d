"""Information flux of an interpreted arrow.

The flux of a morphism is the closure, under finitary select-project-join-
rename-union views, of a finite kernel: one relation per operation, namely
the projection of the component's image onto the head positions holding a
bare variable that also occurs in a source-schema atom, plus the nullary
one-row relation ⊥.  Two morphisms between the same instances are equal
exactly when their fluxes coincide.

The closure is infinite in general (joins grow arity without bound), so
membership and equality are semi-decided by bounded enumeration: ``yes``
comes with a witnessing view expression, ``unequal`` only from the
active-domain refutation (views cannot invent values), and everything else
is ``unknown-within-bounds``.

Kernel members are anonymous row-sets; column names play no role here.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import PreconditionError
from .logic import Var, eval_comparison
from .model import NULL, TRUTH, Row, row_key, value_key
from .operads import OperadOperation

__all__ = [
    "BOTTOM_MEMBER",
    "FluxKernel",
    "ClosureBounds",
    "DEFAULT_BOUNDS",
    "flux_positions",
    "mapping_vars",
    "flux_kernel",
    "ClosureResult",
    "closure_set",
    "ClosureVerdict",
    "in_closure",
    "EQUAL",
    "UNEQUAL",
    "UNKNOWN",
    "FluxComparison",
    "flux_equal",
    "morphism_equal",
    "ComposedVerdict",
    "in_composed_flux",
]

BOTTOM_MEMBER = frozenset({()})

EQUAL = "equal"
UNEQUAL = "unequal"
UNKNOWN = "unknown-within-bounds"


def _member_key(member: frozenset) -> tuple:
    rows = sorted(row_key(r) for r in member)
    return (0 if member == BOTTOM_MEMBER else 1, len(rows and rows[0]), rows)


@dataclass(frozen=True)
class FluxKernel:
    """Finite generator set of a flux; ⊥ is always a member, so the empty
    flux is ⊥⁰ = {⊥} rather than the empty set."""

    members: frozenset

    def __init__(self, members=()):
        norm = frozenset(
            frozenset(tuple(row) for row in member) for member in members
        )
        object.__setattr__(self, "members", norm | {BOTTOM_MEMBER})

    def sorted_members(self) -> list:
        return sorted(self.members, key=_member_key)

    def values(self) -> frozenset:
        return frozenset(v for m in self.members for row in m for v in row)

    def __contains__(self, member: object) -> bool:
        return member in self.members

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class ClosureBounds:
    """max_depth None means: iterate to an actual fixpoint (or the cap)."""

    max_depth: "int | None" = 3
    max_arity: int = 6
    max_relations: int = 100_000

    def __post_init__(self) -> None:
        if self.max_depth is not None and self.max_depth < 0:
            raise ValueError("max_depth must be None or >= 0")
        if self.max_arity < 1:
            raise ValueError("max_arity must be positive")
        if self.max_relations < 1:
            raise ValueError("max_relations must be positive")


DEFAULT_BOUNDS = ClosureBounds()


def _source_variables(op: OperadOperation) -> frozenset:
    names: set = set()
    for place in op.places:
        if not place.char:
            names.update(place.variables)
    return frozenset(names)


def flux_positions(op: OperadOperation) -> tuple:
    """1-based head positions holding a bare variable that occurs in a
    source-schema atom of the body."""
    source_vars = _source_variables(op)
    return tuple(
        j
        for j, term in enumerate(op.target_terms, 1)
        if isinstance(term, Var) and term.name in source_vars
    )


def mapping_vars(arrow) -> frozenset:
    """Head variables that carry source information, over all operations."""
    names: set = set()
    for op in arrow.operations:
        pos = flux_positions(op)
        names.update(op.target_terms[j - 1].name for j in pos)
    return frozenset(names)


def flux_kernel(morphism) -> FluxKernel:
    """One member per operation with source-carrying head variables: the
    projection of its image onto those positions.  ⊥ is adjoined; with no
    contributing operation the kernel is exactly ⊥⁰."""
    members = []
    for op, image in morphism.op_images():
        pos = flux_positions(op)
        if not pos:
            continue
        members.append(frozenset(tuple(row[j - 1] for j in pos) for row in image))
    return FluxKernel(members)


def _show(value) -> str:
    if value is NULL:
        return "null"
    if value is TRUTH:
        return "1"
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    return str(value)


@dataclass(frozen=True)
class ClosureResult:
    """Everything the bounded enumeration produced: row-set -> witnessing
    view expression over the generator names."""

    members: dict
    capped: bool
    fixpoint: bool


def closure_set(
    kernel: FluxKernel,
    bounds: ClosureBounds = DEFAULT_BOUNDS,
    targets: "frozenset | None" = None,
) -> ClosureResult:
    """Breadth-first enumeration of view results over the kernel.

    Views: selection by column = active-domain constant, selection by
    column = column, projection onto any injective position sequence
    (renaming included as permutation), cross product, and same-arity
    union.  Selections compare with the same semantics as mapping guards,
    so NULL matches nothing.  Stops early once every target is found.
    """
    members: dict = {}
    counter = 0
    for member in kernel.sorted_members():
        if member == BOTTOM_MEMBER:
            members[member] = "bottom"
        else:
            counter += 1
            members.setdefault(member, f"g{counter}")
    constants = sorted(kernel.values(), key=value_key)

    remaining = set(targets or ()) - set(members)
    if targets is not None and not remaining:
        return ClosureResult(members, False, False)

    capped = False
    frontier = dict(members)
    depth = 0
    while frontier:
        if bounds.max_depth is not None and depth >= bounds.max_depth:
            return ClosureResult(members, capped, False)
        new: dict = {}

        def arity(member: frozenset) -> int:
            return len(next(iter(member)))

        def add(rows: frozenset, expr: str) -> bool:
            nonlocal capped
            if rows in members or rows in new:
                return False
            if len(members) + len(new) >= bounds.max_relations:
                capped = True
                return False
            new[rows] = expr
            remaining.discard(rows)
            return targets is not None and not remaining

        for member, expr in frontier.items():
            if not member:
                continue
            n = arity(member)
            for col in range(1, n + 1):
                for const in constants:
                    rows = frozenset(
                        r for r in member if eval_comparison("=", r[col - 1], const)
                    )
                    if add(rows, f"select[{col}={_show(const)}]({expr})"):
                        return ClosureResult({**members, **new}, capped, False)
                for col2 in range(col + 1, n + 1):
                    rows = frozenset(
                        r for r in member if eval_comparison("=", r[col - 1], r[col2 - 1])
                    )
                    if add(rows, f"select[{col}={col2}]({expr})"):
                        return ClosureResult({**members, **new}, capped, False)
            for k in range(1, min(n, bounds.max_arity) + 1):
                for seq in itertools.permutations(range(1, n + 1), k):
                    rows = frozenset(tuple(r[j - 1] for j in seq) for r in member)
                    label = ",".join(map(str, seq))
                    if add(rows, f"project[{label}]({expr})"):
                        return ClosureResult({**members, **new}, capped, False)

        for (m1, e1), (m2, e2) in itertools.product(members.items(), repeat=2):
            if m1 not in frontier and m2 not in frontier:
                continue
            if m1 and m2 and arity(m1) + arity(m2) <= bounds.max_arity:
                rows = frozenset(a + b for a in m1 for b in m2)
                if add(rows, f"({e1} x {e2})"):
                    return ClosureResult({**members, **new}, capped, False)
            if (not m1 or not m2 or arity(m1) == arity(m2)) and m1 != m2:
                if add(m1 | m2, f"({e1} u {e2})"):
                    return ClosureResult({**members, **new}, capped, False)

        members.update(new)
        frontier = new
        depth += 1

    return ClosureResult(members, capped, not capped)


@dataclass(frozen=True)
class ClosureVerdict:
    found: bool
    witness: "str | None"
    capped: bool


def _as_member(relation) -> frozenset:
    rows = getattr(relation, "rows", relation)
    return frozenset(tuple(r) for r in rows)


def in_closure(
    relation, kernel: FluxKernel, bounds: ClosureBounds = DEFAULT_BOUNDS
) -> ClosureVerdict:
    """Semi-decision: a positive answer carries the view expression; a
    negative one only means not found within the bounds."""
    target = _as_member(relation)
    result = closure_set(kernel, bounds, targets=frozenset({target}))
    if target in result.members:
        return ClosureVerdict(True, result.members[target], result.capped)
    return ClosureVerdict(False, None, result.capped)


def _member_values(member: frozenset) -> frozenset:
    return frozenset(v for row in member for v in row)


@dataclass(frozen=True)
class FluxComparison:
    verdict: str
    detail: tuple = ()
    capped: bool = False


def flux_equal(
    k1: FluxKernel, k2: FluxKernel, bounds: ClosureBounds = DEFAULT_BOUNDS
) -> FluxComparison:
    """Closure-operator reduction: the fluxes coincide iff each kernel's
    generators all lie in the other's closure.  Set-identical kernels are
    equal outright; a generator whose values leave the other kernel's
    active domain refutes equality outright."""
    if k1.members == k2.members:
        return FluxComparison(EQUAL)

    refuted = []
    for a, b, tag in ((k1, k2, "left"), (k2, k1, "right")):
        dom = b.values()
        for member in a.sorted_members():
            if not _member_values(member) <= dom:
                refuted.append((tag, member))
    if refuted:
        return FluxComparison(UNEQUAL, tuple(refuted))

    capped = False
    unresolved = []
    for a, b, tag in ((k1, k2, "left"), (k2, k1, "right")):
        missing = frozenset(m for m in a.members if m not in b.members)
        if not missing:
            continue
        result = closure_set(b, bounds, targets=missing)
        capped = capped or result.capped
        for member in sorted(missing, key=_member_key):
            if member not in result.members:
                unresolved.append((tag, member))
    if unresolved:
        return FluxComparison(UNKNOWN, tuple(unresolved), capped)
    return FluxComparison(EQUAL, capped=capped)


def morphism_equal(m1, m2, bounds: ClosureBounds = DEFAULT_BOUNDS) -> FluxComparison:
    """Arrow equality in the database category: same instances at both ends
    and equal fluxes."""
    if m1.source != m2.source or m1.target != m2.target:
        raise PreconditionError(
            "morphism equality needs identical source and target instances"
        )
    return flux_equal(flux_kernel(m1), flux_kernel(m2), bounds)


@dataclass(frozen=True)
class ComposedVerdict:
    found: bool
    witnesses: tuple
    capped: bool


def in_composed_flux(
    relation,
    k_first: FluxKernel,
    k_second: FluxKernel,
    bounds: ClosureBounds = DEFAULT_BOUNDS,
) -> ComposedVerdict:
    """The flux of a composed mapping is the intersection of the fluxes, so
    membership is the conjunction of the two memberships."""
    v1 = in_closure(relation, k_first, bounds)
    v2 = in_closure(relation, k_second, bounds)
    return ComposedVerdict(
        v1.found and v2.found, (v1.witness, v2.witness), v1.capped or v2.capped
    )
