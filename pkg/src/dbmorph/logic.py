"""Dependencies between schemas: terms, literals, tgds, egds, SOtgds.

A tgd has the shape ``∀x (∃y φ(x,y) ⇒ ∃z ψ(x,z))`` with φ a conjunction of
literals and ψ a conjunction of relational atoms; an egd equates variables
under a conjunction of atoms.  A second-order tgd (SOtgd) prefixes a tuple
of existentially quantified function symbols to a conjunction of implications
whose head terms may apply those symbols.

This module also implements the transformations that feed the operad
compiler: Skolemization of tgd sets, constant hoisting, normalization into
single-head implications, tgd classification, and brute-force constraint
validation of finite instances.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .errors import SafetyError, SchemaError
from .model import (
    EMPTY_NAME,
    NULL,
    TRUTH,
    DomainValue,
    Instance,
    Row,
    sort_rows,
    value_key,
)

__all__ = [
    "FuncKind",
    "FuncSymbol",
    "Var",
    "Const",
    "App",
    "Term",
    "RelAtom",
    "Comparison",
    "NotNull",
    "Literal",
    "Tgd",
    "Egd",
    "Dependency",
    "SOtgdConjunct",
    "SOtgd",
    "NormalizedImplication",
    "TAUT_ATOM",
    "TAUT_SOTGD",
    "TAUT_IMPLICATION",
    "COMPARISON_OPS",
    "HASH_NAME",
    "hash_symbol",
    "char_symbol",
    "term_variables",
    "term_functions",
    "literal_terms",
    "literal_variables",
    "classify_tgd",
    "skolemize",
    "hoist_constants",
    "normalize",
    "check_conjunct_safety",
    "eval_comparison",
    "Violation",
    "ValidationReport",
    "validate_instance",
]

COMPARISON_OPS = ("=", "!=", "<", "<=", ">", ">=")

HASH_NAME = "hash"


class FuncKind(enum.Enum):
    SKOLEM = "skolem"
    HASH = "hash"
    CHAR = "char"  # characteristic function of a relation, e.g. f_Over65


@dataclass(frozen=True)
class FuncSymbol:
    name: str
    kind: FuncKind
    relation: str | None = None  # CHAR only: the relation it tests

    def __post_init__(self) -> None:
        if (self.kind is FuncKind.CHAR) != (self.relation is not None):
            raise SchemaError("characteristic function symbols carry exactly one relation name")


def hash_symbol() -> FuncSymbol:
    return FuncSymbol(HASH_NAME, FuncKind.HASH)


def char_symbol(relation: str) -> FuncSymbol:
    return FuncSymbol(f"f_{relation}", FuncKind.CHAR, relation)


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: DomainValue


@dataclass(frozen=True)
class App:
    func: FuncSymbol
    args: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "args", tuple(self.args))


Term = Union[Var, Const, App]


def term_variables(term: Term) -> Iterator[str]:
    """All variable names in a term, function arguments included."""
    if isinstance(term, Var):
        yield term.name
    elif isinstance(term, App):
        for a in term.args:
            yield from term_variables(a)


def term_functions(term: Term) -> Iterator[FuncSymbol]:
    if isinstance(term, App):
        yield term.func
        for a in term.args:
            yield from term_functions(a)


@dataclass(frozen=True)
class RelAtom:
    """Relational atom ``r(t_1, …, t_k)``, optionally negated."""

    relation: str
    terms: tuple
    negated: bool = False
    pos: "tuple[int, int] | None" = field(default=None, compare=False, repr=False, kw_only=True)

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple(self.terms))


@dataclass(frozen=True)
class Comparison:
    """Built-in comparison ``t ⊙ t'`` with ⊙ in =, !=, <, <=, >, >=."""

    left: Term
    op: str
    right: Term
    negated: bool = False
    pos: "tuple[int, int] | None" = field(default=None, compare=False, repr=False, kw_only=True)

    def __post_init__(self) -> None:
        if self.op not in COMPARISON_OPS:
            raise SchemaError(f"unknown comparison operator {self.op!r}")


@dataclass(frozen=True)
class NotNull:
    """Built-in nullability test ``notnull(t)``."""

    term: Term
    negated: bool = False
    pos: "tuple[int, int] | None" = field(default=None, compare=False, repr=False, kw_only=True)


Literal = Union[RelAtom, Comparison, NotNull]


def literal_terms(lit: Literal) -> tuple:
    if isinstance(lit, RelAtom):
        return lit.terms
    if isinstance(lit, Comparison):
        return (lit.left, lit.right)
    return (lit.term,)


def literal_variables(lit: Literal) -> Iterator[str]:
    for t in literal_terms(lit):
        yield from term_variables(t)


@dataclass(frozen=True)
class Tgd:
    """∀universals (∃lhs_exists ∧lhs ⇒ ∃rhs_exists ∧rhs)."""

    universals: tuple
    lhs: tuple
    rhs: tuple
    lhs_exists: tuple = ()
    rhs_exists: tuple = ()

    def __post_init__(self) -> None:
        for f in ("universals", "lhs", "rhs", "lhs_exists", "rhs_exists"):
            object.__setattr__(self, f, tuple(getattr(self, f)))
        bound = set(self.universals) | set(self.lhs_exists)
        for lit in self.lhs:
            for v in literal_variables(lit):
                if v not in bound:
                    raise SafetyError(f"lhs variable {v} is not bound")
        head_bound = set(self.universals) | set(self.rhs_exists)
        for atom in self.rhs:
            if atom.negated:
                raise SafetyError("negation is not allowed in a tgd head")
            for v in term_variables_of_atoms((atom,)):
                if v not in head_bound:
                    raise SafetyError(f"head variable {v} is not bound")


@dataclass(frozen=True)
class Egd:
    """∀universals (∧lhs ⇒ y_1 ≐ z_1 ∧ … ∧ y_n ≐ z_n)."""

    universals: tuple
    lhs: tuple
    equalities: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "universals", tuple(self.universals))
        object.__setattr__(self, "lhs", tuple(self.lhs))
        object.__setattr__(self, "equalities", tuple(tuple(e) for e in self.equalities))
        lhs_vars = set()
        for atom in self.lhs:
            if not isinstance(atom, RelAtom) or atom.negated:
                raise SafetyError("an egd lhs is a conjunction of positive relational atoms")
            lhs_vars.update(term_variables_of_atoms((atom,)))
        for y, z in self.equalities:
            for v in (y, z):
                if v not in lhs_vars:
                    raise SafetyError(f"equated variable {v} does not occur in the egd lhs")


Dependency = Union[Tgd, Egd]


def term_variables_of_atoms(atoms: Iterable[RelAtom]) -> Iterator[str]:
    for atom in atoms:
        for t in atom.terms:
            yield from term_variables(t)


@dataclass(frozen=True)
class SOtgdConjunct:
    """One implication ∀universals (∧lhs ⇒ ∧rhs) inside an SOtgd."""

    universals: tuple
    lhs: tuple
    rhs: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "universals", tuple(self.universals))
        object.__setattr__(self, "lhs", tuple(self.lhs))
        object.__setattr__(self, "rhs", tuple(self.rhs))


@dataclass(frozen=True)
class SOtgd:
    """∃functions (∧ conjuncts); head terms may apply the bound functions."""

    functions: tuple
    conjuncts: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "functions", tuple(self.functions))
        object.__setattr__(self, "conjuncts", tuple(self.conjuncts))
        names = [f.name for f in self.functions]
        if len(set(names)) != len(names):
            raise SchemaError("duplicate function symbols in the SOtgd prefix")


@dataclass(frozen=True)
class NormalizedImplication:
    """Single-head implication ∀universals (∧lhs ⇒ head)."""

    universals: tuple
    lhs: tuple
    head: RelAtom

    def __post_init__(self) -> None:
        object.__setattr__(self, "universals", tuple(self.universals))
        object.__setattr__(self, "lhs", tuple(self.lhs))
        if self.head.negated:
            raise SafetyError("an implication head cannot be negated")

    @property
    def is_tautology(self) -> bool:
        return self.head.relation == EMPTY_NAME


TAUT_ATOM = RelAtom(EMPTY_NAME, ())
TAUT_SOTGD = SOtgd((), (SOtgdConjunct((), (TAUT_ATOM,), (TAUT_ATOM,)),))
TAUT_IMPLICATION = NormalizedImplication((), (TAUT_ATOM,), TAUT_ATOM)


def _is_taut_conjunct(conj: SOtgdConjunct) -> bool:
    return (
        not conj.universals
        and conj.lhs == (TAUT_ATOM,)
        and conj.rhs == (TAUT_ATOM,)
    )


# ---------------------------------------------------------------------------
# classification


def classify_tgd(tgd: Tgd) -> str:
    """"weakly-full" when the rhs has no existentials and each lhs existential
    occurs at most once in the lhs; "general" otherwise."""
    if tgd.rhs_exists:
        return "general"
    counts: dict = {}
    for lit in tgd.lhs:
        for v in literal_variables(lit):
            counts[v] = counts.get(v, 0) + 1
    if any(counts.get(v, 0) > 1 for v in tgd.lhs_exists):
        return "general"
    return "weakly-full"


# ---------------------------------------------------------------------------
# Skolemization


def _fresh_names(prefix: str, taken: set, count: int) -> list[str]:
    out: list[str] = []
    n = 1
    while len(out) < count:
        name = f"{prefix}{n}"
        if name not in taken:
            taken.add(name)
            out.append(name)
        n += 1
    return out


def _substitute(term: Term, mapping: Mapping[str, Term]) -> Term:
    if isinstance(term, Var):
        return mapping.get(term.name, term)
    if isinstance(term, App):
        return App(term.func, tuple(_substitute(a, mapping) for a in term.args))
    return term


def check_conjunct_safety(conj: SOtgdConjunct) -> None:
    # every universal must occur in some lhs relational atom
    atom_vars = set(
        term_variables_of_atoms(l for l in conj.lhs if isinstance(l, RelAtom))
    )
    for v in conj.universals:
        if v not in atom_vars:
            raise SafetyError(f"unsafe dependency: variable {v} occurs in no lhs relational atom")
    bound = set(conj.universals)
    for lit in conj.lhs:
        for v in literal_variables(lit):
            if v not in bound:
                raise SafetyError(f"lhs variable {v} is not universally bound")
    for atom in conj.rhs:
        for t in atom.terms:
            for v in term_variables(t):
                if v not in bound:
                    raise SafetyError(f"head variable {v} is not universally bound")


def skolemize(tgds: Sequence[Tgd]) -> SOtgd:
    """Replace every rhs existential with a fresh skolem symbol applied to all
    universals of its tgd (lhs inner existentials are promoted to universals
    first).  Symbol sets of distinct tgds are disjoint."""
    taken: set = set()
    for tgd in tgds:
        for lit in list(tgd.lhs) + list(tgd.rhs):
            for t in literal_terms(lit):
                taken.update(f.name for f in term_functions(t))
    functions: list[FuncSymbol] = []
    conjuncts: list[SOtgdConjunct] = []
    for tgd in tgds:
        universals = tuple(tgd.universals) + tuple(tgd.lhs_exists)
        arg_terms = tuple(Var(u) for u in universals)
        names = _fresh_names("f", taken, len(tgd.rhs_exists))
        mapping: dict = {}
        for z, name in zip(tgd.rhs_exists, names):
            sym = FuncSymbol(name, FuncKind.SKOLEM)
            functions.append(sym)
            mapping[z] = App(sym, arg_terms)
        rhs = tuple(
            RelAtom(a.relation, tuple(_substitute(t, mapping) for t in a.terms))
            for a in tgd.rhs
        )
        conj = SOtgdConjunct(universals, tgd.lhs, rhs)
        check_conjunct_safety(conj)
        conjuncts.append(conj)
    return SOtgd(tuple(functions), tuple(conjuncts))


# ---------------------------------------------------------------------------
# constant hoisting and normalization


def hoist_constants(impl: NormalizedImplication) -> NormalizedImplication:
    """Replace every constant occurring in a lhs relational atom by a fresh
    variable constrained equal to it, one variable per occurrence."""
    taken = set(impl.universals)
    for lit in impl.lhs:
        taken.update(literal_variables(lit))
    taken.update(term_variables_of_atoms((impl.head,)))
    guards: list[Comparison] = []
    new_lhs: list[Literal] = []
    new_universals = list(impl.universals)
    for lit in impl.lhs:
        if not isinstance(lit, RelAtom):
            new_lhs.append(lit)
            continue
        terms = []
        for t in lit.terms:
            if isinstance(t, Const):
                (name,) = _fresh_names("y", taken, 1)
                guards.append(Comparison(Var(name), "=", t))
                new_universals.append(name)
                terms.append(Var(name))
            else:
                terms.append(t)
        new_lhs.append(RelAtom(lit.relation, tuple(terms), lit.negated))
    if not guards:
        return impl
    return NormalizedImplication(
        tuple(new_universals), tuple(guards) + tuple(new_lhs), impl.head
    )


def normalize(sotgd: SOtgd) -> list[NormalizedImplication]:
    """Split multi-head conjuncts into single-head implications sharing the
    lhs, hoisting lhs constants.  The tautology normalizes to itself."""
    out: list[NormalizedImplication] = []
    for conj in sotgd.conjuncts:
        if _is_taut_conjunct(conj):
            out.append(TAUT_IMPLICATION)
            continue
        check_conjunct_safety(conj)
        for atom in conj.rhs:
            if atom.relation == EMPTY_NAME:
                raise SafetyError(f"{EMPTY_NAME} cannot head an ordinary dependency")
            out.append(
                hoist_constants(NormalizedImplication(conj.universals, conj.lhs, atom))
            )
    return out


# ---------------------------------------------------------------------------
# built-in comparison semantics


def eval_comparison(op: str, a: DomainValue, b: DomainValue) -> bool:
    """NULL satisfies no comparison; order comparisons are defined only
    between two integers and are false otherwise; =/!= are syntactic."""
    if a is NULL or b is NULL:
        return False
    if a is TRUTH:
        a = 1
    if b is TRUTH:
        b = 1
    if op == "=":
        return a == b
    if op == "!=":
        return a != b
    if not (isinstance(a, int) and isinstance(b, int)):
        return False
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    return a >= b


# ---------------------------------------------------------------------------
# brute-force instance validation


@dataclass(frozen=True)
class Violation:
    constraint: Dependency
    witness: tuple  # sorted (variable, value) pairs

    def witness_dict(self) -> dict:
        return dict(self.witness)


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple

    @property
    def ok(self) -> bool:
        return not self.violations


def _eval_constraint_term(term: Term, g: Mapping[str, DomainValue], inst: Instance) -> DomainValue:
    if isinstance(term, Var):
        return g[term.name]
    if isinstance(term, Const):
        return 1 if term.value is TRUTH else term.value
    from .irdb import hash_tuple  # late import: irdb depends on this module

    if term.func.kind is FuncKind.HASH:
        return hash_tuple(tuple(_eval_constraint_term(a, g, inst) for a in term.args))
    if term.func.kind is FuncKind.CHAR:
        args = tuple(_eval_constraint_term(a, g, inst) for a in term.args)
        return 1 if args in inst.relation(term.func.relation).rows else 0
    raise SafetyError(
        f"function {term.func.name} has no fixed interpretation inside a schema constraint"
    )


def _literal_holds(lit: Literal, g: Mapping[str, DomainValue], inst: Instance) -> bool:
    if isinstance(lit, RelAtom):
        row = tuple(_eval_constraint_term(t, g, inst) for t in lit.terms)
        holds = row in inst.relation(lit.relation).rows
    elif isinstance(lit, Comparison):
        holds = eval_comparison(
            lit.op,
            _eval_constraint_term(lit.left, g, inst),
            _eval_constraint_term(lit.right, g, inst),
        )
    else:
        holds = _eval_constraint_term(lit.term, g, inst) is not NULL
    return holds != lit.negated


def _match_atoms(
    atoms: Sequence[RelAtom],
    inst: Instance,
    g: dict,
    idx: int,
) -> Iterator[dict]:
    if idx == len(atoms):
        yield dict(g)
        return
    atom = atoms[idx]
    rel = inst.relation(atom.relation)
    for row in rel.sorted_rows():
        bound = dict(g)
        ok = True
        for t, v in zip(atom.terms, row):
            if isinstance(t, Var):
                if t.name in bound and bound[t.name] != v:
                    ok = False
                    break
                bound[t.name] = v
            elif isinstance(t, Const):
                want = 1 if t.value is TRUTH else t.value
                if want != v:
                    ok = False
                    break
            else:  # function terms are not matchable patterns
                raise SafetyError(
                    "function terms in constraint lhs atoms are not supported by the validator"
                )
        if ok:
            yield from _match_atoms(atoms, inst, bound, idx + 1)


def _lhs_assignments(
    lits: Sequence[Literal],
    all_vars: Sequence[str],
    inst: Instance,
    domain: Sequence[DomainValue],
) -> Iterator[dict]:
    """Assignments over all_vars satisfying the literal conjunction; positive
    atoms are matched against rows, leftover variables range over domain."""
    positive = [l for l in lits if isinstance(l, RelAtom) and not l.negated]
    rest = [l for l in lits if not (isinstance(l, RelAtom) and not l.negated)]
    for g in _match_atoms(positive, inst, {}, 0):
        free = [v for v in all_vars if v not in g]
        for combo in itertools.product(domain, repeat=len(free)):
            full = dict(g)
            full.update(zip(free, combo))
            if all(_literal_holds(l, full, inst) for l in rest):
                yield full


def validate_instance(
    inst: Instance,
    constraints: Sequence[Dependency] | None = None,
    domain: Iterable[DomainValue] = (),
) -> ValidationReport:
    """Brute-force check of every tgd and egd over the active domain plus the
    declared constants.  Incomplete by construction for witnesses outside
    that domain; violations are data, not errors."""
    from .model import active_domain

    if constraints is None:
        constraints = inst.schema.constraints
    base: set = set(active_domain(inst)) | set(domain)
    for dep in constraints:
        lits = list(dep.lhs) + (list(dep.rhs) if isinstance(dep, Tgd) else [])
        for lit in lits:
            for t in literal_terms(lit):
                if isinstance(t, Const) and t.value is not TRUTH:
                    base.add(t.value)
    dom = sorted(base, key=value_key)
    violations: list[Violation] = []
    for dep in constraints:
        if isinstance(dep, Tgd):
            all_vars = list(dep.universals) + list(dep.lhs_exists)
            for g in _lhs_assignments(dep.lhs, all_vars, inst, dom):
                witnessed = False
                for combo in itertools.product(dom, repeat=len(dep.rhs_exists)):
                    full = {v: g[v] for v in dep.universals}
                    full.update(zip(dep.rhs_exists, combo))
                    if all(_literal_holds(a, full, inst) for a in dep.rhs):
                        witnessed = True
                        break
                if not witnessed:
                    witness = tuple(sorted((v, g[v]) for v in dep.universals))
                    if not any(
                        v.constraint == dep and v.witness == witness for v in violations
                    ):
                        violations.append(Violation(dep, witness))
        else:
            for g in _lhs_assignments(dep.lhs, dep.universals, inst, dom):
                for y, z in dep.equalities:
                    if not eval_comparison("=", g[y], g[z]):
                        witness = tuple(sorted((v, g[v]) for v in dep.universals))
                        if not any(
                            v.constraint == dep and v.witness == witness
                            for v in violations
                        ):
                            violations.append(Violation(dep, witness))
                        break
    return ValidationReport(tuple(violations))
