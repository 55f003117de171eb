"""Heyting-valued term models over finite algebras, validity checking and the Ω-rule soundness probe.

The term universe M is the set of closed terms of a language up to a depth bound. The abstract domain
D is a set of functions M → H, stored as tuples aligned with `Structure.universe`; a full structure
takes every such function.
"""
import itertools
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from pydantic import BaseModel

from sequent_lab.config import settings
from sequent_lab.errors import LevelViolation, OutsideUniverse, UncoveredVariable
from sequent_lab.formula_core import (
    Abstract,
    Atom,
    Binary,
    Bot,
    Fn,
    Formula,
    Language,
    Quant,
    Quant2,
    SetAtom,
    Term,
    Var,
    conj_all,
    fresh_name,
    instantiate,
    open_set,
    open_term,
    term_depth,
)
from sequent_lab.grammar import parse_formula
from sequent_lab.lab_logger import LabLogger, get_logger
from sequent_lab.lattice_lab import FiniteHeytingAlgebra, Label, boolean_algebra, chain_algebra, label_text
from sequent_lab.proof_search import Member, SearchBudget, omega_membership
from sequent_lab.sequent_kernel import Sequent

SetFunction = Tuple[Label, ...]
Valuation = Dict[str, SetFunction]
Assignment = Dict[str, Term]

STAR_LANGUAGE = Language((("*", 0),), ())


def closed_terms(language: Language, depth: int) -> Tuple[Term, ...]:
    """Closed terms of the language with nesting depth at most `depth`"""
    terms: Set[Term] = {Fn(name) for name, arity in language.functions if arity == 0}
    for _ in range(depth):
        layer = set(terms)
        for name, arity in language.functions:
            if arity > 0:
                layer |= {Fn(name, args) for args in itertools.product(sorted(terms, key=str), repeat=arity)}
        terms = layer
    return tuple(sorted(terms, key=lambda t: (term_depth(t), str(t))))


@dataclass
class Structure:
    """
    A Heyting-valued structure ⟨H, M, D, tables⟩.

    Predicate tables map tuples of closed terms to algebra elements; missing entries are the bottom,
    except for `=`, which defaults to identity on M. `domain` is None for the full structure D = H^M.
    """

    algebra: FiniteHeytingAlgebra
    universe: Tuple[Term, ...]
    predicates: Dict[str, Dict[Tuple[Term, ...], Label]] = field(default_factory=dict)
    domain: Optional[Tuple[SetFunction, ...]] = None

    def __post_init__(self) -> None:
        if not self.universe:
            raise OutsideUniverse("The term universe is empty")
        self._position = {t: i for i, t in enumerate(self.universe)}
        for pred, table in self.predicates.items():
            for args, value in table.items():
                self.algebra.index(value)
                for t in args:
                    self.position(t)
        if self.domain is not None:
            if not self.domain:
                raise OutsideUniverse("The domain D must not be empty")
            for fn in self.domain:
                if len(fn) != len(self.universe):
                    raise OutsideUniverse(f"Domain function {fn} does not match the universe")
                for value in fn:
                    self.algebra.index(value)

    @classmethod
    def full(
        cls,
        algebra: FiniteHeytingAlgebra,
        language: Language = STAR_LANGUAGE,
        depth: Optional[int] = None,
        predicates: Optional[Dict[str, Dict[Tuple[Term, ...], Label]]] = None,
    ) -> "Structure":
        depth = settings.TERM_DEPTH if depth is None else depth
        return cls(algebra, closed_terms(language, depth), dict(predicates or {}))

    @property
    def is_full(self) -> bool:
        return self.domain is None

    def members(self) -> Iterator[SetFunction]:
        """D, in a fixed order"""
        if self.domain is not None:
            return iter(self.domain)
        return iter(itertools.product(self.algebra.elements, repeat=len(self.universe)))

    def position(self, t: Term) -> int:
        try:
            return self._position[t]
        except KeyError:
            raise OutsideUniverse(f"{t} is outside the term universe") from None

    def constant_function(self, value: Label) -> SetFunction:
        return tuple(value for _ in self.universe)

    def predicate_value(self, pred: str, args: Tuple[Term, ...]) -> Label:
        for t in args:
            self.position(t)
        table = self.predicates.get(pred)
        if table is None and pred == "=":
            return self.algebra.top if args[0] == args[1] else self.algebra.bottom
        return (table or {}).get(args, self.algebra.bottom)


def _term(t: Term, sigma: Assignment) -> Term:
    if isinstance(t, Var):
        if t.name not in sigma:
            raise UncoveredVariable(f"No value for the term variable {t.name}")
        return sigma[t.name]
    if isinstance(t, Fn):
        return Fn(t.name, tuple(_term(a, sigma) for a in t.args))
    raise UncoveredVariable(f"Dangling bound index {t}")


def _eval(f: Formula, s: Structure, v: Valuation, sigma: Assignment) -> Label:
    h = s.algebra
    if isinstance(f, Bot):
        return h.bottom
    if isinstance(f, Atom):
        return s.predicate_value(f.pred, tuple(_term(a, sigma) for a in f.args))
    if isinstance(f, SetAtom):
        if not isinstance(f.var, str) or f.var not in v:
            raise UncoveredVariable(f"No value for the set variable {f.var}")
        return v[f.var][s.position(_term(f.arg, sigma))]
    if isinstance(f, Binary):
        left = _eval(f.left, s, v, sigma)
        right = _eval(f.right, s, v, sigma)
        if f.op == "&":
            return h.meet(left, right)
        if f.op == "|":
            return h.join(left, right)
        return h.imp(left, right)
    if isinstance(f, Quant):
        values = [_eval(open_term(f.body, m), s, v, sigma) for m in s.universe]
        return h.meet_all(values) if f.kind == "all" else h.join_all(values)
    if isinstance(f, Quant2):
        name = fresh_name("X", set(f.free_set_vars) | set(v))
        body = open_set(f.body, name)
        values = [_eval(body, s, {**v, name: fn}, sigma) for fn in s.members()]
        return h.meet_all(values) if f.kind == "All" else h.join_all(values)
    raise TypeError(f"Not a formula: {f!r}")


def interpret(
    f: Formula, s: Structure, v: Optional[Valuation] = None, sigma: Optional[Assignment] = None
) -> Label:
    """
    Value of a formula in a structure.

    Parameters:
        f: The formula
        s: The structure
        v: Set variable valuation, each value a function on the universe
        sigma: Closed terms for the free term variables

    Returns:
        value: An element of the algebra
    """
    v = dict(v or {})
    sigma = dict(sigma or {})
    missing = sorted((f.free_set_vars - set(v)) | (f.free_term_vars - set(sigma)))
    if missing:
        raise UncoveredVariable(f"No value for {', '.join(missing)}")
    for t in sigma.values():
        s.position(t)
    return _eval(f, s, v, sigma)


def function_of(tau: Abstract, s: Structure, v: Optional[Valuation] = None, sigma: Optional[Assignment] = None) -> SetFunction:
    """t ↦ V(τ(t)) as a function on the universe; a member of D in every full structure"""
    return tuple(interpret(instantiate(tau, t), s, v, sigma) for t in s.universe)


def valuations(s: Structure, names: Iterable[str]) -> Iterator[Valuation]:
    ordered = sorted(set(names))
    for choice in itertools.product(list(s.members()), repeat=len(ordered)):
        yield dict(zip(ordered, choice))


def assignments(s: Structure, names: Iterable[str]) -> Iterator[Assignment]:
    ordered = sorted(set(names))
    for choice in itertools.product(s.universe, repeat=len(ordered)):
        yield dict(zip(ordered, choice))


def sequent_values(seq: Sequent, s: Structure, v: Valuation, sigma: Assignment) -> Tuple[Label, Label]:
    """(V(Γ), V(Π)) with V of an empty antecedent ⊤ and of an empty succedent ⊥"""
    h = s.algebra
    left = h.meet_all(interpret(f, s, v, sigma) for f in seq.antecedent)
    right = interpret(seq.succedent, s, v, sigma) if seq.succedent is not None else h.bottom
    return left, right


def countermodel(seq: Sequent, s: Structure) -> Optional[Tuple[Valuation, Assignment]]:
    """The first valuation and assignment with V(Γ) ≰ V(Π), or None when the sequent is valid"""
    h = s.algebra
    for v in valuations(s, seq.free_set_vars):
        for sigma in assignments(s, seq.free_term_vars):
            left, right = sequent_values(seq, s, v, sigma)
            if not h.leq(left, right):
                return v, sigma
    return None


def check_validity(seq: Sequent, s: Structure) -> bool:
    return countermodel(seq, s) is None


## Ω soundness probe


class ProbeEntry(BaseModel):
    delta: List[str]
    member: bool
    value: Optional[str] = None
    satisfied: Optional[bool] = None


class ProbeReport(BaseModel):
    q: str
    algebra: List[str]
    value_q: str
    target: str
    entries: List[ProbeEntry] = []
    unsound_instance: bool = False


def _context_value(delta: Sequence[Formula], s: Structure) -> Label:
    """Join over term assignments of V(⋀Δ), every set variable of Δ sent to the bottom function"""
    h = s.algebra
    zero = s.constant_function(h.bottom)
    set_vars: Set[str] = set()
    term_vars: Set[str] = set()
    for f in delta:
        set_vars |= f.free_set_vars
        term_vars |= f.free_term_vars
    v = {name: zero for name in set_vars}
    formula = conj_all(delta)
    return h.join_all(interpret(formula, s, v, sigma) for sigma in assignments(s, term_vars))


def omega_soundness_probe(
    s: Structure,
    q: Formula,
    pool: Sequence[Iterable[Formula]],
    budget: Optional[SearchBudget] = None,
    logger: Optional[LabLogger] = None,
) -> ProbeReport:
    """
    Test one instance of the left Ω-rule with target ⊥ against a structure.

    Every context Δ of the pool is tested for membership in the index set of q; certified members are
    evaluated with every set variable sent to the bottom function. The instance is flagged unsound when
    at least one member is certified, every certified premise Δ ⇒ ⊥ holds, and V(q) ≰ ⊥.

    Parameters:
        s: The structure
        q: A closed level 0 formula ∀X.φ
        pool: Candidate contexts, first-order
        budget: Search budget for the membership certificates
        logger: Optional logger

    Returns:
        report: Per-context membership and value, V(q) and the verdict
    """
    log = get_logger(logger)
    if not isinstance(q, Quant2) or q.kind != "All" or q.level != 0:
        raise LevelViolation(f"The probe needs a level 0 formula ∀X.φ, got {q}")
    if q.free_set_vars or q.free_term_vars:
        raise UncoveredVariable(f"The probe needs a closed formula, {q} has free variables")
    h = s.algebra
    budget = budget or SearchBudget(max_depth=8)
    value_q = interpret(q, s)
    report = ProbeReport(
        q=str(q), algebra=[label_text(a) for a in h.elements], value_q=label_text(value_q), target="bot"
    )
    for context in pool:
        delta = sorted(set(context), key=str)
        verdict = omega_membership(q, delta, budget, logger=logger)
        entry = ProbeEntry(delta=[str(f) for f in delta], member=isinstance(verdict, Member))
        if isinstance(verdict, Member):
            value = _context_value(delta, s)
            entry.value = label_text(value)
            entry.satisfied = h.leq(value, h.bottom)
        report.entries.append(entry)
    members = [e for e in report.entries if e.member]
    report.unsound_instance = bool(members) and all(e.satisfied for e in members) and not h.leq(value_q, h.bottom)
    if report.unsound_instance:
        log.failure(f"Ω instance for {q} is unsound: every certified premise holds but V(q) = {report.value_q}")
    else:
        log.info(f"No unsound Ω instance for {q} over {len(report.entries)} contexts")
    return report


P_COUNTER_FORMULA = "All X. (X(*) -> bot) | X(*)"


def default_probe_pool() -> List[List[Formula]]:
    """First-order contexts without predicate symbols, some of them inconsistent"""
    texts = [
        [],
        ["bot"],
        ["bot -> bot"],
        ["bot", "bot -> bot"],
        ["all x. bot"],
        ["Z(*)"],
        ["Z(*) -> bot"],
        ["Z(*)", "Z(*) -> bot"],
    ]
    return [[parse_formula(t) for t in context] for context in texts]


def p_counter2_demo(
    algebra: Optional[FiniteHeytingAlgebra] = None,
    budget: Optional[SearchBudget] = None,
    logger: Optional[LabLogger] = None,
) -> Dict[str, object]:
    """
    The full structure over the 3-chain 0 < 1/2 < 1 and the language {*}: φ = (X(*)→⊥)∨X(*) takes the
    values 1, 1/2, 1 for X(*) = 0, 1/2, 1, so V(∀X.φ) = 1/2, while every certified Ω premise Δ ⇒ ⊥ holds.
    """
    algebra = algebra or chain_algebra()
    s = Structure.full(algebra, STAR_LANGUAGE, depth=0)
    q = parse_formula(P_COUNTER_FORMULA, STAR_LANGUAGE)
    assert isinstance(q, Quant2)
    body = open_set(q.body, "X")
    per_valuation = [(label_text(fn[0]), label_text(interpret(body, s, {"X": fn}))) for fn in s.members()]
    probe = omega_soundness_probe(s, q, default_probe_pool(), budget, logger)
    return {
        "algebra": [label_text(a) for a in algebra.elements],
        "formula": str(q),
        "per_valuation": per_valuation,
        "value": probe.value_q,
        "probe": probe,
    }


def boolean_probe_harness(max_atoms: int = 2, logger: Optional[LabLogger] = None) -> List[Dict[str, object]]:
    """
    Run the probe of `p_counter2_demo` over the Boolean algebras with 1..max_atoms atoms and report what
    it finds. Index sets are those of the intuitionistic calculus, so a flag here says nothing about
    a classical Ω-rule.
    """
    found = []
    for atoms in range(1, max_atoms + 1):
        result = p_counter2_demo(boolean_algebra(atoms), logger=logger)
        probe = result["probe"]
        found.append({"atoms": atoms, "value": result["value"], "unsound_instance": probe.unsound_instance})  # type: ignore
    return found


__all__ = [
    "ProbeEntry",
    "ProbeReport",
    "STAR_LANGUAGE",
    "Structure",
    "assignments",
    "boolean_probe_harness",
    "check_validity",
    "closed_terms",
    "countermodel",
    "default_probe_pool",
    "function_of",
    "interpret",
    "omega_soundness_probe",
    "p_counter2_demo",
    "valuations",
]
