"""Bounded backward search for cut-free LI derivations, and the Ω-rule machinery built on it.

The search is deterministic: axioms first, then the invertible rules, then the choices
(disjunct, implication, instantiating term) in a fixed order, with loop checking along each branch.
It only ever answers "found" or "not found within the budget".
"""
import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple, Union

from sequent_lab.config import settings
from sequent_lab.errors import InvalidCertificate, LevelViolation, MissingPremise, SizeBoundExceeded
from sequent_lab.formula_core import (
    BOT,
    Binary,
    Formula,
    Quant,
    Quant2,
    Term,
    Var,
    fresh_name,
    open_set,
    open_term,
    open_terms,
    term_depth,
)
from sequent_lab.grammar import parse_formula, parse_term
from sequent_lab.lab_logger import LabLogger, get_logger
from sequent_lab.sequent_kernel import LI, LIP, LIT, Derivation, Sequent, check, is_cut_free

MAX_POOL = 4


@dataclass(frozen=True)
class SearchBudget:
    """Limits of one search: branch depth, visited sequents and extra instantiation terms"""

    max_depth: int = settings.SEARCH_DEPTH
    term_candidates: Tuple[Term, ...] = ()
    max_nodes: int = settings.SEARCH_NODES

    @classmethod
    def from_settings(cls) -> "SearchBudget":
        return cls(settings.SEARCH_DEPTH, tuple(parse_term(t) for t in settings.SEARCH_TERMS), settings.SEARCH_NODES)


@dataclass(frozen=True)
class NotFoundWithinBudget:
    """No derivation found; says nothing about provability"""

    reason: str = "search space exhausted"
    nodes_visited: int = 0

    def __str__(self) -> str:
        return f"NotFoundWithinBudget ({self.reason}, {self.nodes_visited} sequents visited)"


@dataclass(frozen=True)
class Member:
    """Certified membership of a context in an Ω index set"""

    derivation: Derivation
    fresh: str
    sequent: Sequent


OmegaVerdict = Union[Member, NotFoundWithinBudget]
SearchResult = Union[Derivation, NotFoundWithinBudget]


class _OutOfNodes(Exception):
    pass


class _Search:
    def __init__(self, budget: SearchBudget) -> None:
        self.budget = budget
        self.visited = 0
        self.depth_hit = False

    def candidates(self, s: Sequent) -> List[Term]:
        found: List[Term] = list(self.budget.term_candidates)
        harvested: Set[Term] = set()
        for f in s.formulas():
            harvested |= open_terms(f)
        for name in sorted(s.free_term_vars):
            harvested.add(Var(name))
        for t in sorted(harvested, key=lambda t: (term_depth(t), str(t))):
            if t not in found:
                found.append(t)
        if not found:
            found.append(Var(fresh_name("x", s.free_term_vars)))
        return found

    def prove(self, s: Sequent, depth: int, history: FrozenSet[Sequent]) -> Optional[Derivation]:
        self.visited += 1
        if self.visited > self.budget.max_nodes:
            raise _OutOfNodes()
        goal = s.succedent
        gamma = s.ante
        if goal is not None and goal in gamma:
            return Derivation("Id", s, main=goal)
        if BOT in gamma:
            return Derivation("BotL", s)
        if depth >= self.budget.max_depth:
            self.depth_hit = True
            return None
        if s in history:
            return None
        history = history | {s}
        nxt = depth + 1

        # invertible right rules
        if isinstance(goal, Binary) and goal.op == "&":
            p1 = self.prove(s.with_succedent(goal.left), nxt, history)
            if p1 is None:
                return None
            p2 = self.prove(s.with_succedent(goal.right), nxt, history)
            return None if p2 is None else Derivation("AndR", s, (p1, p2), main=goal)
        if isinstance(goal, Binary) and goal.op == "->":
            p = self.prove(Sequent(s.antecedent + (goal.left,), goal.right), nxt, history)
            return None if p is None else Derivation("ImpR", s, (p,), main=goal)
        if isinstance(goal, Quant) and goal.kind == "all":
            y = fresh_name("y", s.free_term_vars)
            p = self.prove(s.with_succedent(open_term(goal.body, Var(y))), nxt, history)
            return None if p is None else Derivation("AllR", s, (p,), main=goal, eigen=y)

        # invertible left rules
        for f in s.antecedent:
            if isinstance(f, Binary) and f.op == "&" and (f.left not in gamma or f.right not in gamma):
                index = 1 if f.left not in gamma else 2
                minor = f.left if index == 1 else f.right
                p = self.prove(Sequent(s.antecedent + (minor,), goal), nxt, history)
                return None if p is None else Derivation("AndL", s, (p,), main=f, index=index)
            if isinstance(f, Binary) and f.op == "|" and f.left not in gamma and f.right not in gamma:
                rest = tuple(g for g in s.antecedent if g != f)
                p1 = self.prove(Sequent(rest + (f.left,), goal), nxt, history)
                if p1 is None:
                    return None
                p2 = self.prove(Sequent(rest + (f.right,), goal), nxt, history)
                return None if p2 is None else Derivation("OrL", s, (p1, p2), main=f)
            if isinstance(f, Quant) and f.kind == "ex":
                rest = tuple(g for g in s.antecedent if g != f)
                y = fresh_name("y", s.free_term_vars)
                p = self.prove(Sequent(rest + (open_term(f.body, Var(y)),), goal), nxt, history)
                return None if p is None else Derivation("ExL", s, (p,), main=f, eigen=y)
            if isinstance(f, Binary) and f.op == "->" and f.left in gamma and f.right not in gamma:
                p2 = self.prove(Sequent(s.antecedent + (f.right,), goal), nxt, history)
                if p2 is None:
                    return None
                p1 = Derivation("Id", s.with_succedent(f.left), main=f.left)
                return Derivation("ImpL", s, (p1, p2), main=f)

        # choices
        if isinstance(goal, Binary) and goal.op == "|":
            for index, part in ((1, goal.left), (2, goal.right)):
                p = self.prove(s.with_succedent(part), nxt, history)
                if p is not None:
                    return Derivation("OrR", s, (p,), main=goal, index=index)
        if isinstance(goal, Quant) and goal.kind == "ex":
            for t in self.candidates(s):
                p = self.prove(s.with_succedent(open_term(goal.body, t)), nxt, history)
                if p is not None:
                    return Derivation("ExR", s, (p,), main=goal, term=t)
        for f in s.antecedent:
            if isinstance(f, Binary) and f.op == "->" and f.right not in gamma:
                p1 = self.prove(s.with_succedent(f.left), nxt, history)
                if p1 is None:
                    continue
                p2 = self.prove(Sequent(s.antecedent + (f.right,), goal), nxt, history)
                if p2 is not None:
                    return Derivation("ImpL", s, (p1, p2), main=f)
        for f in s.antecedent:
            if isinstance(f, Quant) and f.kind == "all":
                for t in self.candidates(s):
                    instance = open_term(f.body, t)
                    if instance in gamma:
                        continue
                    p = self.prove(Sequent(s.antecedent + (instance,), goal), nxt, history)
                    if p is not None:
                        return Derivation("AllL", s, (p,), main=f, term=t)
        return None


def search_cutfree(
    s: Sequent, budget: Optional[SearchBudget] = None, logger: Optional[LabLogger] = None
) -> SearchResult:
    """
    Look for a cut-free LI derivation of a first-order sequent.

    Parameters:
        s: The goal sequent, every formula at level −1
        budget: Depth, node and instantiation limits, defaults from the settings
        logger: Optional logger collecting the outcome

    Returns:
        result: A checker-valid cut-free derivation of `s`, or `NotFoundWithinBudget`
    """
    for f in s.formulas():
        if f.level != -1:
            raise LevelViolation(f"Proof search is first-order only, got {f}")
    budget = budget or SearchBudget.from_settings()
    log = get_logger(logger)
    search = _Search(budget)
    try:
        found = search.prove(s, 0, frozenset())
    except _OutOfNodes:
        log.warn(f"Search for {s} stopped after {budget.max_nodes} sequents")
        return NotFoundWithinBudget("node budget exhausted", search.visited)
    if found is None:
        reason = "depth bound reached" if search.depth_hit else "search space exhausted"
        log.info(f"No derivation of {s} ({reason}, {search.visited} sequents)")
        return NotFoundWithinBudget(reason, search.visited)
    log.success(f"Found a derivation of {s} with {found.node_count()} nodes")
    return found


def is_found(result: object) -> bool:
    return isinstance(result, Derivation)


## Ω index sets


def defining_sequent(q: Formula, delta: Iterable[Formula], fresh: str, lam: Optional[Formula] = None) -> Sequent:
    """Δ ⇒ φ(Y) for ∀X.φ, or φ(Y), Δ ⇒ Λ for ∃X.φ"""
    instance = open_set(q.body, fresh)  # type: ignore
    if q.kind == "All":  # type: ignore
        return Sequent.of(delta, instance)
    return Sequent.of(list(delta) + [instance], lam)


def _require_index_formula(q: Formula) -> None:
    if not isinstance(q, Quant2):
        raise LevelViolation(f"Expected a second-order quantified formula, got {q}")
    if q.level != 0:
        raise LevelViolation(f"Index sets are built for level 0 formulas only, {q} has level {q.level}")


def omega_membership(
    q: Formula,
    delta: Iterable[Formula],
    budget: Optional[SearchBudget] = None,
    lam: Optional[Formula] = None,
    logger: Optional[LabLogger] = None,
) -> OmegaVerdict:
    """
    Decide (within a budget) whether Δ belongs to the level-0 index set of `q`.

    For ∀X.φ the defining sequent is Δ ⇒ φ(Y), for ∃X.φ it is φ(Y), Δ ⇒ Λ, with Y fresh.

    Parameters:
        q: A level 0 second-order quantified formula
        delta: The candidate context, first-order
        budget: Search budget
        lam: The succedent Λ of the ∃-side, if any
        logger: Optional logger

    Returns:
        verdict: `Member` with the certified derivation, or `NotFoundWithinBudget`
    """
    _require_index_formula(q)
    delta = list(delta)
    for f in delta + ([lam] if lam is not None else []):
        if f.level != -1:
            raise LevelViolation(f"Index set contexts are first-order, got {f}")
    used: Set[str] = set()
    for f in delta + ([lam] if lam is not None else []):
        used |= f.free_set_vars
    fresh = fresh_name("Y", used)
    sequent = defining_sequent(q, delta, fresh, lam)
    result = search_cutfree(sequent, budget, logger)
    if isinstance(result, Derivation):
        return Member(result, fresh, sequent)
    return result


def sample_index_set(
    q: Formula, pool: Sequence[Formula], budget: Optional[SearchBudget] = None, logger: Optional[LabLogger] = None
) -> List[Tuple[FrozenSet[Formula], Member]]:
    """Every subset of a pool of at most four formulas that is certified Member, smallest subsets first"""
    if len(pool) > MAX_POOL:
        raise SizeBoundExceeded(f"Formula pools hold at most {MAX_POOL} formulas, got {len(pool)}")
    members = []
    for size in range(len(pool) + 1):
        for combo in itertools.combinations(pool, size):
            verdict = omega_membership(q, combo, budget, logger=logger)
            if isinstance(verdict, Member):
                members.append((frozenset(combo), verdict))
    return members


@dataclass
class OmegaCutConfig:
    """
    A cut on ∀X.φ whose left premise ends with (∀X R) over `left` (Γ ⇒ φ(Y)) and whose right premise
    is an Ω-rule with the premises listed in `premise_table` (Δ ↦ derivation of Δ, Γ ⇒ Π).
    """

    gamma: FrozenSet[Formula]
    q: Formula
    left: Derivation
    premise_table: Dict[FrozenSet[Formula], Derivation] = field(default_factory=dict)
    succedent: Optional[Formula] = None


def _certificate_variable(config: OmegaCutConfig) -> str:
    left = config.left
    if left.conclusion.ante != config.gamma or left.conclusion.succedent is None:
        raise InvalidCertificate("The certificate must end with Γ ⇒ φ(Y)")
    gamma_sets: Set[str] = set()
    for f in config.gamma:
        gamma_sets |= f.free_set_vars
    for name in sorted(left.conclusion.succedent.free_set_vars - gamma_sets):
        if open_set(config.q.body, name) == left.conclusion.succedent:  # type: ignore
            return name
    raise InvalidCertificate(f"{left.conclusion} is not an instance Γ ⇒ φ(Y) of {config.q} with Y fresh")


def omega_cut_reduce(config: OmegaCutConfig, logger: Optional[LabLogger] = None) -> Derivation:
    """
    Reduce a cut against an Ω-rule: Γ itself belongs to the index set (the left derivation certifies it),
    so Γ ⇒ Π is one of the Ω premises and is returned as it stands.

    Parameters:
        config: The cut configuration
        logger: Optional logger

    Returns:
        derivation: The stored premise derivation for Γ
    """
    log = get_logger(logger)
    _require_index_formula(config.q)
    if check(config.left, LI) or not is_cut_free(config.left):
        raise InvalidCertificate("The certificate must be a cut-free LI derivation")
    fresh = _certificate_variable(config)
    certificate = Member(config.left, fresh, config.left.conclusion)
    log.info(f"Γ = {{{', '.join(str(f) for f in sorted(config.gamma, key=str))}}} certified with fresh {fresh}")
    if config.gamma not in config.premise_table:
        raise MissingPremise("No premise derivation stored for Γ")
    premise = config.premise_table[config.gamma]
    violations = check(premise, LIT)
    if violations:
        raise InvalidCertificate(f"Stored premise for Γ is not valid: {violations[0]}")
    expected = Sequent.of(config.gamma, config.succedent if config.succedent is not None else premise.conclusion.succedent)
    if premise.conclusion != expected:
        raise MissingPremise(f"Stored premise proves {premise.conclusion}, expected {expected}")
    log.success(f"Cut on {config.q} reduced to the stored premise {expected}, certificate ends with {certificate.sequent}")
    return premise


def omega_cut_demo(logger: Optional[LabLogger] = None) -> Dict[str, object]:
    """The bundled configuration Γ = {⊥}, q = ∀X.(X(c)→X(x)), Π = r"""
    q = parse_formula("All X. X(c) -> X(x)")
    gamma = frozenset([BOT])
    pi = parse_formula("r")
    fresh = "Y"
    left = Derivation("BotL", Sequent.of(gamma, open_set(q.body, fresh)))  # type: ignore
    left_side = Derivation("All2R", Sequent.of(gamma, q), (left,), main=q, eigen=fresh)
    stored = Derivation("BotL", Sequent.of(gamma, pi))
    config = OmegaCutConfig(gamma, q, left, {gamma: stored}, pi)
    reduced = omega_cut_reduce(config, logger)
    membership = omega_membership(q, gamma, SearchBudget(max_depth=4), logger=logger)
    unprovable = omega_membership(q, [], SearchBudget(max_depth=8), logger=logger)
    return {
        "q": q,
        "gamma": sorted(str(f) for f in gamma),
        "left_premise": left_side,
        "left_premise_valid": not check(left_side, LIP(0)),
        "reduced": reduced,
        "endsequent": Sequent.of(gamma, pi),
        "same_endsequent": reduced.conclusion == Sequent.of(gamma, pi),
        "certified": isinstance(membership, Member),
        "empty_context": str(unprovable),
    }
