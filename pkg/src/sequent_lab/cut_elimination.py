"""Rank-stratified cut elimination for LI, and Craig interpolation on cut-free LI derivations.

A pass removes every cut of the current maximal rank m: the derivation is rebuilt bottom-up and each
rank-m cut is replaced by `reduce`, which permutes the cut upwards (right premise first) until both
sides introduce the cut formula, then replaces it by cuts on its immediate subformulas. Cuts of rank
below m are kept. Passes repeat until no cut is left.
"""
from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

from pydantic import BaseModel

from sequent_lab import tactics
from sequent_lab.errors import InvalidDerivation, InvalidPartition, LevelViolation, NotCutFree
from sequent_lab.formula_core import (
    BOT,
    TOP,
    Binary,
    Bot,
    Formula,
    Var,
    exists,
    forall,
    fresh_name,
    open_term,
    predicates_of,
)
from sequent_lab.lab_logger import LabLogger, get_logger
from sequent_lab.proof_search import SearchBudget, search_cutfree
from sequent_lab.sequent_kernel import (
    LI,
    Derivation,
    Sequent,
    check,
    is_cut_free,
    is_first_order,
    max_cut_rank,
    substitute_derivation,
    term_names,
    weaken,
    weaken_succedent,
    weaken_to,
)

LEFT_RULES = frozenset(["AndL", "OrL", "ImpL", "AllL", "ExL"])
RIGHT_RULES = frozenset(["AndR", "OrR", "ImpR", "AllR", "ExR", "BotR"])


@dataclass(frozen=True)
class RankBudget:
    """A derivation is within budget m when every cut formula has rank below m"""

    m: int

    def admits(self, d: Derivation) -> bool:
        return max_cut_rank(d) < self.m


class EliminationReport(BaseModel):
    passes: int = 0
    pass_ranks: List[int] = []
    nodes_before: int = 0
    nodes_after: int = 0


def added_formulas(d: Derivation) -> List[Optional[Formula]]:
    """For each premise, the formula the rule adds to its antecedent (None if the premise keeps the context)"""
    main = d.main
    rule = d.rule
    if rule == "Cut":
        return [None, main]
    if rule == "AndL":
        return [main.left if d.index == 1 else main.right]  # type: ignore
    if rule == "OrL":
        return [main.left, main.right]  # type: ignore
    if rule == "ImpL":
        return [None, main.right]  # type: ignore
    if rule == "ImpR":
        return [main.left]  # type: ignore
    if rule == "AllL":
        return [open_term(main.body, d.term)]  # type: ignore
    if rule == "ExL":
        return [open_term(main.body, Var(d.eigen))]  # type: ignore
    return [None] * len(d.premises)


def _principal_left(d: Derivation, phi: Formula) -> bool:
    """Does the last rule of d act on φ in the antecedent?"""
    if d.rule in LEFT_RULES:
        return d.main == phi
    if d.rule == "BotL":
        return isinstance(phi, Bot)
    return False


class _Reducer:
    def __init__(self, rank: int) -> None:
        self.rank = rank

    def _rename_eigen(self, d: Derivation, avoid: Set[str]) -> Derivation:
        """Rename the eigenvariable of d when it clashes with `avoid`"""
        if d.rule not in ("AllR", "ExL") or d.eigen not in avoid:
            return d
        new = fresh_name(d.eigen, avoid | set(term_names(d)))  # type: ignore
        premise = substitute_derivation(d.premises[0], d.eigen, Var(new))  # type: ignore
        return replace(d, premises=(premise,), eigen=new, _cache={})

    def reduce(self, left: Derivation, right: Derivation) -> Derivation:
        """From Γ ⇒ φ and Δ ⇒ Π derive Γ, Δ∖{φ} ⇒ Π with cuts of rank below `self.rank` only"""
        phi = left.conclusion.succedent
        assert phi is not None
        gamma = left.conclusion.ante
        delta = right.conclusion.ante
        target = Sequent.of(gamma | (delta - {phi}), right.conclusion.succedent)
        if phi not in delta or phi in gamma:
            return weaken_to(right, target.ante)
        size = left.node_count() + right.node_count()

        if not _principal_left(right, phi) and not (right.rule == "Id" and right.main == phi):
            result = self._permute_right(left, right, phi, target, size)
        elif right.rule == "Id":
            result = weaken_to(left, target.ante)
        elif left.rule in RIGHT_RULES:
            result = self._principal(left, right, phi, target, size)
        else:
            result = self._permute_left(left, right, phi, target, size)
        result = weaken_to(result, target.ante)
        assert result.conclusion == target, f"{result.conclusion} != {target}"
        return result

    def _permute_right(
        self, left: Derivation, right: Derivation, phi: Formula, target: Sequent, size: int
    ) -> Derivation:
        if right.rule == "Id":
            return Derivation("Id", target, main=right.main)
        if right.rule == "BotL":
            return Derivation("BotL", target)
        right = self._rename_eigen(right, set(left.conclusion.free_term_vars) | set(term_names(left)))
        premises = []
        for premise, added in zip(right.premises, added_formulas(right)):
            if phi in premise.conclusion.ante and added != phi:
                assert left.node_count() + premise.node_count() < size
                premises.append(self.reduce(left, premise))
            else:
                premises.append(weaken(premise, left.conclusion.ante))
        return replace(right, conclusion=target, premises=tuple(premises), _cache={})

    def _permute_left(
        self, left: Derivation, right: Derivation, phi: Formula, target: Sequent, size: int
    ) -> Derivation:
        if left.rule == "BotL":
            return Derivation("BotL", target)
        rest = right.conclusion.ante - {phi}
        left = self._rename_eigen(left, set(term_names(right)))
        # only the premises sharing the succedent φ of `left` carry Π afterwards
        sharing = (1,) if left.rule in ("ImpL", "Cut") else tuple(range(len(left.premises)))
        premises = []
        for i, premise in enumerate(left.premises):
            if i in sharing:
                assert premise.node_count() + right.node_count() < size
                premises.append(self.reduce(premise, right))
            else:
                premises.append(weaken(premise, rest))
        return replace(left, conclusion=target, premises=tuple(premises), _cache={})

    def _strip(self, left: Derivation, right: Derivation, phi: Formula) -> List[Derivation]:
        """Remove a retained copy of φ from the premises of a rule that introduces φ on the left"""
        stripped = []
        for premise, added in zip(right.premises, added_formulas(right)):
            if phi in premise.conclusion.ante and added != phi:
                stripped.append(self.reduce(left, premise))
            else:
                stripped.append(weaken(premise, left.conclusion.ante))
        return stripped

    def _principal(
        self, left: Derivation, right: Derivation, phi: Formula, target: Sequent, size: int
    ) -> Derivation:
        if isinstance(phi, Bot):
            assert left.rule == "BotR"
            above = left.premises[0]
            pi = right.conclusion.succedent
            return above if pi is None else weaken_succedent(above, pi)
        if right.rule == "ExL":
            right = self._rename_eigen(right, set(term_names(left)) | set(left.conclusion.free_term_vars) | {right.eigen})  # type: ignore
        premises = self._strip(left, right, phi)
        rule = left.rule
        if rule == "AndR":
            return tactics.cut(left.premises[right.index - 1], premises[0])  # type: ignore
        if rule == "OrR":
            return tactics.cut(left.premises[0], premises[left.index - 1])  # type: ignore
        if rule == "ImpR":
            # cut on the antecedent of φ, then on its consequent
            via_a = tactics.cut(premises[0], left.premises[0])
            return tactics.cut(via_a, premises[1])
        if rule == "AllR":
            instance = substitute_derivation(left.premises[0], left.eigen, right.term)  # type: ignore
            return tactics.cut(instance, premises[0])
        if rule == "ExR":
            instance = substitute_derivation(premises[0], right.eigen, left.term)  # type: ignore
            return tactics.cut(left.premises[0], instance)
        raise InvalidDerivation(f"No principal reduction for {rule} against {right.rule}")


def eliminate_top_rank(d: Derivation, logger: Optional[LabLogger] = None) -> Derivation:
    """One pass: every cut of maximal rank m is replaced, new cuts have rank below m"""
    m = max_cut_rank(d)
    if m < 0:
        return d
    reducer = _Reducer(m)

    def walk(node: Derivation) -> Derivation:
        premises = tuple(walk(p) for p in node.premises)
        if node.rule == "Cut" and node.main is not None and node.main.rank == m:
            left, right = premises
            reduced = reducer.reduce(left, right)
            return weaken_to(reduced, node.conclusion.ante)
        if premises == node.premises:
            return node
        return replace(node, premises=premises, _cache={})

    result = walk(d)
    get_logger(logger).info(f"Removed the cuts of rank {m}, {result.node_count()} nodes")
    return result


def eliminate_cuts_with_report(
    d: Derivation, logger: Optional[LabLogger] = None
) -> Tuple[Derivation, EliminationReport]:
    """
    Eliminate every cut of a valid LI derivation.

    Parameters:
        d: A derivation with `check(d, LI)` empty
        logger: Optional logger, one line per pass

    Returns:
        (derivation, report): A cut-free derivation of the same endsequent, and the pass statistics
    """
    violations = check(d, LI)
    if violations:
        if not is_first_order(d):
            raise LevelViolation("Cut elimination is defined for LI derivations only")
        raise InvalidDerivation(f"Not a valid LI derivation: {violations[0]}", violations)
    report = EliminationReport(nodes_before=d.node_count())
    result = d
    while not is_cut_free(result):
        m = max_cut_rank(result)
        result = eliminate_top_rank(result, logger)
        after = max_cut_rank(result)
        assert after < m, f"cut rank did not decrease ({m} -> {after})"
        report.passes += 1
        report.pass_ranks.append(m)
    report.nodes_after = result.node_count()
    assert result.conclusion == d.conclusion
    return result, report


def eliminate_cuts(d: Derivation, logger: Optional[LabLogger] = None) -> Derivation:
    return eliminate_cuts_with_report(d, logger)[0]


## Interpolation


def _and(a: Formula, b: Formula) -> Formula:
    if a == TOP:
        return b
    if b == TOP:
        return a
    if a == BOT or b == BOT:
        return BOT
    return Binary("&", a, b)


def _or(a: Formula, b: Formula) -> Formula:
    if a == BOT:
        return b
    if b == BOT:
        return a
    if a == TOP or b == TOP:
        return TOP
    return Binary("|", a, b)


def _imp(a: Formula, b: Formula) -> Formula:
    if a == TOP:
        return b
    if a == BOT or b == TOP:
        return TOP
    return Binary("->", a, b)


@dataclass(frozen=True)
class Partition:
    """Split of an endsequent antecedent into a left and a right part; the succedent goes with the right"""

    left: FrozenSet[Formula]
    right: FrozenSet[Formula]
    succedent: Optional[Formula] = None

    def right_formulas(self) -> Set[Formula]:
        return set(self.right) | ({self.succedent} if self.succedent is not None else set())


def _vars(formulas: Iterable[Formula]) -> Set[str]:
    found: Set[str] = set()
    for f in formulas:
        found |= f.free_term_vars
    return found


def _close(interpolant: Formula, part: Partition) -> Formula:
    left_vars = _vars(part.left)
    for v in sorted(interpolant.free_term_vars - left_vars):
        interpolant = forall(v, interpolant)
    right_vars = _vars(part.right_formulas())
    for v in sorted(interpolant.free_term_vars - right_vars):
        interpolant = exists(v, interpolant)
    return interpolant


def _split(premise: Derivation, part: Partition, added: Optional[Formula], on_left: bool) -> Partition:
    ante = premise.conclusion.ante
    left = {f for f in ante if f in part.left}
    if added is not None and on_left:
        left.add(added)
    return Partition(frozenset(left), frozenset(ante - left), premise.conclusion.succedent)


def _interpolate(d: Derivation, part: Partition) -> Formula:
    rule = d.rule
    if rule == "Id":
        result = d.main if d.main in part.left else TOP
    elif rule == "BotL":
        result = BOT if BOT in part.left else TOP
    elif rule == "Cut":
        raise NotCutFree("Interpolation needs a cut-free derivation")
    elif rule in RIGHT_RULES:
        parts = [_split(p, part, a, False) for p, a in zip(d.premises, added_formulas(d))]
        found = [_interpolate(p, q) for p, q in zip(d.premises, parts)]
        result = _and(found[0], found[1]) if rule == "AndR" else found[0]
    elif rule in LEFT_RULES:
        on_left = d.main in part.left
        added = added_formulas(d)
        if rule == "ImpL":
            first, second = d.premises
            if on_left:
                ante = first.conclusion.ante
                swapped_left = frozenset(f for f in ante if f not in part.left)
                swapped = Partition(swapped_left, frozenset(ante - swapped_left), first.conclusion.succedent)
                j = _interpolate(first, swapped)
                i2 = _interpolate(second, _split(second, part, added[1], True))
                result = _imp(j, i2)
            else:
                i1 = _interpolate(first, _split(first, part, None, False))
                i2 = _interpolate(second, _split(second, part, added[1], False))
                result = _and(i1, i2)
        else:
            parts = [_split(p, part, a, on_left) for p, a in zip(d.premises, added)]
            found = [_interpolate(p, q) for p, q in zip(d.premises, parts)]
            if rule == "OrL":
                result = _or(found[0], found[1]) if on_left else _and(found[0], found[1])
            else:
                result = found[0]
    else:
        raise InvalidDerivation(f"Rule {rule} is outside LI")
    return _close(result, part)


def make_partition(d: Derivation, left: Iterable[Formula], right: Iterable[Formula]) -> Partition:
    left = frozenset(left)
    right = frozenset(right)
    ante = d.conclusion.ante
    if (left | right) != ante:
        raise InvalidPartition(f"Partition does not cover the antecedent of {d.conclusion}")
    return Partition(left, right - left, d.conclusion.succedent)


def interpolate(d: Derivation, left: Iterable[Formula], right: Iterable[Formula]) -> Formula:
    """
    Maehara interpolant of a cut-free LI derivation for the partition (left | right ⇒ succedent).

    Parameters:
        d: A valid cut-free LI derivation
        left: Antecedent formulas of the left part
        right: Antecedent formulas of the right part, a formula in both parts counts as left

    Returns:
        interpolant: I with left ⇒ I and I, right ⇒ succedent, in the shared vocabulary
    """
    partition = make_partition(d, left, right)
    if not is_cut_free(d):
        raise NotCutFree("Interpolation needs a cut-free derivation")
    violations = check(d, LI)
    if violations:
        raise InvalidDerivation(f"Not a valid LI derivation: {violations[0]}", violations)
    return _interpolate(d, partition)


@dataclass
class InterpolantCertificate:
    interpolant: Formula
    left_proof: Optional[Derivation] = None
    right_proof: Optional[Derivation] = None
    shared_predicates: bool = False
    shared_variables: bool = False
    notes: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (
            self.left_proof is not None
            and self.right_proof is not None
            and self.shared_predicates
            and self.shared_variables
        )


def certify_interpolant(
    d: Derivation,
    left: Iterable[Formula],
    right: Iterable[Formula],
    interpolant: Formula,
    budget: Optional[SearchBudget] = None,
    logger: Optional[LabLogger] = None,
) -> InterpolantCertificate:
    """Re-establish the three interpolation conditions by search, checking and vocabulary comparison"""
    part = make_partition(d, left, right)
    certificate = InterpolantCertificate(interpolant)
    budget = budget or SearchBudget(max_depth=24, max_nodes=50000)
    first = search_cutfree(Sequent.of(part.left, interpolant), budget, logger)
    if isinstance(first, Derivation) and not check(first, LI):
        certificate.left_proof = first
    else:
        certificate.notes.append("left part does not prove the interpolant within budget")
    second = search_cutfree(Sequent.of(set(part.right) | {interpolant}, part.succedent), budget, logger)
    if isinstance(second, Derivation) and not check(second, LI):
        certificate.right_proof = second
    else:
        certificate.notes.append("interpolant and right part do not prove the succedent within budget")
    left_preds: Set[str] = set()
    for f in part.left:
        left_preds |= predicates_of(f)
    right_preds: Set[str] = set()
    for f in part.right_formulas():
        right_preds |= predicates_of(f)
    certificate.shared_predicates = predicates_of(interpolant) <= (left_preds & right_preds)
    certificate.shared_variables = interpolant.free_term_vars <= (
        _vars(part.left) & _vars(part.right_formulas())
    )
    return certificate


def derive_inconsistency(
    delta: Iterable[Formula], certificate: Derivation, budget: Optional[SearchBudget] = None
) -> Dict[str, object]:
    """
    Given a cut-free certificate of Δ ⇒ φ(Y) whose succedent shares no predicate with Δ, interpolate
    with Δ on the left: the interpolant is built from ⊥ and ⊤ only, so Δ ⇒ ⊥ must follow. The
    resulting derivation of Δ ⇒ ⊥ is found by search and checked.
    """
    delta = frozenset(delta)
    interpolant = interpolate(certificate, delta, frozenset())
    found = search_cutfree(Sequent.of(delta, BOT), budget or SearchBudget(max_depth=16))
    proof = found if isinstance(found, Derivation) and not check(found, LI) else None
    return {"interpolant": interpolant, "inconsistency": proof}


__all__ = [
    "EliminationReport",
    "InterpolantCertificate",
    "Partition",
    "RankBudget",
    "certify_interpolant",
    "derive_inconsistency",
    "eliminate_cuts",
    "eliminate_cuts_with_report",
    "eliminate_top_rank",
    "interpolate",
]
