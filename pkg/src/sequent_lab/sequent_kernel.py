"""Sequents, derivations and the checker of the calculi LI, LIP(n) and LIT.

Antecedents are sets: `Γ, φ` is `Γ ∪ {φ}`, so the main formula of a left rule may or may not be
kept in the premises. Derivations carry every witness (main formula, instantiating term or abstract,
eigenvariable, disjunct index); the checker never searches.
"""
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple, Union

from pydantic import BaseModel

from sequent_lab.errors import InvalidDerivation, LevelViolation
from sequent_lab.formula_core import (
    BOT,
    NOT_PARAMETER_FREE,
    Abstract,
    Binary,
    Bot,
    Formula,
    Quant,
    Quant2,
    Term,
    Var,
    fresh_name,
    is_locally_closed,
    is_locally_closed_abstract,
    is_locally_closed_term,
    level_at_most,
    open_set,
    open_term,
    replace_var_in_term,
    substitute_set,
    substitute_set_abstract,
    substitute_term,
    substitute_term_abstract,
    term_vars,
)

RULE_ARITY: Dict[str, int] = {
    "Id": 0,
    "Cut": 2,
    "BotL": 0,
    "BotR": 1,
    "AndL": 1,
    "AndR": 2,
    "OrL": 2,
    "OrR": 1,
    "ImpL": 2,
    "ImpR": 1,
    "AllL": 1,
    "AllR": 1,
    "ExL": 1,
    "ExR": 1,
    "All2L": 1,
    "All2R": 1,
    "Ex2L": 1,
    "Ex2R": 1,
}
SECOND_ORDER_RULES = frozenset(["All2L", "All2R", "Ex2L", "Ex2R"])
TERM_EIGEN_RULES = frozenset(["AllR", "ExL"])
SET_EIGEN_RULES = frozenset(["All2R", "Ex2L"])


def _sort_key(f: Formula) -> str:
    return f.text


@dataclass(frozen=True, eq=False)
class Sequent:
    """`Γ ⇒ Π` with a set antecedent, kept sorted by formula text, and an optional succedent"""

    antecedent: Tuple[Formula, ...] = ()
    succedent: Optional[Formula] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "antecedent", tuple(sorted(set(self.antecedent), key=_sort_key)))

    @classmethod
    def of(cls, antecedent: Iterable[Formula] = (), succedent: Optional[Formula] = None) -> "Sequent":
        return cls(tuple(antecedent), succedent)

    @cached_property
    def ante(self) -> FrozenSet[Formula]:
        return frozenset(self.antecedent)

    @cached_property
    def _key(self) -> Tuple[FrozenSet[Formula], Optional[Formula]]:
        return (self.ante, self.succedent)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Sequent) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def formulas(self) -> Tuple[Formula, ...]:
        return self.antecedent + ((self.succedent,) if self.succedent is not None else ())

    @cached_property
    def free_term_vars(self) -> FrozenSet[str]:
        found: FrozenSet[str] = frozenset()
        for f in self.formulas():
            found |= f.free_term_vars
        return found

    @cached_property
    def free_set_vars(self) -> FrozenSet[str]:
        found: FrozenSet[str] = frozenset()
        for f in self.formulas():
            found |= f.free_set_vars
        return found

    def add(self, formulas: Iterable[Formula]) -> "Sequent":
        return Sequent(self.antecedent + tuple(formulas), self.succedent)

    def remove(self, formula: Formula) -> "Sequent":
        return Sequent(tuple(f for f in self.antecedent if f != formula), self.succedent)

    def with_succedent(self, succedent: Optional[Formula]) -> "Sequent":
        return Sequent(self.antecedent, succedent)

    def map(self, fn: Callable[[Formula], Formula]) -> "Sequent":
        return Sequent(
            tuple(fn(f) for f in self.antecedent), fn(self.succedent) if self.succedent is not None else None
        )

    def __str__(self) -> str:
        left = ", ".join(f.text for f in self.antecedent)
        right = self.succedent.text if self.succedent is not None else ""
        return f"{left} |- {right}".strip()

    def __repr__(self) -> str:
        return f"Sequent({self})"


@dataclass(frozen=True)
class Derivation:
    """
    A finite proof tree labelled by rule names of the calculus.

    `main` is the principal formula of the rule (the axiom formula for `Id`, the cut formula for `Cut`),
    `term` instantiates `AllL`/`ExR`, `abstract` instantiates `All2L`/`Ex2R`, `eigen` is the
    eigenvariable of `AllR`/`ExL`/`All2R`/`Ex2L` and `index` (1 or 2) selects the component of
    `AndL`/`OrR`.
    """

    rule: str
    conclusion: Sequent
    premises: Tuple["Derivation", ...] = ()
    main: Optional[Formula] = None
    term: Optional[Term] = None
    abstract: Optional[Abstract] = None
    eigen: Optional[str] = None
    index: Optional[int] = None
    _cache: Dict[str, object] = field(default_factory=dict, compare=False, hash=False, repr=False)

    @property
    def premise(self) -> "Derivation":
        return self.premises[0]

    def nodes(self) -> Iterator["Derivation"]:
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.premises))

    def node_count(self) -> int:
        if "count" not in self._cache:
            self._cache["count"] = 1 + sum(p.node_count() for p in self.premises)
        return self._cache["count"]  # type: ignore

    def height(self) -> int:
        return 1 + max((p.height() for p in self.premises), default=0)

    def __str__(self) -> str:
        from sequent_lab.grammar import format_derivation

        return format_derivation(self)


def node_count(d: Derivation) -> int:
    return d.node_count()


def cuts(d: Derivation) -> Iterator[Derivation]:
    return (n for n in d.nodes() if n.rule == "Cut")


def is_cut_free(d: Derivation) -> bool:
    return next(cuts(d), None) is None


def max_cut_rank(d: Derivation) -> int:
    """Largest rank of a cut formula, -1 when cut-free"""
    return max((n.main.rank for n in cuts(d) if n.main is not None), default=-1)


def term_names(d: Derivation) -> FrozenSet[str]:
    """Every term variable name mentioned anywhere in a derivation"""
    cached = d._cache.get("term_names")
    if cached is None:
        names: Set[str] = set(d.conclusion.free_term_vars)
        if d.eigen is not None and d.rule in TERM_EIGEN_RULES:
            names.add(d.eigen)
        if d.term is not None:
            names |= term_vars(d.term)
        if d.abstract is not None:
            names |= d.abstract.free_term_vars
        for p in d.premises:
            names |= term_names(p)
        cached = d._cache["term_names"] = frozenset(names)
    return cached  # type: ignore


def set_names(d: Derivation) -> FrozenSet[str]:
    cached = d._cache.get("set_names")
    if cached is None:
        names: Set[str] = set(d.conclusion.free_set_vars)
        if d.eigen is not None and d.rule in SET_EIGEN_RULES:
            names.add(d.eigen)
        if d.abstract is not None:
            names |= d.abstract.free_set_vars
        for p in d.premises:
            names |= set_names(p)
        cached = d._cache["set_names"] = frozenset(names)
    return cached  # type: ignore


## Calculi


@dataclass(frozen=True)
class CalculusId:
    """`LI`, `LIP(n)` or `LIT`"""

    name: str
    n: Optional[int] = None

    def __str__(self) -> str:
        return f"LIP{self.n}" if self.name == "LIP" else self.name

    def max_level(self) -> Optional[int]:
        if self.name == "LI":
            return -1
        if self.name == "LIP":
            return self.n
        return None

    @classmethod
    def parse(cls, text: str) -> "CalculusId":
        text = text.strip()
        if text == "LI":
            return LI
        if text == "LIT":
            return LIT
        if text.startswith("LIP"):
            digits = text[3:].strip("()")
            if digits.isdigit():
                return LIP(int(digits))
        raise ValueError(f"Unknown calculus {text!r}, expected LI, LIP<n> or LIT")


LI = CalculusId("LI")
LIT = CalculusId("LIT")


def LIP(n: int) -> CalculusId:  # noqa: N802
    return CalculusId("LIP", n)


## Checker


class Violation(BaseModel):
    """A node failing its rule schema; `path` lists premise positions from the root"""

    path: str
    rule: str
    reason: str

    def __str__(self) -> str:
        return f"at {self.path or 'root'} ({self.rule}): {self.reason}"


def _context_ok(parts: Sequence[Tuple[Sequent, Optional[Formula]]]) -> bool:
    """
    Is there one Γ with S = Γ ∪ {added} for every (S, added) pair?

    Γ must contain S minus its added formula and lie inside every S.
    """
    lower: Set[Formula] = set()
    upper: Optional[FrozenSet[Formula]] = None
    for sequent, added in parts:
        if added is not None:
            if added not in sequent.ante:
                return False
            lower |= sequent.ante - {added}
        else:
            lower |= sequent.ante
        upper = sequent.ante if upper is None else upper & sequent.ante
    return upper is None or lower <= upper


def _shape(main: Optional[Formula], cls: type, tag: Optional[str] = None) -> bool:
    if not isinstance(main, cls):
        return False
    if tag is None:
        return True
    return getattr(main, "op", getattr(main, "kind", None)) == tag


def _component(main: Binary, index: Optional[int]) -> Optional[Formula]:
    if index == 1:
        return main.left
    if index == 2:
        return main.right
    return None


def _node_reasons(d: Derivation, calculus: CalculusId) -> List[str]:
    rule = d.rule
    if rule not in RULE_ARITY:
        return [f"unknown rule {rule}"]
    if len(d.premises) != RULE_ARITY[rule]:
        return [f"expects {RULE_ARITY[rule]} premises, found {len(d.premises)}"]
    reasons = _calculus_reasons(d, calculus)
    c = d.conclusion
    ps = [p.conclusion for p in d.premises]
    main = d.main

    if rule == "Id":
        if main is None or main not in c.ante or c.succedent != main:
            reasons.append("axiom formula must occur on both sides")
    elif rule == "BotL":
        if BOT not in c.ante:
            reasons.append("⊥ missing from the antecedent")
    elif rule == "BotR":
        if c.succedent != BOT or ps[0].succedent is not None or ps[0].ante != c.ante:
            reasons.append("expects Γ ⇒ (empty) above Γ ⇒ ⊥")
    elif rule == "Cut":
        if main is None:
            reasons.append("missing cut formula")
        elif ps[0].succedent != main or ps[1].succedent != c.succedent:
            reasons.append("premise succedents do not match the cut formula")
        elif not _context_ok([(c, None), (ps[0], None), (ps[1], main)]):
            reasons.append("contexts do not match")
    elif rule == "AndL":
        if not _shape(main, Binary, "&") or d.index not in (1, 2):
            reasons.append("expects a conjunction and an index 1 or 2")
        elif ps[0].succedent != c.succedent:
            reasons.append("succedent changed")
        elif not _context_ok([(c, main), (ps[0], _component(main, d.index))]):  # type: ignore
            reasons.append("contexts do not match")
    elif rule == "AndR":
        if not _shape(main, Binary, "&") or c.succedent != main:
            reasons.append("succedent must be the conjunction")
        elif ps[0].succedent != main.left or ps[1].succedent != main.right:  # type: ignore
            reasons.append("premises must prove both conjuncts")
        elif not _context_ok([(c, None), (ps[0], None), (ps[1], None)]):
            reasons.append("contexts do not match")
    elif rule == "OrL":
        if not _shape(main, Binary, "|"):
            reasons.append("expects a disjunction")
        elif ps[0].succedent != c.succedent or ps[1].succedent != c.succedent:
            reasons.append("succedent changed")
        elif not _context_ok([(c, main), (ps[0], main.left), (ps[1], main.right)]):  # type: ignore
            reasons.append("contexts do not match")
    elif rule == "OrR":
        if not _shape(main, Binary, "|") or c.succedent != main or d.index not in (1, 2):
            reasons.append("succedent must be the disjunction, index 1 or 2")
        elif ps[0].succedent != _component(main, d.index):  # type: ignore
            reasons.append("premise must prove the chosen disjunct")
        elif not _context_ok([(c, None), (ps[0], None)]):
            reasons.append("contexts do not match")
    elif rule == "ImpL":
        if not _shape(main, Binary, "->"):
            reasons.append("expects an implication")
        elif ps[0].succedent != main.left or ps[1].succedent != c.succedent:  # type: ignore
            reasons.append("premise succedents do not match")
        elif not _context_ok([(c, main), (ps[0], None), (ps[1], main.right)]):  # type: ignore
            reasons.append("contexts do not match")
    elif rule == "ImpR":
        if not _shape(main, Binary, "->") or c.succedent != main:
            reasons.append("succedent must be the implication")
        elif ps[0].succedent != main.right:  # type: ignore
            reasons.append("premise must prove the consequent")
        elif not _context_ok([(c, None), (ps[0], main.left)]):  # type: ignore
            reasons.append("contexts do not match")
    elif rule in ("AllL", "ExR"):
        kind = "all" if rule == "AllL" else "ex"
        if not _shape(main, Quant, kind) or d.term is None:
            reasons.append(f"expects a {kind} formula and an instantiating term")
        elif not is_locally_closed_term(d.term):
            reasons.append("instantiating term is not closed under binders")
        else:
            minor = open_term(main.body, d.term)  # type: ignore
            if rule == "AllL":
                if ps[0].succedent != c.succedent:
                    reasons.append("succedent changed")
                elif not _context_ok([(c, main), (ps[0], minor)]):
                    reasons.append("contexts do not match")
            elif c.succedent != main or ps[0].succedent != minor:
                reasons.append("premise must prove the instance")
            elif not _context_ok([(c, None), (ps[0], None)]):
                reasons.append("contexts do not match")
    elif rule in ("AllR", "ExL"):
        kind = "all" if rule == "AllR" else "ex"
        if not _shape(main, Quant, kind) or not d.eigen:
            reasons.append(f"expects a {kind} formula and an eigenvariable")
        else:
            minor = open_term(main.body, Var(d.eigen))  # type: ignore
            if d.eigen in c.free_term_vars or d.eigen in main.free_term_vars:  # type: ignore
                reasons.append(f"eigenvariable occurs free: {d.eigen}")
            elif rule == "AllR":
                if c.succedent != main or ps[0].succedent != minor:
                    reasons.append("premise must prove the eigen-instance")
                elif not _context_ok([(c, None), (ps[0], None)]):
                    reasons.append("contexts do not match")
            elif ps[0].succedent != c.succedent:
                reasons.append("succedent changed")
            elif not _context_ok([(c, main), (ps[0], minor)]):
                reasons.append("contexts do not match")
    elif rule in ("All2L", "Ex2R"):
        kind = "All" if rule == "All2L" else "Ex"
        if not _shape(main, Quant2, kind) or d.abstract is None:
            reasons.append(f"expects an {kind} formula and an abstract")
        elif not is_locally_closed_abstract(d.abstract):
            reasons.append("abstract is not closed under binders")
        else:
            minor = open_set(main.body, d.abstract)  # type: ignore
            if rule == "All2L":
                if ps[0].succedent != c.succedent:
                    reasons.append("succedent changed")
                elif not _context_ok([(c, main), (ps[0], minor)]):
                    reasons.append("contexts do not match")
            elif c.succedent != main or ps[0].succedent != minor:
                reasons.append("premise must prove the instance")
            elif not _context_ok([(c, None), (ps[0], None)]):
                reasons.append("contexts do not match")
            max_level = calculus.max_level()
            if calculus.name == "LIP" and max_level is not None:
                if not level_at_most(main, max_level) or not level_at_most(minor, max_level):  # type: ignore
                    reasons.append(f"main and minor formula must both be at level ≤ {max_level}")
    elif rule in ("All2R", "Ex2L"):
        kind = "All" if rule == "All2R" else "Ex"
        if not _shape(main, Quant2, kind) or not d.eigen:
            reasons.append(f"expects an {kind} formula and an eigenvariable")
        else:
            minor = open_set(main.body, d.eigen)  # type: ignore
            if d.eigen in c.free_set_vars:
                reasons.append(f"eigenvariable occurs free: {d.eigen}")
            elif rule == "All2R":
                if c.succedent != main or ps[0].succedent != minor:
                    reasons.append("premise must prove the eigen-instance")
                elif not _context_ok([(c, None), (ps[0], None)]):
                    reasons.append("contexts do not match")
            elif ps[0].succedent != c.succedent:
                reasons.append("succedent changed")
            elif not _context_ok([(c, main), (ps[0], minor)]):
                reasons.append("contexts do not match")
    return reasons


def _calculus_reasons(d: Derivation, calculus: CalculusId) -> List[str]:
    reasons = []
    if calculus.name == "LI" and d.rule in SECOND_ORDER_RULES:
        reasons.append("second-order rule outside LI")
    max_level = calculus.max_level()
    for f in d.conclusion.formulas():
        if not is_locally_closed(f):
            reasons.append(f"formula has a dangling bound index: {f}")
        elif max_level is not None and not level_at_most(f, max_level):
            lv = f.level
            shown = "not parameter-free" if lv is NOT_PARAMETER_FREE else f"level {lv}"
            reasons.append(f"formula outside {calculus} ({shown}): {f}")
    return reasons


def check(d: Derivation, calculus: CalculusId = LIT) -> List[Violation]:
    """
    Check every node of a derivation against its rule schema in the given calculus.

    Parameters:
        d: Derivation to check
        calculus: LI, LIP(n) or LIT

    Returns:
        violations: Empty when the derivation is correct, otherwise one entry per faulty node
    """
    violations: List[Violation] = []
    stack: List[Tuple[Derivation, str]] = [(d, "")]
    while stack:
        node, path = stack.pop()
        for reason in _node_reasons(node, calculus):
            violations.append(Violation(path=path, rule=node.rule, reason=reason))
        for i, premise in reversed(list(enumerate(node.premises))):
            stack.append((premise, f"{path}.{i}" if path else str(i)))
    return violations


def is_valid(d: Derivation, calculus: CalculusId = LIT) -> bool:
    return not check(d, calculus)


def require_valid(d: Derivation, calculus: CalculusId) -> None:
    violations = check(d, calculus)
    if violations:
        raise InvalidDerivation(f"Derivation is not valid in {calculus}: {violations[0]}", violations)


## Admissible transformations


def weaken(d: Derivation, extra: Iterable[Formula]) -> Derivation:
    """
    From a derivation of Γ ⇒ Π build one of Γ, Γ′ ⇒ Π by adding Γ′ to every antecedent.

    Eigenvariables that occur free in Γ′ are renamed to fresh names first.

    Parameters:
        d: A checker-valid derivation
        extra: The formulas Γ′ to add

    Returns:
        d: The weakened derivation, `d` itself when nothing is added
    """
    extra = frozenset(extra)
    if extra <= d.conclusion.ante:
        if all(extra <= n.conclusion.ante for n in d.nodes()):
            return d
    extra_terms: Set[str] = set()
    extra_sets: Set[str] = set()
    for f in extra:
        extra_terms |= f.free_term_vars
        extra_sets |= f.free_set_vars
    avoid_terms = set(term_names(d)) | extra_terms
    avoid_sets = set(set_names(d)) | extra_sets
    return _weaken(d, extra, extra_terms, extra_sets, avoid_terms, avoid_sets)


def _weaken(
    d: Derivation,
    extra: FrozenSet[Formula],
    extra_terms: Set[str],
    extra_sets: Set[str],
    avoid_terms: Set[str],
    avoid_sets: Set[str],
) -> Derivation:
    premises = d.premises
    eigen = d.eigen
    if d.rule in TERM_EIGEN_RULES and eigen in extra_terms:
        new = fresh_name(eigen, avoid_terms)  # type: ignore
        avoid_terms.add(new)
        premises = (substitute_derivation(premises[0], eigen, Var(new)),)  # type: ignore
        eigen = new
    elif d.rule in SET_EIGEN_RULES and eigen in extra_sets:
        new = fresh_name(eigen, avoid_sets)  # type: ignore
        avoid_sets.add(new)
        premises = (substitute_derivation(premises[0], eigen, new),)  # type: ignore
        eigen = new
    return replace(
        d,
        conclusion=d.conclusion.add(extra),
        premises=tuple(_weaken(p, extra, extra_terms, extra_sets, avoid_terms, avoid_sets) for p in premises),
        eigen=eigen,
        _cache={},
    )


def weaken_to(d: Derivation, antecedent: Iterable[Formula]) -> Derivation:
    """Weaken so that the endsequent antecedent becomes exactly the given superset"""
    return weaken(d, frozenset(antecedent) - d.conclusion.ante)


Binding = Union[Term, Abstract, str]


def substitute_derivation(
    d: Derivation, var: str, value: Binding, calculus: Optional[CalculusId] = None
) -> Derivation:
    """
    Apply a term substitution (`var` a term variable, `value` a Term) or a set substitution
    (`var` a set variable, `value` an Abstract or another set variable name) to a whole derivation.

    Eigenvariables equal to `var` or free in `value` are renamed fresh in their subderivation first,
    so the result passes the checker whenever `d` does.

    Parameters:
        d: A checker-valid derivation
        var: Variable to replace
        value: Term, Abstract or set variable name
        calculus: When given, set bindings must stay inside its level

    Returns:
        d: The derivation of the substituted endsequent
    """
    if isinstance(value, (Abstract, str)) and calculus is not None:
        max_level = calculus.max_level()
        if isinstance(value, Abstract) and max_level is not None and not level_at_most(value.body, max_level):
            raise LevelViolation(f"Abstract {value} exceeds the level of {calculus}")
    is_set = isinstance(value, (Abstract, str))
    if is_set:
        value_terms = set(value.free_term_vars) if isinstance(value, Abstract) else set()
        value_sets = set(value.free_set_vars) if isinstance(value, Abstract) else {value}  # type: ignore
    else:
        value_terms = set(term_vars(value))  # type: ignore
        value_sets = set()
    avoid_terms = set(term_names(d)) | value_terms | ({var} if not is_set else set())
    avoid_sets = set(set_names(d)) | value_sets | ({var} if is_set else set())
    return _substitute(d, var, value, is_set, value_terms, value_sets, avoid_terms, avoid_sets)


def _substitute(
    d: Derivation,
    var: str,
    value: Binding,
    is_set: bool,
    value_terms: Set[str],
    value_sets: Set[str],
    avoid_terms: Set[str],
    avoid_sets: Set[str],
) -> Derivation:
    if is_set:
        if var not in d.conclusion.free_set_vars and var not in set_names(d):
            return d
    elif var not in term_names(d):
        return d

    premises = d.premises
    eigen = d.eigen
    if d.rule in TERM_EIGEN_RULES and (eigen in value_terms or (not is_set and eigen == var)):
        new = fresh_name(eigen, avoid_terms)  # type: ignore
        avoid_terms.add(new)
        premises = (substitute_derivation(premises[0], eigen, Var(new)),)  # type: ignore
        eigen = new
    elif d.rule in SET_EIGEN_RULES and (eigen in value_sets or (is_set and eigen == var)):
        new = fresh_name(eigen, avoid_sets)  # type: ignore
        avoid_sets.add(new)
        premises = (substitute_derivation(premises[0], eigen, new),)  # type: ignore
        eigen = new

    if is_set:

        def on_formula(f: Formula) -> Formula:
            return substitute_set(f, var, value)  # type: ignore

        term = d.term
        tau = substitute_set_abstract(d.abstract, var, value) if d.abstract is not None else None  # type: ignore
    else:

        def on_formula(f: Formula) -> Formula:
            return substitute_term(f, var, value)  # type: ignore

        term = replace_var_in_term(d.term, var, value) if d.term is not None else None  # type: ignore
        tau = substitute_term_abstract(d.abstract, var, value) if d.abstract is not None else None  # type: ignore

    return replace(
        d,
        conclusion=d.conclusion.map(on_formula),
        premises=tuple(
            _substitute(p, var, value, is_set, value_terms, value_sets, avoid_terms, avoid_sets) for p in premises
        ),
        main=on_formula(d.main) if d.main is not None else None,
        term=term,
        abstract=tau,
        eigen=eigen,
        _cache={},
    )


def weaken_succedent(d: Derivation, succedent: Formula) -> Derivation:
    """From a derivation of Γ ⇒ (empty) build one of Γ ⇒ ψ, replaying it with ψ on the right"""
    if d.conclusion.succedent is not None:
        raise InvalidDerivation("Right weakening needs an empty succedent")
    return _weaken_right(
        d, succedent, set(term_names(d)) | succedent.free_term_vars, set(set_names(d)) | succedent.free_set_vars
    )


def _weaken_right(d: Derivation, psi: Formula, avoid_terms: Set[str], avoid_sets: Set[str]) -> Derivation:
    c = d.conclusion
    if c.succedent is not None:
        return d
    if d.rule == "BotL":
        return replace(d, conclusion=c.with_succedent(psi), _cache={})
    premises = list(d.premises)
    eigen = d.eigen
    if d.rule == "ExL" and eigen in psi.free_term_vars:
        new = fresh_name(eigen, avoid_terms)  # type: ignore
        avoid_terms.add(new)
        premises[0] = substitute_derivation(premises[0], eigen, Var(new))  # type: ignore
        eigen = new
    elif d.rule == "Ex2L" and eigen in psi.free_set_vars:
        new = fresh_name(eigen, avoid_sets)  # type: ignore
        avoid_sets.add(new)
        premises[0] = substitute_derivation(premises[0], eigen, new)  # type: ignore
        eigen = new
    # premises sharing the empty succedent carry ψ as well; premises with their own succedent are kept
    new_premises = tuple(_weaken_right(p, psi, avoid_terms, avoid_sets) for p in premises)
    return replace(d, conclusion=c.with_succedent(psi), premises=new_premises, eigen=eigen, _cache={})


def endsequent(d: Derivation) -> Sequent:
    return d.conclusion


def formulas_of(d: Derivation) -> Set[Formula]:
    found: Set[Formula] = set()
    for node in d.nodes():
        found |= set(node.conclusion.formulas())
    return found


def is_first_order(d: Derivation) -> bool:
    return all(f.level == -1 for f in formulas_of(d)) and not any(n.rule in SECOND_ORDER_RULES for n in d.nodes())


__all__ = [
    "BOT",
    "Bot",
    "CalculusId",
    "Derivation",
    "LI",
    "LIP",
    "LIT",
    "Sequent",
    "Violation",
    "check",
    "cuts",
    "is_cut_free",
    "is_valid",
    "max_cut_rank",
    "node_count",
    "require_valid",
    "substitute_derivation",
    "weaken",
    "weaken_succedent",
    "weaken_to",
]
