"""Arithmetic inside the parameter-free calculi: Nn, relativization, induction, least fixed points.

Every generator returns a derivation assembled from the goal-directed constructors of `tactics`; the
tests re-run the checker on each of them in the calculus named by the generator.
"""
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, NamedTuple, Optional, Set, Tuple, Union

import networkx as nx

from sequent_lab import tactics
from sequent_lab.errors import (
    ArityMismatch,
    InvalidDerivation,
    LevelViolation,
    NotPositive,
    UnknownFunctionSymbol,
)
from sequent_lab.formula_core import (
    NOT_PARAMETER_FREE,
    ZERO,
    Abstract,
    Atom,
    Binary,
    Bot,
    Fn,
    Formula,
    Quant,
    Quant2,
    SetAtom,
    Term,
    Var,
    abstract,
    conj,
    conj_all,
    eq,
    exists,
    forall,
    forall2,
    fresh_name,
    functions_of,
    imp,
    instantiate,
    open_set,
    open_term,
    positive_in,
    substitute_set,
    substitute_term,
    succ,
    term_vars,
)
from sequent_lab.sequent_kernel import LI, Derivation, require_valid, substitute_derivation, weaken_to

SetTerm = Union[str, Abstract]


## Definitions


def set_abstract(name: str) -> Abstract:
    """λz.Z(z) for a set variable Z"""
    return abstract("z", SetAtom(name, Var("z")))


def _plug(f: Formula, T: SetTerm) -> Formula:
    return substitute_set(f, "X", T) if T != "X" else f


_U, _V = Var("u"), Var("v")
_SUB_X = forall("u", forall("v", imp(conj(eq(_U, _V), SetAtom("X", _U)), SetAtom("X", _V))))
_SUC_X = forall("u", imp(SetAtom("X", _U), SetAtom("X", succ(_U))))


def sub_of(T: SetTerm) -> Formula:
    """Sub(X) := ∀xy. x=y ∧ X(x) → X(y)"""
    return _plug(_SUB_X, T)


def suc_of(T: SetTerm) -> Formula:
    """Suc(X) := ∀x. X(x) → X(s(x))"""
    return _plug(_SUC_X, T)


def nn(t: Term) -> Formula:
    """Nn(t) := ∀X. Sub(X) ∧ Suc(X) ∧ X(0) → X(t)"""
    return forall2("X", imp(conj_all([_SUB_X, _SUC_X, SetAtom("X", ZERO)]), SetAtom("X", t)))


NN = abstract("z", nn(Var("z")))


def nn_variable(f: Formula) -> Optional[str]:
    """The variable v when f is Nn(v)"""
    if isinstance(f, Quant2) and len(f.free_term_vars) == 1:
        (name,) = f.free_term_vars
        if f == nn(Var(name)):
            return name
    return None


def _check_fixpoint_body(phi: Formula, set_var: str, term_var: str) -> None:
    if phi.level is NOT_PARAMETER_FREE:
        raise LevelViolation(f"Fixed-point body is not parameter-free: {phi}")
    if not phi.free_set_vars <= {set_var}:
        raise LevelViolation(f"Fixed-point body may only use the set variable {set_var}: {phi}")
    if not phi.free_term_vars <= {term_var}:
        raise LevelViolation(f"Fixed-point body may only use the term variable {term_var}: {phi}")
    if not positive_in(phi, set_var):
        raise NotPositive(f"{set_var} occurs negatively in {phi}")


def _closure_clause(phi: Formula, set_var: str, term_var: str) -> Formula:
    """∀x. φ(X, x) → X(x)"""
    return forall(term_var, imp(phi, SetAtom(set_var, Var(term_var))))


def fix_formula(phi: Formula, t: Term, set_var: str = "X", term_var: str = "x") -> Formula:
    """Fix_φ(t) := ∀X. Sub(X) ∧ ∀x(φ(X, x) → X(x)) → X(t)"""
    _check_fixpoint_body(phi, set_var, term_var)
    hypotheses = conj(_plug(_SUB_X, set_var), _closure_clause(phi, set_var, term_var))
    return forall2(set_var, imp(hypotheses, SetAtom(set_var, t)))


def fix_abstract(phi: Formula, set_var: str = "X", term_var: str = "x") -> Abstract:
    return abstract("z", fix_formula(phi, Var("z"), set_var, term_var))


def _subst_vars(t: Term, mapping: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if isinstance(t, Fn):
        return Fn(t.name, tuple(_subst_vars(a, mapping) for a in t.args))
    return t


@dataclass(frozen=True)
class PRDefinition:
    """
    A unary symbol f given by recursion: f(0) = base, f(s(x)) = step, where `step` may use the
    predecessor `x` and the previous value `y`.
    """

    name: str
    base: Term
    step: Term

    def __post_init__(self) -> None:
        if term_vars(self.base):
            raise LevelViolation(f"The base value of {self.name} must be closed, got {self.base}")
        if not term_vars(self.step) <= {"x", "y"}:
            raise LevelViolation(f"The step of {self.name} may only use x and y, got {self.step}")

    def symbols(self) -> Set[str]:
        found: Set[str] = set()
        for t in (self.base, self.step):
            found |= {name for name, arity in _term_functions(t).items() if arity > 0}
        return found

    def step_at(self, x: Term, y: Term) -> Term:
        return _subst_vars(self.step, {"x": x, "y": y})


def _term_functions(t: Term) -> Dict[str, int]:
    found: Dict[str, int] = {}
    if isinstance(t, Fn):
        found[t.name] = len(t.args)
        for a in t.args:
            found.update(_term_functions(a))
    return found


def def_formula(d: PRDefinition) -> Formula:
    """Def(f) := f(0) = c ∧ ∀x. f(s(x)) = h(x, f(x))"""
    x = Var("x")
    fx = Fn(d.name, (x,))
    return conj(eq(Fn(d.name, (ZERO,)), d.base), forall("x", eq(Fn(d.name, (succ(x),)), d.step_at(x, fx))))


PR_LIBRARY: Dict[str, PRDefinition] = {
    "dbl": PRDefinition("dbl", ZERO, succ(succ(Var("y")))),
    "pred": PRDefinition("pred", ZERO, Var("x")),
}


## Equality axioms


def _curried(hyps: List[Formula], conclusion: Formula) -> Formula:
    for h in reversed(hyps):
        conclusion = imp(h, conclusion)
    return conclusion


def _close_all(names: List[str], body: Formula) -> Formula:
    for name in reversed(names):
        body = forall(name, body)
    return body


@dataclass(frozen=True)
class EqAxiomSet:
    """Reflexivity, symmetry and transitivity of =, plus one congruence axiom per listed symbol"""

    functions: Tuple[Tuple[str, int], ...] = ()
    predicates: Tuple[Tuple[str, int], ...] = ()

    @classmethod
    def for_symbols(cls, functions: Mapping[str, int], predicates: Mapping[str, int]) -> "EqAxiomSet":
        return cls(
            tuple(sorted((f, a) for f, a in functions.items() if a > 0)),
            tuple(sorted((p, a) for p, a in predicates.items() if a > 0)),
        )

    @classmethod
    def for_formulas(cls, formulas: Iterable[Formula], extra_functions: Optional[Mapping[str, int]] = None) -> "EqAxiomSet":
        functions: Dict[str, int] = dict(extra_functions or {})
        predicates: Dict[str, int] = {}
        for f in formulas:
            functions.update(functions_of(f))
            predicates.update(_first_order_predicates(f))
        return cls.for_symbols(functions, predicates)

    @cached_property
    def reflexivity(self) -> Formula:
        return forall("u", eq(_U, _U))

    @cached_property
    def symmetry(self) -> Formula:
        return forall("u", forall("v", imp(eq(_U, _V), eq(_V, _U))))

    @cached_property
    def transitivity(self) -> Formula:
        w = Var("w")
        return _close_all(["u", "v", "w"], _curried([eq(_U, _V), eq(_V, w)], eq(_U, w)))

    @cached_property
    def congruences(self) -> Dict[str, Formula]:
        axioms = {}
        for name, arity, is_function in [(f, a, True) for f, a in self.functions] + [
            (p, a, False) for p, a in self.predicates
        ]:
            us = [f"u{i}" for i in range(1, arity + 1)]
            vs = [f"v{i}" for i in range(1, arity + 1)]
            left = tuple(Var(u) for u in us)
            right = tuple(Var(v) for v in vs)
            if is_function:
                goal: Formula = eq(Fn(name, left), Fn(name, right))
            else:
                goal = imp(Atom(name, left), Atom(name, right))
            hyps = [eq(a, b) for a, b in zip(left, right)]
            axioms[name] = _close_all(us + vs, _curried(hyps, goal))
        return axioms

    def congruence(self, symbol: str) -> Formula:
        try:
            return self.congruences[symbol]
        except KeyError:
            raise UnknownFunctionSymbol(f"No congruence axiom for {symbol}") from None

    def formulas(self) -> Tuple[Formula, ...]:
        return (self.reflexivity, self.symmetry, self.transitivity) + tuple(
            self.congruences[name] for name in sorted(self.congruences)
        )


def _first_order_predicates(f: Formula) -> Dict[str, int]:
    """Predicate arities, not looking inside second-order quantifiers"""
    if isinstance(f, Atom):
        return {f.pred: len(f.args)}
    if isinstance(f, Binary):
        return {**_first_order_predicates(f.left), **_first_order_predicates(f.right)}
    if isinstance(f, Quant):
        return _first_order_predicates(f.body)
    return {}


## Derivation building blocks


def _spine(c: Formula, count: int) -> List[Formula]:
    """The conjuncts of a left-nested conjunction of `count` parts"""
    parts = []
    for _ in range(count - 1):
        parts.append(c.right)  # type: ignore
        c = c.left  # type: ignore
    parts.append(c)
    return parts[::-1]


def _intro_spine(c: Formula, count: int) -> Derivation:
    """parts ⇒ c"""
    if count == 1:
        return tactics.axiom(c)
    return tactics.and_right(_intro_spine(c.left, count - 1), tactics.axiom(c.right))  # type: ignore


def _absorb_spine(p: Derivation, c: Formula, count: int) -> Derivation:
    """Replace the conjuncts of c present in the antecedent by c itself"""
    if count == 1:
        return p
    if c.right in p.conclusion.ante:  # type: ignore
        p = tactics.and_left(p, c, 2)
    p = _absorb_spine(p, c.left, count - 1)  # type: ignore
    if c.left in p.conclusion.ante:  # type: ignore
        p = tactics.and_left(p, c, 1)
    return p


def _absorb(p: Derivation, c: Formula) -> Derivation:
    if not (isinstance(c, Binary) and c.op == "&"):
        return p
    for index, part in ((2, c.right), (1, c.left)):
        p = _absorb(p, part)
        if part in p.conclusion.ante:
            p = tactics.and_left(p, c, index)
    return p


def _conjuncts(c: Formula) -> List[Formula]:
    if isinstance(c, Binary) and c.op == "&":
        return _conjuncts(c.left) + _conjuncts(c.right)
    return [c]


def _instances(f: Formula, terms: List[Term]) -> List[Formula]:
    chain = [f]
    for t in terms:
        chain.append(open_term(chain[-1].body, t))  # type: ignore
    return chain


def _all_left_chain(d: Derivation, f: Formula, terms: List[Term]) -> Derivation:
    chain = _instances(f, terms)
    for i in reversed(range(len(terms))):
        d = tactics.all_left(d, chain[i], terms[i])
    return d


def _use_axiom(axiom: Formula, terms: List[Term], premises: List[Derivation], final: Derivation) -> Derivation:
    """
    Instantiate a universally closed chain of implications and discharge its hypotheses.

    `premises[i]` proves the i-th hypothesis of the instance, `final` uses what remains after them.
    """
    imps = [_instances(axiom, terms)[-1]]
    for _ in premises:
        imps.append(imps[-1].right)  # type: ignore
    d = final
    for i in reversed(range(len(premises))):
        d = tactics.imp_left(premises[i], d, imps[i])
    return _all_left_chain(d, axiom, terms)


def eliminate_set_quantifier(q: Formula, T: SetTerm, parts: int) -> Derivation:
    """From q = ∀X. H1 ∧ ... ∧ Hk → X(t): H1(T), ..., Hk(T), q ⇒ T(t)"""
    tau = set_abstract(T) if isinstance(T, str) else T
    instance = open_set(q.body, tau)  # type: ignore
    d = tactics.imp_left(_intro_spine(instance.left, parts), tactics.axiom(instance.right), instance)  # type: ignore
    return tactics.all2_left(d, q, tau)


def _set_names(formulas: Iterable[Formula]) -> Set[str]:
    found: Set[str] = set()
    for f in formulas:
        found |= f.free_set_vars
    return found


def _term_names(formulas: Iterable[Formula]) -> Set[str]:
    found: Set[str] = set()
    for f in formulas:
        found |= f.free_term_vars
    return found


class InductionParts(NamedTuple):
    step: Formula
    base: Formula
    conclusion: Formula
    statement: Formula


class _Builder:
    """Builds derivations over one set of equality axioms and recursive definitions"""

    def __init__(self, axioms: EqAxiomSet, definitions: Optional[Mapping[str, PRDefinition]] = None) -> None:
        self.axioms = axioms
        self.definitions = dict(definitions or {})
        self._cache: Dict[object, Derivation] = {}
        self._lemmas: Dict[str, Tuple[Derivation, Formula]] = {}

    # equality

    def symmetric(self, a: Term, b: Term) -> Derivation:
        """Sym, a=b ⇒ b=a"""
        return _use_axiom(self.axioms.symmetry, [a, b], [tactics.axiom(eq(a, b))], tactics.axiom(eq(b, a)))

    def term_equal(self, t: Term, x: str, y: str) -> Derivation:
        """Γ_eq, x=y ⇒ t = t[y/x]"""
        moved = _subst_vars(t, {x: Var(y)})
        if x not in term_vars(t):
            return _use_axiom(self.axioms.reflexivity, [t], [], tactics.axiom(eq(t, t)))
        if t == Var(x):
            return tactics.axiom(eq(Var(x), Var(y)))
        assert isinstance(t, Fn)
        premises = [self.term_equal(a, x, y) for a in t.args]
        return _use_axiom(
            self.axioms.congruence(t.name), list(t.args) + list(moved.args), premises, tactics.axiom(eq(t, moved))  # type: ignore
        )

    def transport(self, f: Formula, x: str, y: str, hyps: FrozenSet[Formula] = frozenset()) -> Derivation:
        """
        Γ_eq, x=y, y=x, H, f ⇒ f[y/x] with H ⊆ hyps; y must not occur in f.

        A set atom Z(t) moves along x=y only when Sub(Z) is among the hypotheses.
        """
        g = substitute_term(f, x, Var(y))
        if x not in f.free_term_vars:
            return tactics.axiom(f)
        if isinstance(f, Atom):
            premises = [self.term_equal(a, x, y) for a in f.args]
            final = tactics.imp_left(tactics.axiom(f), tactics.axiom(g), imp(f, g))
            return _use_axiom(self.axioms.congruence(f.pred), list(f.args) + list(g.args), premises, final)  # type: ignore
        if isinstance(f, SetAtom):
            assert isinstance(f.var, str)
            hypothesis = sub_of(f.var)
            if hypothesis not in hyps:
                raise InvalidDerivation(f"Cannot move {f} along an equation without Sub({f.var})")
            instance = _instances(hypothesis, [f.arg, g.arg])[-1]  # type: ignore
            left = tactics.and_right(self.term_equal(f.arg, x, y), tactics.axiom(f))
            d = tactics.imp_left(left, tactics.axiom(g), instance)
            return _all_left_chain(d, hypothesis, [f.arg, g.arg])  # type: ignore
        if isinstance(f, Binary):
            if f.op == "->":
                back = self.transport(g.left, y, x, hyps)  # type: ignore
                fwd = self.transport(f.right, x, y, hyps | frozenset(_conjuncts(g.left)))  # type: ignore
                fwd = _absorb(fwd, g.left)  # type: ignore
                return tactics.imp_right(tactics.imp_left(back, fwd, f), g)
            d1 = self.transport(f.left, x, y, hyps)
            d2 = self.transport(f.right, x, y, hyps)
            if f.op == "&":
                return tactics.and_right(tactics.and_left(d1, f, 1), tactics.and_left(d2, f, 2))
            return tactics.or_left(tactics.or_right(d1, g, 1), tactics.or_right(d2, g, 2), f)
        avoid = {x, y} | f.free_term_vars | _term_names(hyps)
        if isinstance(f, Quant):
            z = fresh_name("z", avoid)
            d = self.transport(open_term(f.body, Var(z)), x, y, hyps)
            if f.kind == "all":
                return tactics.all_right(tactics.all_left(d, f, Var(z)), g, z)
            return tactics.ex_left(tactics.ex_right(d, g, Var(z)), f, z)
        if isinstance(f, Quant2):
            name = fresh_name("Z", _set_names(hyps) | f.free_set_vars)
            d = self.transport(open_set(f.body, name), x, y, hyps)
            if f.kind == "All":
                return tactics.all2_right(tactics.all2_left(d, f, set_abstract(name)), g, name)
            return tactics.ex2_left(tactics.ex2_right(d, g, set_abstract(name)), f, name)
        raise InvalidDerivation(f"Cannot transport {f}")

    def substitution_lemma(self, T: SetTerm) -> Derivation:
        """Γ_eq ⇒ Sub(T)"""
        key = ("sub", T)
        if key not in self._cache:
            statement = sub_of(T)
            avoid = statement.free_term_vars
            a = fresh_name("a", avoid)
            b = fresh_name("b", avoid | {a})
            middle = open_term(statement.body, Var(a))  # type: ignore
            instance = open_term(middle.body, Var(b))  # type: ignore
            d = self.transport(instance.left.right, a, b)  # type: ignore
            if eq(Var(b), Var(a)) in d.conclusion.ante:
                d = tactics.cut(self.symmetric(Var(a), Var(b)), d)
            d = _absorb_spine(d, instance.left, 2)  # type: ignore
            d = tactics.imp_right(d, instance)
            self._cache[key] = tactics.all_right(tactics.all_right(d, middle, b), statement, a)
        return self._cache[key]

    # Nn

    def nn_zero(self) -> Derivation:
        """⇒ Nn(0)"""
        goal = nn(ZERO)
        body = open_set(goal.body, "X")  # type: ignore
        d = _absorb_spine(tactics.axiom(body.right), body.left, 3)  # type: ignore
        return tactics.all2_right(tactics.imp_right(d, body), goal, "X")

    def nn_step(self, t: Term) -> Derivation:
        """Nn(t) ⇒ Nn(s(t))"""
        goal = nn(succ(t))
        body = open_set(goal.body, "X")  # type: ignore
        unpacked = eliminate_set_quantifier(nn(t), "X", 3)
        successor = suc_of("X")
        instance = open_term(successor.body, t)  # type: ignore
        step = tactics.all_left(
            tactics.imp_left(tactics.axiom(instance.left), tactics.axiom(instance.right), instance), successor, t  # type: ignore
        )
        d = _absorb_spine(tactics.cut(unpacked, step), body.left, 3)  # type: ignore
        return tactics.all2_right(tactics.imp_right(d, body), goal, "X")

    def successor_lemma(self) -> Derivation:
        """⇒ Suc(Nn)"""
        statement = suc_of(NN)
        instance = open_term(statement.body, Var("a"))  # type: ignore
        return tactics.all_right(tactics.imp_right(self.nn_step(Var("a")), instance), statement, "a")

    def rewrite_nn(self, a: Term, b: Term) -> Derivation:
        """a=b, Nn(a) ⇒ Nn(b)"""
        statement = sub_of(NN)
        instance = _instances(statement, [a, b])[-1]
        left = tactics.and_right(tactics.axiom(eq(a, b)), tactics.axiom(nn(a)))
        d = tactics.imp_left(left, tactics.axiom(nn(b)), instance)
        return tactics.cut(self.substitution_lemma(NN), _all_left_chain(d, statement, [a, b]))

    # induction

    def induction(self, phi: Formula, x: str) -> Tuple[Derivation, InductionParts]:
        """
        Γ_eq ⇒ ∀x(Nn(x) → φ(x) → φ(s(x))) ∧ φ(0) → ∀x(Nn(x) → φ(x)), through the abstract
        τ = λx. φ(x) ∧ Nn(x) and an elimination of Nn(y).
        """
        step = forall(x, imp(nn(Var(x)), imp(phi, substitute_term(phi, x, succ(Var(x))))))
        base = substitute_term(phi, x, ZERO)
        conclusion = forall(x, imp(nn(Var(x)), phi))
        statement = imp(conj(step, base), conclusion)
        parts = InductionParts(step, base, conclusion, statement)

        avoid = phi.free_term_vars | {x}
        y = fresh_name("y", avoid)
        a = fresh_name("a", avoid | {y})
        tau = abstract(x, conj(phi, nn(Var(x))))

        def phi_at(t: Term) -> Formula:
            return substitute_term(phi, x, t)

        core = eliminate_set_quantifier(nn(Var(y)), tau, 3)
        tau_y = instantiate(tau, Var(y))
        core = tactics.cut(core, tactics.and_left(tactics.axiom(phi_at(Var(y))), tau_y, 1))

        # Suc(τ) from the step hypothesis
        succ_a = succ(Var(a))
        step_instance = open_term(step.body, Var(a))  # type: ignore
        inner = tactics.imp_left(tactics.axiom(phi_at(Var(a))), tactics.axiom(phi_at(succ_a)), step_instance.right)  # type: ignore
        d = tactics.imp_left(tactics.axiom(nn(Var(a))), inner, step_instance)
        d = tactics.and_right(tactics.all_left(d, step, Var(a)), self.nn_step(Var(a)))
        d = _absorb_spine(d, instantiate(tau, Var(a)), 2)
        successor = suc_of(tau)
        d = tactics.imp_right(d, open_term(successor.body, Var(a)))  # type: ignore
        successor_proof = tactics.all_right(d, successor, a)

        zero_proof = tactics.and_right(tactics.axiom(base), self.nn_zero())

        d = tactics.cut(self.substitution_lemma(tau), core)
        d = tactics.cut(successor_proof, d)
        d = tactics.cut(zero_proof, d)
        d = tactics.imp_right(d, imp(nn(Var(y)), phi_at(Var(y))))
        d = tactics.all_right(d, conclusion, y)
        d = _absorb_spine(d, statement.left, 2)  # type: ignore
        return tactics.imp_right(d, statement), parts

    # closure of Nn under terms

    def closure(self, t: Term, known: FrozenSet[Term] = frozenset()) -> Derivation:
        """Nn(x⃗), Γ ⇒ Nn(t) for the variables x⃗ of t"""
        if isinstance(t, Var) or t in known:
            return tactics.axiom(nn(t))
        if isinstance(t, Fn) and t.name == "0" and not t.args:
            return self.nn_zero()
        if isinstance(t, Fn) and t.name == "s" and len(t.args) == 1:
            return tactics.cut(self.closure(t.args[0], known), self.nn_step(t.args[0]))
        if isinstance(t, Fn) and t.name in self.definitions and len(t.args) == 1:
            return tactics.cut(self.closure(t.args[0], known), self.recursive_application(t.name, t.args[0]))
        raise UnknownFunctionSymbol(f"No definition for the symbol of {t}")

    def recursive_application(self, name: str, a: Term) -> Derivation:
        """Nn(a), Γ, Def(f) ⇒ Nn(f(a))"""
        lemma, conclusion = self.recursive_lemma(name)
        instance = open_term(conclusion.body, a)  # type: ignore
        d = tactics.imp_left(tactics.axiom(nn(a)), tactics.axiom(instance.right), instance)  # type: ignore
        return tactics.cut(lemma, tactics.all_left(d, conclusion, a))

    def recursive_lemma(self, name: str) -> Tuple[Derivation, Formula]:
        """Γ, Def(f) ⇒ ∀x(Nn(x) → Nn(f(x))), by induction on x"""
        definition = self.definitions[name]
        x = Var("x")
        fx = Fn(name, (x,))
        if name not in self._lemmas:
            definition_formula = def_formula(definition)
            induction, parts = self.induction(nn(fx), "x")

            # Nn(f(0)) from Nn(c) and f(0) = c
            f0 = Fn(name, (ZERO,))
            base_eq = tactics.and_left(tactics.axiom(eq(f0, definition.base)), definition_formula, 1)
            base = tactics.cut(self.closure(definition.base), self.rewrite_nn(definition.base, f0))
            base = tactics.cut(self.symmetric(f0, definition.base), base)
            base = tactics.cut(base_eq, base)

            # Nn(x), Nn(f(x)) ⇒ Nn(f(s(x))) from f(s(x)) = h(x, f(x))
            fsx = Fn(name, (succ(x),))
            h = definition.step_at(x, fx)
            recursion = definition_formula.right  # type: ignore
            step_eq = tactics.all_left(tactics.axiom(eq(fsx, h)), recursion, x)
            step_eq = tactics.and_left(step_eq, definition_formula, 2)
            step = tactics.cut(self.closure(h, frozenset([fx])), self.rewrite_nn(h, fsx))
            step = tactics.cut(self.symmetric(fsx, h), step)
            step = tactics.cut(step_eq, step)
            step_instance = open_term(parts.step.body, x)  # type: ignore
            step = tactics.imp_right(tactics.imp_right(step, step_instance.right), step_instance)  # type: ignore
            step = tactics.all_right(step, parts.step, "x")

            use = tactics.imp_left(tactics.and_right(step, base), tactics.axiom(parts.conclusion), parts.statement)
            self._lemmas[name] = (tactics.cut(induction, use), parts.conclusion)
        return self._lemmas[name]


## Relativization


def _relativize(f: Formula, atoms: Optional[Callable[[Atom], Optional[Formula]]] = None) -> Formula:
    if isinstance(f, Atom):
        replaced = atoms(f) if atoms is not None else None
        return replaced if replaced is not None else f
    if isinstance(f, (SetAtom, Bot, Quant2)):
        return f
    if isinstance(f, Binary):
        return Binary(f.op, _relativize(f.left, atoms), _relativize(f.right, atoms))
    if isinstance(f, Quant):
        z = fresh_name("x", f.free_term_vars)
        body = _relativize(open_term(f.body, Var(z)), atoms)
        guard = nn(Var(z))
        if f.kind == "all":
            return forall(z, imp(guard, body))
        return exists(z, conj(guard, body))
    raise TypeError(f"Not a formula: {f!r}")


def relativize(f: Formula) -> Formula:
    """
    Restrict every first-order quantifier to Nn: ∀x.ψ becomes ∀x.(Nn(x) → ψ) and ∃x.ψ becomes
    ∃x.(Nn(x) ∧ ψ). The result is level 0 whenever the formula has a quantifier, unchanged otherwise.
    """
    if f.level != -1:
        raise LevelViolation(f"Relativization takes first-order formulas, {f} has level {f.level}")
    return _relativize(f)


## Induction and closure lemmas


def _single_variable(f: Formula, x: Optional[str]) -> str:
    names = sorted(f.free_term_vars)
    if len(names) > 1:
        raise LevelViolation(f"Induction formulas have one free variable, {f} has {', '.join(names)}")
    if x is not None:
        return x
    return names[0] if names else fresh_name("x", f.free_term_vars)


def induction_statement(phi: Formula, x: Optional[str] = None) -> Formula:
    """[∀x(φ(x) → φ(s(x))) ∧ φ(0) → ∀y.φ(y)]^Nn"""
    x = _single_variable(phi, x)
    first_order = imp(
        conj(forall(x, imp(phi, substitute_term(phi, x, succ(Var(x))))), substitute_term(phi, x, ZERO)),
        forall(x, phi),
    )
    return relativize(first_order)


def induction_derivation(phi: Formula, x: Optional[str] = None) -> Derivation:
    """
    Derive Γ_eq ⇒ [∀x(φ(x) → φ(s(x))) ∧ φ(0) → ∀y.φ(y)]^Nn in LIP(0).

    Parameters:
        phi: A first-order formula with at most one free variable
        x: The induction variable, defaults to the free variable of phi

    Returns:
        derivation: Its antecedent is exactly the equality axioms for the symbols of phi and s
    """
    if phi.level != -1 or phi.free_set_vars:
        raise LevelViolation(f"Induction formulas are first-order without set variables, got {phi}")
    x = _single_variable(phi, x)
    axioms = EqAxiomSet.for_formulas([phi], {"s": 1})
    d, _ = _Builder(axioms).induction(relativize(phi), x)
    return weaken_to(d, axioms.formulas())


def cc0_derivation(t: Term) -> Derivation:
    """
    Induction for Nn_t(x) := Nn(t(x)):
    Γ_eq ⇒ [∀x∈Nn. Nn_t(x) → Nn_t(s(x))] ∧ Nn_t(0) → ∀y∈Nn. Nn_t(y).
    """
    names = sorted(term_vars(t))
    if len(names) != 1:
        raise LevelViolation(f"Expected a term in one variable, got {t}")
    axioms = EqAxiomSet.for_symbols({**_term_functions(t), "s": 1}, {})
    d, _ = _Builder(axioms).induction(nn(t), names[0])
    return weaken_to(d, axioms.formulas())


def nat_closure_lemmas() -> Dict[str, Derivation]:
    """Γ_eq ⇒ Nn(0), Γ_eq ⇒ Suc(Nn) and Γ_eq ⇒ Sub(Nn)"""
    axioms = EqAxiomSet.for_symbols({"s": 1}, {})
    b = _Builder(axioms)
    gamma = axioms.formulas()
    return {
        "Nn(0)": weaken_to(b.nn_zero(), gamma),
        "Suc(Nn)": weaken_to(b.successor_lemma(), gamma),
        "Sub(Nn)": weaken_to(b.substitution_lemma(NN), gamma),
    }


def _definitions_for(symbols: Iterable[str], definitions: Mapping[str, PRDefinition]) -> Dict[str, PRDefinition]:
    """The definitions of the symbols and of everything their recursions use"""
    needed: Dict[str, PRDefinition] = {}
    uses = nx.DiGraph()
    pending = [s for s in symbols if s not in ("0", "s")]
    while pending:
        name = pending.pop()
        if name in needed:
            continue
        if name not in definitions:
            raise UnknownFunctionSymbol(f"No definition for the function symbol {name}")
        needed[name] = definitions[name]
        uses.add_node(name)
        for used in needed[name].symbols() - {"0", "s"}:
            uses.add_edge(name, used)
            pending.append(used)
    if not nx.is_directed_acyclic_graph(uses):
        cycle = " -> ".join(edge[0] for edge in nx.find_cycle(uses))
        raise UnknownFunctionSymbol(f"Recursive definitions refer to themselves: {cycle}")
    return needed


def _builder_for(terms: Iterable[Term], definitions: Optional[Mapping[str, PRDefinition]]) -> _Builder:
    symbols: Dict[str, int] = {"s": 1}
    for t in terms:
        symbols.update(_term_functions(t))
    used = _definitions_for([f for f, arity in symbols.items() if arity > 0 or f != "0"], PR_LIBRARY if definitions is None else definitions)
    for d in used.values():
        symbols[d.name] = 1
        for t in (d.base, d.step):
            symbols.update(_term_functions(t))
    return _Builder(EqAxiomSet.for_symbols(symbols, {}), used)


def nn_closure(t: Term, definitions: Optional[Mapping[str, PRDefinition]] = None) -> Derivation:
    """
    Nn(x⃗), Γ ⇒ Nn(t) for a term over 0, s, variables and recursively defined symbols; Γ holds the
    equality axioms and Def(f) for each defined symbol once any is used, and is empty otherwise.
    """
    b = _builder_for([t], definitions)
    d = b.closure(t)
    return weaken_to(d, d.conclusion.ante | {nn(Var(v)) for v in term_vars(t)})


## Relativizing derivations


class _Relativizer:
    def __init__(self, builder: _Builder) -> None:
        self.b = builder

    def target(self, node: Derivation) -> Set[Formula]:
        c = node.conclusion
        return {relativize(f) for f in c.antecedent} | {nn(Var(v)) for v in c.free_term_vars}

    def discharge(self, d: Derivation, keep: FrozenSet[str]) -> Derivation:
        """Remove Nn(v) hypotheses of variables outside the conclusion by instantiating them with 0"""
        for f in sorted(d.conclusion.ante, key=str):
            v = nn_variable(f)
            if v is not None and v not in keep:
                d = substitute_derivation(d, v, ZERO)
                d = tactics.cut(self.b.nn_zero(), d)
        return d

    def run(self, node: Derivation) -> Derivation:
        ps = [self.run(p) for p in node.premises]
        c = node.conclusion
        rule = node.rule
        main = relativize(node.main) if node.main is not None else None
        if rule == "Id":
            out = tactics.axiom(main)  # type: ignore
        elif rule == "BotL":
            out = tactics.bot_left(relativize(c.succedent) if c.succedent is not None else None)
        elif rule == "BotR":
            out = tactics.bot_right(ps[0])
        elif rule == "Cut":
            out = tactics.cut(ps[0], ps[1])
        elif rule == "AndL":
            out = tactics.and_left(ps[0], main, node.index)  # type: ignore
        elif rule == "AndR":
            out = tactics.and_right(ps[0], ps[1])
        elif rule == "OrL":
            out = tactics.or_left(ps[0], ps[1], main)  # type: ignore
        elif rule == "OrR":
            out = tactics.or_right(ps[0], main, node.index)  # type: ignore
        elif rule == "ImpL":
            out = tactics.imp_left(ps[0], ps[1], main)  # type: ignore
        elif rule == "ImpR":
            out = tactics.imp_right(ps[0], main)  # type: ignore
        elif rule == "AllL":
            instance = open_term(main.body, node.term)  # type: ignore
            out = tactics.imp_left(self.b.closure(node.term), ps[0], instance)  # type: ignore
            out = tactics.all_left(out, main, node.term)  # type: ignore
        elif rule == "ExR":
            out = tactics.and_right(self.b.closure(node.term), ps[0])  # type: ignore
            out = tactics.ex_right(out, main, node.term)  # type: ignore
        elif rule == "AllR":
            instance = open_term(main.body, Var(node.eigen))  # type: ignore
            out = tactics.all_right(tactics.imp_right(ps[0], instance), main, node.eigen)  # type: ignore
        elif rule == "ExL":
            instance = open_term(main.body, Var(node.eigen))  # type: ignore
            out = ps[0]
            for index, part in ((1, instance.left), (2, instance.right)):  # type: ignore
                if part in out.conclusion.ante:
                    out = tactics.and_left(out, instance, index)
            if instance not in out.conclusion.ante:
                out = weaken_to(out, out.conclusion.ante | {instance})
            out = tactics.ex_left(out, main, node.eigen)  # type: ignore
        else:
            raise InvalidDerivation(f"Rule {rule} is not a rule of LI")
        out = self.discharge(out, c.free_term_vars)
        return weaken_to(out, out.conclusion.ante | self.target(node))


def relativize_derivation(d: Derivation, definitions: Optional[Mapping[str, PRDefinition]] = None) -> Derivation:
    """
    Turn an LI derivation of Γ ⇒ Π into an LIP(0) derivation of Nn(x⃗), Γ^Nn ⇒ Π^Nn, x⃗ the free
    variables of the endsequent.

    Terms instantiating quantifiers get Nn closure subproofs; when they use recursively defined symbols,
    the equality axioms and Def(f) join the antecedent.
    """
    require_valid(d, LI)
    terms = [n.term for n in d.nodes() if n.term is not None]
    relativizer = _Relativizer(_builder_for(terms, definitions))
    return relativizer.run(d)


## Least fixed points


@dataclass
class FixpointKit:
    """Fix_φ with derivations of its two least-fixed-point laws"""

    body: Formula
    set_var: str
    term_var: str
    n: int
    fix: Abstract
    lfp1_statement: Formula
    lfp1: Derivation
    lfp2: Callable[[Abstract], Derivation] = field(repr=False)

    @property
    def level(self) -> int:
        return self.fix.level  # type: ignore

    def lfp2_statement(self, tau: Abstract) -> Formula:
        """∀x.(φ(τ, x) → τ(x)) → ∀y(Fix_φ(y) → τ(y))"""
        y = fresh_name("y", tau.free_term_vars)
        closed = _plug_named(_closure_clause(self.body, self.set_var, self.term_var), self.set_var, tau)
        return imp(closed, forall(y, imp(instantiate(self.fix, Var(y)), instantiate(tau, Var(y)))))


def _plug_named(f: Formula, name: str, T: SetTerm) -> Formula:
    return substitute_set(f, name, T)


class _Monotone:
    """Sub(X), ∀x(φ(X, x) → X(x)), ψ[Fix/X] ⇒ ψ for X positive in ψ, and the converse for X negative"""

    def __init__(self, body: Formula, set_var: str, term_var: str, fix: Abstract) -> None:
        self.body = body
        self.set_var = set_var
        self.term_var = term_var
        self.fix = fix

    def fixed(self, f: Formula) -> Formula:
        return substitute_set(f, self.set_var, self.fix)

    def run(self, f: Formula, positive: bool) -> Derivation:
        if self.set_var not in f.free_set_vars:
            return tactics.axiom(f)
        src, dst = (self.fixed(f), f) if positive else (f, self.fixed(f))
        if isinstance(f, SetAtom):
            if not positive:
                raise NotPositive(f"{self.set_var} occurs negatively")
            return eliminate_set_quantifier(instantiate(self.fix, f.arg), self.set_var, 2)
        if isinstance(f, Binary):
            if f.op == "->":
                left = self.run(f.left, not positive)
                right = self.run(f.right, positive)
                return tactics.imp_right(tactics.imp_left(left, right, src), dst)
            d1 = self.run(f.left, positive)
            d2 = self.run(f.right, positive)
            if f.op == "&":
                return tactics.and_right(tactics.and_left(d1, src, 1), tactics.and_left(d2, src, 2))
            return tactics.or_left(tactics.or_right(d1, dst, 1), tactics.or_right(d2, dst, 2), src)
        if isinstance(f, Quant):
            z = fresh_name("z", f.free_term_vars | self.fix.free_term_vars | {self.term_var})
            d = self.run(open_term(f.body, Var(z)), positive)
            if f.kind == "all":
                return tactics.all_right(tactics.all_left(d, src, Var(z)), dst, z)
            return tactics.ex_left(tactics.ex_right(d, dst, Var(z)), src, z)
        raise NotPositive(f"Cannot follow {self.set_var} into {f}")


def fixpoint_kit(phi: Formula, n: Optional[int] = None, set_var: str = "X", term_var: str = "x") -> FixpointKit:
    """
    Build Fix_φ and derive its least-fixed-point laws in LIP(n).

    Parameters:
        phi: Body φ(X, x), X positive, no free set variable other than X, no free term variable other than x
        n: The calculus level, at least the level of Fix_φ; defaults to max(1, level of Fix_φ)
        set_var: The name of X
        term_var: The name of x

    Returns:
        kit: Fix_φ, the derivation of ∀x.φ(Fix_φ, x) → Fix_φ(x) and a builder for the induction law
    """
    _check_fixpoint_body(phi, set_var, term_var)
    fix = fix_abstract(phi, set_var, term_var)
    fix_level: int = fix.level  # type: ignore
    n = max(1, fix_level) if n is None else n
    if fix_level > n:
        raise LevelViolation(f"Fix has level {fix_level}, above {n}")

    y = fresh_name("y", phi.free_term_vars | {term_var})
    monotone = _Monotone(phi, set_var, term_var, fix)
    phi_y = substitute_term(phi, term_var, Var(y))
    closure = _closure_clause(phi, set_var, term_var)
    d = monotone.run(phi_y, True)
    instance = open_term(closure.body, Var(y))  # type: ignore
    d = tactics.all_left(tactics.imp_left(d, tactics.axiom(instance.right), instance), closure, Var(y))  # type: ignore
    fix_y = instantiate(fix, Var(y))
    opened = open_set(fix_y.body, set_var)  # type: ignore
    d = _absorb_spine(d, opened.left, 2)  # type: ignore
    d = tactics.all2_right(tactics.imp_right(d, opened), fix_y, set_var)
    lfp1_statement = forall(y, imp(monotone.fixed(phi_y), fix_y))
    d = tactics.imp_right(d, open_term(lfp1_statement.body, Var(y)))  # type: ignore
    lfp1 = tactics.all_right(d, lfp1_statement, y)

    def lfp2(tau: Abstract) -> Derivation:
        """Γ_eq ⇒ ∀x.(φ(τ, x) → τ(x)) → ∀y(Fix_φ(y) → τ(y)) for τ of level at most n"""
        lv = tau.level
        if lv is NOT_PARAMETER_FREE or lv > n:  # type: ignore
            raise LevelViolation(f"Abstract {tau} is not in the level {n} class")
        if tau.free_set_vars:
            raise LevelViolation(f"Abstract {tau} has free set variables")
        axioms = EqAxiomSet.for_formulas([tau.body], {"s": 1})
        b = _Builder(axioms)
        statement = kit.lfp2_statement(tau)
        z = fresh_name("y", tau.free_term_vars)
        fix_z = instantiate(fix, Var(z))
        tau_z = instantiate(tau, Var(z))
        closed = statement.left  # type: ignore
        hyp = open_set(fix_z.body, tau)  # type: ignore
        d = tactics.imp_left(
            tactics.and_right(b.substitution_lemma(tau), tactics.axiom(closed)), tactics.axiom(tau_z), hyp
        )
        d = tactics.all2_left(d, fix_z, tau)
        conclusion = statement.right  # type: ignore
        d = tactics.imp_right(d, open_term(conclusion.body, Var(z)))
        d = tactics.all_right(d, conclusion, z)
        d = tactics.imp_right(d, statement)
        return weaken_to(d, axioms.formulas())

    kit = FixpointKit(phi, set_var, term_var, n, fix, lfp1_statement, lfp1, lfp2)
    return kit


## ID formulas


@dataclass(frozen=True)
class FixedPointBody:
    """The stored body φ(X, x) of a fixed-point predicate I_φ"""

    name: str
    body: Formula
    set_var: str = "X"
    term_var: str = "x"


@dataclass(frozen=True)
class IDFormula:
    """
    A first-order formula whose atoms `name(t)` with `name` among the bodies are fixed-point atoms
    I_φ(t). Bodies may use fixed-point atoms of other bodies, never in a cycle.
    """

    formula: Formula
    bodies: Tuple[FixedPointBody, ...] = ()

    def __post_init__(self) -> None:
        names = [b.name for b in self.bodies]
        if len(set(names)) != len(names):
            raise LevelViolation("Fixed-point names must be distinct")
        if self.formula.level != -1:
            raise LevelViolation(f"ID formulas are first-order, got {self.formula}")
        for b in self.bodies:
            if b.body.level != -1:
                raise LevelViolation(f"Fixed-point bodies are first-order, got {b.body}")
            if not b.body.free_set_vars <= {b.set_var}:
                raise LevelViolation(f"Body of {b.name} uses set variables besides {b.set_var}")
            if not b.body.free_term_vars <= {b.term_var}:
                raise LevelViolation(f"Body of {b.name} uses term variables besides {b.term_var}")
            if not positive_in(b.body, b.set_var):
                raise NotPositive(f"{b.set_var} occurs negatively in the body of {b.name}")
        for f in [self.formula] + [b.body for b in self.bodies]:
            for atom in _atoms(f):
                if atom.pred in names and len(atom.args) != 1:
                    raise ArityMismatch(f"Fixed-point atom {atom.pred} takes one argument")
        for name in names:
            self.id_level_of(name)

    def body_of(self, name: str) -> FixedPointBody:
        return next(b for b in self.bodies if b.name == name)

    def references(self, f: Formula) -> Set[str]:
        names = {b.name for b in self.bodies}
        return {a.pred for a in _atoms(f) if a.pred in names}

    def id_level_of(self, name: str, trail: FrozenSet[str] = frozenset()) -> int:
        if name in trail:
            raise LevelViolation(f"Fixed-point body {name} refers to itself")
        refs = self.references(self.body_of(name).body)
        return 1 + max((self.id_level_of(r, trail | {name}) for r in refs), default=0)

    @property
    def id_level(self) -> int:
        return max((self.id_level_of(r) for r in self.references(self.formula)), default=0)


def _atoms(f: Formula) -> List[Atom]:
    if isinstance(f, Atom):
        return [f]
    if isinstance(f, Binary):
        return _atoms(f.left) + _atoms(f.right)
    if isinstance(f, (Quant, Quant2)):
        return _atoms(f.body)
    return []


def id_translate(phi: IDFormula) -> Formula:
    """
    φ^Fix: relativize first-order quantifiers to Nn and replace each fixed-point atom I_ξ(t) with
    Fix_{ξ^Fix}(t). At ID-level 0 this is the relativization.
    """
    fixes: Dict[str, Abstract] = {}

    def fix_of(name: str) -> Abstract:
        if name not in fixes:
            b = phi.body_of(name)
            fixes[name] = fix_abstract(translate(b.body), b.set_var, b.term_var)
        return fixes[name]

    def on_atom(a: Atom) -> Optional[Formula]:
        if any(b.name == a.pred for b in phi.bodies):
            return instantiate(fix_of(a.pred), a.args[0])
        return None

    def translate(f: Formula) -> Formula:
        return _relativize(f, on_atom)

    return translate(phi.formula)


__all__ = [
    "EqAxiomSet",
    "FixedPointBody",
    "FixpointKit",
    "IDFormula",
    "InductionParts",
    "NN",
    "PRDefinition",
    "PR_LIBRARY",
    "cc0_derivation",
    "def_formula",
    "eliminate_set_quantifier",
    "fix_abstract",
    "fix_formula",
    "fixpoint_kit",
    "id_translate",
    "induction_derivation",
    "induction_statement",
    "nat_closure_lemmas",
    "nn",
    "nn_closure",
    "nn_variable",
    "relativize",
    "relativize_derivation",
    "set_abstract",
    "sub_of",
    "suc_of",
]
