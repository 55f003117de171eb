from functools import partial

import pytest

from sequent_lab.encodings import (
    NN,
    EqAxiomSet,
    FixedPointBody,
    IDFormula,
    PRDefinition,
    cc0_derivation,
    fix_abstract,
    fixpoint_kit,
    id_translate,
    induction_derivation,
    induction_statement,
    nat_closure_lemmas,
    nn,
    nn_closure,
    nn_variable,
    relativize,
    relativize_derivation,
)
from sequent_lab.errors import ArityMismatch, LevelViolation, NotPositive, UnknownFunctionSymbol
from sequent_lab.formula_core import ZERO, Fn, SetAtom, Var, conj, disj, eq, exists, forall, imp, instantiate, succ
from sequent_lab.grammar import parse_abstract
from sequent_lab.grammar import parse_formula as f
from sequent_lab.sequent_kernel import LIP, check
from tests.derivations import identity_imp, modus_ponens, searched, universal_identity

X = Var("x")
NATURALS = "x = 0 | ex y. X(y) & x = s(y)"


def test_nn_is_a_level_zero_abstract():
    assert nn(X).level == 0
    assert NN.level == 0
    assert nn_variable(nn(Var("v"))) == "v"
    assert nn_variable(nn(succ(X))) is None


def test_relativize_guards_quantifiers():
    assert relativize(f("all x. p(x)")) == forall("x", imp(nn(X), f("p(x)")))
    assert relativize(f("ex x. p(x)")) == exists("x", conj(nn(X), f("p(x)")))
    assert relativize(f("all x. p(x)")).level == 0
    assert relativize(f("p(c) -> q")) == f("p(c) -> q")
    with pytest.raises(LevelViolation):
        relativize(f("All X. X(c)"))


def test_nat_closure_lemmas_check():
    lemmas = nat_closure_lemmas()
    assert sorted(lemmas) == ["Nn(0)", "Sub(Nn)", "Suc(Nn)"]
    gamma = set(EqAxiomSet.for_symbols({"s": 1}, {}).formulas())
    for d in lemmas.values():
        assert check(d, LIP(0)) == []
        assert d.conclusion.ante == gamma
    assert lemmas["Nn(0)"].conclusion.succedent == nn(ZERO)


INDUCTION_FORMULAS = [
    "p(x)",
    "x = 0 | ex y. x = s(y)",
    "q",
    "bot",
    "x = x",
    "p(s(x))",
    "p(x) & q",
    "p(x) -> q(x)",
    "p(x) | p(s(x))",
    "ex y. x = s(y)",
    "all y. p(y) -> p(x)",
]


@pytest.mark.parametrize("text", INDUCTION_FORMULAS)
def test_induction_derivations_check_in_lip0(text):
    phi = f(text)
    d = induction_derivation(phi, "x")
    assert check(d, LIP(0)) == []
    assert d.conclusion.succedent == induction_statement(phi, "x")
    assert d.conclusion.ante == set(EqAxiomSet.for_formulas([phi], {"s": 1}).formulas())


def test_induction_rejects_bad_formulas():
    with pytest.raises(LevelViolation):
        induction_derivation(f("r(x, y)"))
    with pytest.raises(LevelViolation):
        induction_derivation(f("X(x)"))


@pytest.mark.parametrize("term", [succ(X), succ(succ(X))])
def test_cc0_instances(term):
    d = cc0_derivation(term)
    assert check(d, LIP(0)) == []
    assert d.conclusion.succedent.level == 0
    with pytest.raises(LevelViolation):
        cc0_derivation(ZERO)


def test_nn_closure_of_terms():
    d = nn_closure(succ(succ(X)))
    assert check(d, LIP(0)) == []
    assert d.conclusion.succedent == nn(succ(succ(X)))
    assert nn(X) in d.conclusion.ante
    defined = nn_closure(Fn("dbl", (X,)))
    assert check(defined, LIP(0)) == []
    with pytest.raises(UnknownFunctionSymbol):
        nn_closure(Fn("dbl", (X,)), definitions={})
    with pytest.raises(UnknownFunctionSymbol):
        nn_closure(Fn("h", (X,)))


def test_recursive_definitions_are_validated():
    with pytest.raises(LevelViolation):
        PRDefinition("bad", X, ZERO)
    with pytest.raises(LevelViolation):
        PRDefinition("bad", ZERO, Var("z"))
    looping = {"f": PRDefinition("f", ZERO, Fn("g", (Var("y"),))), "g": PRDefinition("g", ZERO, Fn("f", (Var("y"),)))}
    with pytest.raises(UnknownFunctionSymbol):
        nn_closure(Fn("f", (X,)), definitions=looping)


RELATIVIZED = [
    modus_ponens,
    universal_identity,
    identity_imp,
    partial(searched, "p & q |- q & p"),
    partial(searched, "p(x) |- ex y. p(y)"),
    partial(searched, "all x. (p(x) -> q(x)), all x. p(x) |- all x. q(x)"),
    partial(searched, "ex x. p(x) | q(x) |- ex x. q(x) | p(x)"),
]


@pytest.mark.parametrize("builder", RELATIVIZED)
def test_relativized_derivations_check_in_lip0(builder):
    source = builder()
    d = relativize_derivation(source)
    assert check(d, LIP(0)) == []
    assert d.conclusion.succedent == relativize(source.conclusion.succedent)
    assert {relativize(g) for g in source.conclusion.antecedent} <= d.conclusion.ante
    assert {nn(Var(v)) for v in source.conclusion.free_term_vars} <= d.conclusion.ante


def _successors_of(guard):
    """x = 0 | ex y. (guard(y) & X(y)) & x = s(y)"""
    y = Var("y")
    return disj(eq(X, ZERO), exists("y", conj(conj(guard(y), SetAtom("X", y)), eq(X, succ(y)))))


def _guarded_by_nn():
    return _successors_of(nn)


def _guarded_by_fix():
    inner = fix_abstract(_guarded_by_nn())
    return _successors_of(lambda t: instantiate(inner, t))


# (body, requested n, expected n, level of Fix)
FIXPOINT_BODIES = [
    (lambda: f(NATURALS), None, 1, 0),
    (lambda: f(NATURALS), 2, 2, 0),
    (_guarded_by_nn, None, 1, 1),
    (_guarded_by_nn, 2, 2, 1),
    (_guarded_by_fix, None, 2, 2),
    (_guarded_by_fix, 2, 2, 2),
]


@pytest.mark.parametrize("body,n,expected_n,level", FIXPOINT_BODIES)
def test_fixpoint_kits(body, n, expected_n, level):
    kit = fixpoint_kit(body(), n)
    assert kit.n == expected_n
    assert kit.level == level
    assert check(kit.lfp1, LIP(kit.n)) == []
    assert kit.lfp1.conclusion.succedent == kit.lfp1_statement
    tau = parse_abstract("\\x. x = x")
    d = kit.lfp2(tau)
    assert check(d, LIP(kit.n)) == []
    assert d.conclusion.succedent == kit.lfp2_statement(tau)


def test_fixpoint_kit_rejects_bad_bodies():
    with pytest.raises(NotPositive):
        fixpoint_kit(f("X(x) -> bot"))
    with pytest.raises(LevelViolation):
        fixpoint_kit(f("Y(x)"))
    with pytest.raises(LevelViolation):
        fixpoint_kit(f("X(y)"))
    kit = fixpoint_kit(f(NATURALS))
    with pytest.raises(LevelViolation):
        kit.lfp2(parse_abstract("\\x. Y(x)"))


def test_id_translation():
    body = FixedPointBody("nat", f(NATURALS))
    phi = IDFormula(f("nat(c)"), (body,))
    assert phi.id_level == 1
    assert id_translate(phi) == instantiate(fix_abstract(relativize(f(NATURALS))), Fn("c"))
    assert id_translate(IDFormula(f("all x. p(x)"))) == relativize(f("all x. p(x)"))
    with pytest.raises(LevelViolation):
        IDFormula(f("nat(c)"), (FixedPointBody("nat", f("nat(x) | X(x)")),))
    with pytest.raises(ArityMismatch):
        IDFormula(f("nat(c, c)"), (body,))
    with pytest.raises(NotPositive):
        IDFormula(f("nat(c)"), (FixedPointBody("nat", f("X(x) -> bot")),))


def test_fixpoint_kit_level_must_fit():
    with pytest.raises(LevelViolation):
        fixpoint_kit(_guarded_by_fix(), 1)
