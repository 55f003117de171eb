import pytest

from sequent_lab import tactics
from sequent_lab.errors import InvalidDerivation
from sequent_lab.formula_core import Fn, Var
from sequent_lab.grammar import format_derivation, parse_abstract, parse_derivation
from sequent_lab.grammar import parse_formula as f
from sequent_lab.sequent_kernel import (
    LI,
    LIP,
    LIT,
    CalculusId,
    RULE_ARITY,
    Derivation,
    Sequent,
    check,
    cuts,
    is_cut_free,
    max_cut_rank,
    require_valid,
    substitute_derivation,
    weaken_to,
)
from tests.derivations import (
    BROKEN_CORPUS,
    VALID_CORPUS,
    cut_chain,
    identity_imp,
    modus_ponens,
    sequent,
    set_identity,
    universal_identity,
    vacuous_set_instance,
)


def test_sequent_antecedent_is_a_set():
    assert sequent(["q", "p", "p"], "r") == sequent(["p", "q"], "r")
    assert str(sequent(["q", "p"], "r")) == "p, q |- r"
    assert str(sequent([], "p")) == "|- p"
    assert sequent(["p"]).succedent is None


def test_valid_first_order_derivations():
    for d in [identity_imp(), modus_ponens(), universal_identity(), cut_chain()]:
        assert check(d, LI) == []
        assert check(d, LIP(0)) == []
        assert check(d, LIT) == []


def test_second_order_rules_are_outside_li():
    d = set_identity()
    assert check(d, LIT) == []
    assert check(d, LIP(0)) == []
    violations = check(d, LI)
    assert violations
    assert any("outside LI" in v.reason for v in violations)


def test_level_bound_of_lip():
    g = f("All X. X(c) -> All Y. Y(c)")
    d = tactics.axiom(g)
    assert check(d, LIP(1)) == []
    assert check(d, LIP(0))
    assert check(d, LI)
    assert check(d, LIT) == []


def test_eigenvariable_condition():
    main = f("all x. p(x)")
    bad = Derivation("AllR", sequent(["p(x)"], "all x. p(x)"), (tactics.axiom(f("p(x)")),), main=main, eigen="x")
    violations = check(bad, LI)
    assert len(violations) == 1
    assert violations[0].path == ""
    assert "eigenvariable" in violations[0].reason


def test_violation_paths_point_to_the_faulty_node():
    broken = Derivation("Id", sequent(["p"], "q"), main=f("p"))
    d = tactics.imp_right(broken, f("p -> q"))
    violations = check(d, LI)
    assert [(v.path, v.rule) for v in violations] == [("0", "Id")]
    with pytest.raises(InvalidDerivation) as e:
        require_valid(d, LI)
    assert e.value.violations == violations


def test_wrong_premise_count():
    d = Derivation("ImpR", sequent([], "p -> p"), main=f("p -> p"))
    assert "premises" in check(d, LI)[0].reason


def test_tactics_share_the_context():
    d = tactics.and_right(tactics.axiom(f("p")), tactics.axiom(f("q")))
    assert d.conclusion == sequent(["p", "q"], "p & q")
    assert all(p.conclusion.ante == d.conclusion.ante for p in d.premises)
    assert check(d, LI) == []


def test_cut_bookkeeping():
    d = cut_chain()
    assert d.conclusion == sequent(["p", "p -> q", "q -> r"], "r")
    assert len(list(cuts(d))) == 1
    assert not is_cut_free(d)
    assert max_cut_rank(d) == 0
    assert is_cut_free(modus_ponens())


def test_weakening_renames_clashing_eigenvariables():
    d = universal_identity()
    weakened = weaken_to(d, [f("q(x)")])
    assert weakened.conclusion == sequent(["q(x)"], "all x. p(x) -> p(x)")
    assert weakened.eigen != "x"
    assert check(weakened, LI) == []


def test_substitution_in_derivations():
    d = tactics.axiom(f("p(x)"))
    assert substitute_derivation(d, "x", Fn("c")).conclusion == sequent(["p(c)"], "p(c)")
    u = universal_identity()
    moved = substitute_derivation(weaken_to(u, [f("q(y)")]), "y", Var("x"))
    assert moved.conclusion == sequent(["q(x)"], "all x. p(x) -> p(x)")
    assert check(moved, LI) == []


def test_set_substitution_in_derivations():
    d = tactics.imp_right(tactics.axiom(f("Z(c)")), f("Z(c) -> Z(c)"))
    result = substitute_derivation(d, "Z", "W")
    assert result.conclusion == sequent([], "W(c) -> W(c)")
    assert check(result, LI) == []


def test_derivation_text_round_trip():
    for d in [identity_imp(), modus_ponens(), universal_identity(), set_identity(), cut_chain()]:
        assert parse_derivation(format_derivation(d)) == d


def test_parse_derivation_file():
    text = """
    # |- p -> p
    (ImpR {main: p -> p} [|- p -> p]
      (Id {main: p} [p |- p]))
    """
    assert parse_derivation(text) == identity_imp()


def test_calculus_names():
    assert CalculusId.parse("LI") == LI
    assert CalculusId.parse("LIP2") == LIP(2)
    assert CalculusId.parse("LIP(0)") == LIP(0)
    assert str(LIP(3)) == "LIP3"
    with pytest.raises(ValueError):
        CalculusId.parse("LK")


def test_sequent_free_variables():
    s = Sequent.of([f("p(x)"), f("Y(z)")], f("all y. q(y, w)"))
    assert s.free_term_vars == frozenset(["x", "z", "w"])
    assert s.free_set_vars == frozenset(["Y"])


@pytest.mark.parametrize("name,build,calculus", VALID_CORPUS, ids=[entry[0] for entry in VALID_CORPUS])
def test_valid_corpus(name, build, calculus):
    d = build()
    assert check(d, calculus) == []
    assert check(d, LIT) == []


def test_valid_corpus_uses_every_rule():
    rules = {node.rule for _, build, _ in VALID_CORPUS for node in build().nodes()}
    assert rules == set(RULE_ARITY)


@pytest.mark.parametrize(
    "name,build,calculus,reason", BROKEN_CORPUS, ids=[entry[0] for entry in BROKEN_CORPUS]
)
def test_broken_corpus(name, build, calculus, reason):
    violations = check(build(), calculus)
    assert len(violations) == 1
    assert violations[0].path == ""
    assert reason in violations[0].reason


def test_corpus_sizes():
    assert len(VALID_CORPUS) >= 20
    assert len(BROKEN_CORPUS) >= 20


def test_set_instance_level_only_bounds_main_and_minor():
    d = vacuous_set_instance()
    assert d.abstract.body.level == 1
    assert check(d, LIP(0)) == []
    assert check(d, LI)


def test_set_instance_with_high_minor_is_rejected():
    minor = f("All Y. All Z. Z(c)")
    premise = tactics.bot_left(f("r"), [minor])
    d = tactics.all2_left(premise, f("All X. X(c)"), parse_abstract("\\x. All Y. All Z. Z(x)"))
    violations = check(d, LIP(0))
    assert [v.reason for v in violations if v.path == ""] == ["main and minor formula must both be at level ≤ 0"]
    assert [v.path for v in violations] == ["", "0"]
    assert check(d, LIP(1)) == []
