import random
from fractions import Fraction

import pytest

from sequent_lab.errors import LevelViolation, OutsideUniverse, UncoveredVariable
from sequent_lab.formula_core import Fn, Language
from sequent_lab.grammar import parse_formula as f
from sequent_lab.grammar import parse_sequent
from sequent_lab.lab_logger import LabLogger
from sequent_lab.lattice_lab import boolean_algebra, chain_algebra, heyting_catalogue
from sequent_lab.proof_search import SearchBudget, is_found, search_cutfree
from sequent_lab.semantics import (
    STAR_LANGUAGE,
    Structure,
    boolean_probe_harness,
    check_validity,
    closed_terms,
    countermodel,
    default_probe_pool,
    interpret,
    omega_soundness_probe,
    p_counter2_demo,
)
from sequent_lab.sequent_kernel import LI, LIP, SECOND_ORDER_RULES, check
from tests.derivations import random_lip0_derivation

HALF = Fraction(1, 2)
STAR = Fn("*")


@pytest.fixture
def chain_structure():
    return Structure.full(chain_algebra(), STAR_LANGUAGE, depth=0)


def test_closed_terms_grow_with_depth():
    assert closed_terms(STAR_LANGUAGE, 3) == (STAR,)
    successor = Language((("*", 0), ("s", 1)), ())
    assert [str(t) for t in closed_terms(successor, 2)] == ["*", "s(*)", "s(s(*))"]


def test_connectives_follow_the_algebra(chain_structure):
    s = chain_structure
    half = {"X": (HALF,)}
    assert interpret(f("X(*)"), s, half) == HALF
    assert interpret(f("X(*) -> bot"), s, half) == 0
    assert interpret(f("(X(*) -> bot) | X(*)"), s, half) == HALF
    assert interpret(f("X(*) & (X(*) -> bot)"), s, half) == 0
    assert interpret(f("(X(*) -> bot) -> bot"), s, half) == 1
    assert interpret(f("* = *"), s) == 1
    assert interpret(f("all x. X(x)"), s, half) == HALF


def test_second_order_quantifiers_range_over_the_domain(chain_structure):
    assert interpret(f("All X. X(*)"), chain_structure) == 0
    assert interpret(f("Ex X. X(*)"), chain_structure) == 1
    restricted = Structure(chain_algebra(), (STAR,), domain=((HALF,), (Fraction(1),)))
    assert not restricted.is_full
    assert interpret(f("All X. X(*)"), restricted) == HALF


def test_predicate_tables_default_to_bottom():
    s = Structure(chain_algebra(), (STAR,), {"p": {(STAR,): HALF}})
    assert interpret(f("p(*)"), s) == HALF
    assert interpret(f("q(*)"), s) == 0
    assert interpret(f("ex x. p(x)"), s) == HALF


def test_missing_values_are_rejected(chain_structure):
    with pytest.raises(UncoveredVariable):
        interpret(f("X(*)"), chain_structure)
    with pytest.raises(UncoveredVariable):
        interpret(f("p(x)"), chain_structure)
    with pytest.raises(OutsideUniverse):
        interpret(f("X(s(*))"), chain_structure, {"X": (HALF,)})
    with pytest.raises(OutsideUniverse):
        Structure(chain_algebra(), ())


def test_validity_and_countermodels(chain_structure):
    assert check_validity(parse_sequent("X(*) |- X(*)"), chain_structure)
    assert check_validity(parse_sequent("X(*), X(*) -> Y(*) |- Y(*)"), chain_structure)
    excluded_middle = parse_sequent("|- X(*) | (X(*) -> bot)")
    assert countermodel(excluded_middle, chain_structure) == ({"X": (HALF,)}, {})
    assert check_validity(excluded_middle, Structure.full(boolean_algebra(1), STAR_LANGUAGE, depth=0))


def test_p_counter2_demo_flags_the_chain():
    logger = LabLogger()
    result = p_counter2_demo(logger=logger)
    assert result["algebra"] == ["0", "1/2", "1"]
    assert result["per_valuation"] == [("0", "1"), ("1/2", "1/2"), ("1", "1")]
    assert result["value"] == "1/2"
    probe = result["probe"]
    assert probe.unsound_instance
    members = [e for e in probe.entries if e.member]
    assert members and all(e.satisfied and e.value == "0" for e in members)
    assert [e.member for e in probe.entries if e.delta == ["bot"]] == [True]
    assert not [e for e in probe.entries if e.delta == []][0].member
    assert any("unsound" in line for line in logger.logs)


def test_p_counter2_depends_on_the_algebra():
    result = p_counter2_demo(chain_algebra([Fraction(0), Fraction(1, 3), Fraction(1)]))
    assert result["value"] == "1/3"
    assert result["probe"].unsound_instance


def test_probe_is_quiet_when_the_formula_is_bottom(chain_structure):
    report = omega_soundness_probe(chain_structure, f("All X. X(*)"), default_probe_pool())
    assert report.value_q == "0"
    assert not report.unsound_instance


def test_probe_rejects_other_formulas(chain_structure):
    with pytest.raises(LevelViolation):
        omega_soundness_probe(chain_structure, f("X(*) -> bot"), default_probe_pool())
    with pytest.raises(LevelViolation):
        omega_soundness_probe(chain_structure, f("Ex X. X(*)"), default_probe_pool())


def test_boolean_probe_harness():
    found = boolean_probe_harness(2)
    assert [row["atoms"] for row in found] == [1, 2]
    assert [row["value"] for row in found] == ["{0}", "{0,1}"]


SOUND_SEQUENTS = [
    "X(*) & Y(*) |- Y(*) & X(*)",
    "X(*) | Y(*) |- Y(*) | X(*)",
    "X(*), X(*) -> Y(*) |- Y(*)",
    "|- (X(*) -> Y(*)) -> (Y(*) -> bot) -> X(*) -> bot",
    "bot |- X(c)",
    "all x. p(x) |- p(c)",
]


def _random_structure(rng, algebras):
    algebra = rng.choice(algebras)
    universe = (STAR, Fn("c"))
    return Structure(algebra, universe, {"p": {(t,): rng.choice(algebra.elements) for t in universe}})


def _soundness_sweep(structures):
    rng = random.Random(7)
    algebras = heyting_catalogue(5)
    checked = 0
    for text in SOUND_SEQUENTS:
        goal = parse_sequent(text)
        d = search_cutfree(goal, SearchBudget(max_depth=10))
        assert is_found(d) and check(d, LI) == []
        for _ in range(structures):
            s = _random_structure(rng, algebras)
            assert check_validity(d.conclusion, s), f"{text} fails over {s.algebra}"
            checked += 1
    return checked


def test_derivable_sequents_are_valid():
    assert _soundness_sweep(10) == 10 * len(SOUND_SEQUENTS)


@pytest.mark.slow
def test_derivable_sequents_are_valid_full():
    _soundness_sweep(170)


def _random_full_structure(rng, algebras, max_universe):
    universe = (STAR, Fn("c"), Fn("d"))[: rng.randint(2, max_universe)]
    # H^M stays small enough to enumerate for every free set variable
    algebra = rng.choice([a for a in algebras if len(a) ** len(universe) <= 32])
    tables = {pred: {(t,): rng.choice(algebra.elements) for t in universe} for pred in ("p", "q")}
    return Structure(algebra, universe, tables)


def _second_order_sweep(derivations, structures, max_universe):
    rng = random.Random(11)
    algebras = heyting_catalogue(5)
    rules = set()
    for _ in range(derivations):
        d = random_lip0_derivation(rng)
        assert check(d, LIP(0)) == [], str(d)
        rules |= {node.rule for node in d.nodes()}
        for _ in range(structures):
            s = _random_full_structure(rng, algebras, max_universe)
            assert check_validity(d.conclusion, s), f"{d.conclusion} fails over {s.algebra}"
    return rules


def test_random_lip0_derivations_are_valid():
    rules = _second_order_sweep(20, 3, 2)
    assert rules & SECOND_ORDER_RULES


@pytest.mark.slow
def test_random_lip0_derivations_are_valid_full():
    _second_order_sweep(100, 10, 3)
