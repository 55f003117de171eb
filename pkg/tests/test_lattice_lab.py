import random
from collections import Counter
from fractions import Fraction

import pytest

from sequent_lab.errors import IndexOutOfRange, NotAHeytingFrame, NotALattice, NotAPartialOrder, NotHeyting
from sequent_lab.lab_logger import LabLogger
from sequent_lab.lattice_lab import (
    ClosedSetLattice,
    Embedding,
    FiniteHeytingAlgebra,
    FiniteLattice,
    FinitePoset,
    HeytingFrame,
    Polarity,
    boolean_algebra,
    chain_algebra,
    concept_lattice,
    density_check,
    downset_algebra,
    enumerate_posets,
    frame_plus,
    galois,
    hasse_edges,
    heyting_catalogue,
    heyting_frame_of,
    identity_embedding,
    label_text,
    macneille,
    random_frame,
    regularity_check,
)

HALF = Fraction(1, 2)


def antichain():
    return FinitePoset.from_pairs(["a", "b"], [])


def small_polarity():
    return Polarity.from_pairs(["x", "y", "z"], ["p", "q"], [("x", "p"), ("x", "q"), ("y", "p")])


def test_chain_algebra_operations():
    chain = chain_algebra()
    assert chain.elements == (0, HALF, 1)
    assert chain.bottom == 0 and chain.top == 1
    assert chain.meet(HALF, 1) == HALF
    assert chain.join(0, HALF) == HALF
    assert chain.imp(1, HALF) == HALF
    assert chain.imp(HALF, 1) == 1
    assert chain.neg(HALF) == 0
    assert chain.neg(0) == 1
    assert hasse_edges(chain) == [("0", "1/2"), ("1/2", "1")]


def test_boolean_algebra():
    four = boolean_algebra(2)
    assert len(four) == 4
    assert four.is_distributive()
    assert four.neg(frozenset({0})) == frozenset({1})
    assert four.join(frozenset({0}), frozenset({1})) == frozenset({0, 1})
    assert label_text(frozenset({0, 1})) == "{0,1}"


def test_downset_algebra_of_antichain_is_boolean():
    assert downset_algebra(antichain()).is_isomorphic(boolean_algebra(2))


def test_order_validation():
    with pytest.raises(NotAPartialOrder):
        FinitePoset(["a", "b"], [[True, False], [False, False]])
    with pytest.raises(NotAPartialOrder):
        FinitePoset.from_pairs(["a", "b"], [("a", "b"), ("b", "a")])
    with pytest.raises(NotAPartialOrder):
        FinitePoset(["a", "a"], [[True, True], [True, True]])
    with pytest.raises(NotALattice):
        FiniteLattice.of(antichain())
    diamond = [("0", "a"), ("0", "b"), ("0", "c"), ("a", "1"), ("b", "1"), ("c", "1")]
    assert not FiniteLattice.from_pairs(["0", "a", "b", "c", "1"], diamond).is_distributive()
    with pytest.raises(NotHeyting):
        FiniteHeytingAlgebra.from_pairs(["0", "a", "b", "c", "1"], diamond)
    with pytest.raises(IndexOutOfRange):
        chain_algebra().leq(Fraction(1, 3), 1)


@pytest.mark.parametrize("n,count", [(0, 1), (1, 1), (2, 2), (3, 5), (4, 16)])
def test_poset_counts(n, count):
    assert len(enumerate_posets(n)) == count


@pytest.mark.slow
@pytest.mark.parametrize("n,count", [(5, 63), (6, 318)])
def test_poset_counts_full(n, count):
    assert len(enumerate_posets(n)) == count


def test_heyting_catalogue():
    logger = LabLogger()
    catalogue = heyting_catalogue(5, logger)
    assert Counter(len(a) for a in catalogue) == {1: 1, 2: 1, 3: 1, 4: 2, 5: 3}
    assert all(a.is_distributive() for a in catalogue)
    assert any("8 Heyting algebras" in line for line in logger.logs)


def test_galois_maps():
    p = small_polarity()
    assert galois(p, "up", ["x"]) == {"p", "q"}
    assert galois(p, "up", ["x", "y"]) == {"p"}
    assert galois(p, "up", []) == {"p", "q"}
    assert galois(p, "down", ["p"]) == {"x", "y"}
    assert galois(p, "down", []) == {"x", "y", "z"}
    assert galois(p, "closure", ["y"]) == {"x", "y"}
    with pytest.raises(ValueError):
        galois(p, "sideways", [])
    with pytest.raises(IndexOutOfRange):
        galois(p, "up", ["w"])


def test_concept_lattice():
    p = small_polarity()
    lattice = concept_lattice(p)
    assert lattice.members == (frozenset({"x"}), frozenset({"x", "y"}), frozenset({"x", "y", "z"}))
    assert all(lattice.is_closed(m) for m in lattice.members)
    assert lattice.bottom == frozenset({"x"})
    assert lattice.join(frozenset({"x"}), frozenset({"x", "y"})) == frozenset({"x", "y"})
    assert lattice.as_lattice().is_isomorphic(chain_algebra())
    with pytest.raises(NotAHeytingFrame) as e:
        lattice.implication(lattice.bottom, lattice.top)
    assert e.value.law == "monoid"


def test_frame_of_algebra_round_trips():
    for algebra in [chain_algebra(), boolean_algebra(2), downset_algebra(FinitePoset.from_pairs([0, 1, 2], [(0, 1)]))]:
        plus = frame_plus(heyting_frame_of(algebra))
        assert isinstance(plus, FiniteHeytingAlgebra)
        assert plus.is_isomorphic(algebra)


def _chain_tables(chain):
    compose = {(x, y): chain.meet(x, y) for x in chain for y in chain}
    residual = {(x, z): chain.imp(x, z) for x in chain for z in chain}
    return compose, residual


def test_frame_laws_are_validated():
    chain = chain_algebra()
    polarity = Polarity.from_poset(chain)
    compose, residual = _chain_tables(chain)
    HeytingFrame(polarity, compose, chain.top, residual)
    with pytest.raises(NotAHeytingFrame) as e:
        HeytingFrame(polarity, compose, HALF, residual)
    assert e.value.law == "monoid"
    with pytest.raises(NotAHeytingFrame) as e:
        HeytingFrame(polarity, compose, chain.top, {key: chain.top for key in residual})
    assert e.value.law == "residuation"


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_random_frames_give_heyting_algebras(seed):
    frame = random_frame(random.Random(seed))
    assert len(frame.polarity.w) <= 4
    assert len(frame.polarity.w_prime) <= 5
    assert isinstance(frame_plus(frame), FiniteHeytingAlgebra)


def test_random_frames_use_the_whole_size_range():
    frames = [random_frame(random.Random(seed)) for seed in range(100)]
    assert all(len(f.polarity.w) <= 4 and len(f.polarity.w_prime) <= 5 for f in frames)
    assert max(len(f.polarity.w_prime) for f in frames) == 5
    assert any(len(f.polarity.w_prime) > len(f.polarity.w) for f in frames)


def test_macneille_of_antichain_adds_bounds():
    lattice, emb = macneille(antichain())
    assert isinstance(lattice, ClosedSetLattice)
    assert len(lattice) == 4
    assert emb("a") == frozenset({"a"})
    assert lattice.bottom == frozenset()
    assert emb.is_order_embedding()
    result = density_check(emb)
    assert result.join_dense and result.meet_dense and result.rules_agree
    with pytest.raises(NotHeyting):
        macneille(antichain(), "heyting")
    with pytest.raises(ValueError):
        macneille(antichain(), "frame")


def test_macneille_preserves_heyting_operations():
    logger = LabLogger()
    for algebra in heyting_catalogue(4):
        lattice, emb = macneille(algebra, "heyting", logger)
        assert isinstance(emb.target, FiniteHeytingAlgebra)
        assert len(lattice) == len(algebra)
        assert regularity_check(emb)
    assert any("preserves" in line for line in logger.logs)


def test_density_failures_are_named():
    source = FiniteHeytingAlgebra.from_leq([0, 1], lambda a, b: a <= b)
    emb = Embedding(source, chain_algebra(), {0: Fraction(0), 1: Fraction(1)})
    assert emb.is_order_preserving()
    result = density_check(emb)
    assert not result.join_dense and not result.meet_dense
    assert result.join_failures == ["1/2"] and result.meet_failures == ["1/2"]
    assert result.rules_agree
    assert density_check(emb, at=Fraction(1)).join_dense
    with pytest.raises(IndexOutOfRange):
        density_check(emb, at=Fraction(1, 3))
    assert regularity_check(emb)
    assert density_check(identity_embedding(chain_algebra())).join_dense


def test_regularity_detects_lost_join():
    source = FinitePoset.from_pairs(["a", "b", "t"], [("a", "t"), ("b", "t")])
    target = boolean_algebra(3)
    emb = Embedding(source, target, {"a": frozenset({0}), "b": frozenset({1}), "t": frozenset({0, 1, 2})})
    assert emb.is_order_preserving()
    assert not regularity_check(emb)


def _completion_suite(poset):
    lattice, emb = macneille(poset)
    target = emb.target
    assert isinstance(target, FiniteLattice)
    assert emb.is_order_embedding()
    result = density_check(emb)
    assert result.join_dense and result.meet_dense and result.rules_agree
    assert regularity_check(emb)
    assert len(lattice) == len(target)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_completions_of_small_posets(n):
    for poset in enumerate_posets(n):
        _completion_suite(poset)


@pytest.mark.slow
def test_completions_of_five_point_posets():
    for poset in enumerate_posets(5):
        _completion_suite(poset)


@pytest.mark.slow
def test_heyting_completions_up_to_six_elements():
    for algebra in heyting_catalogue(6):
        lattice, emb = macneille(algebra, "heyting")
        assert emb.target.is_isomorphic(algebra)


def _frame_suite(seed):
    frame = random_frame(random.Random(seed))
    plus = frame_plus(frame)
    assert plus.is_distributive()
    members = plus.elements
    for x in members:
        for y in members:
            for z in members:
                assert plus.leq(plus.meet(x, y), z) == plus.leq(x, plus.imp(y, z))


@pytest.mark.parametrize("seed", range(10))
def test_random_frames_satisfy_residuation(seed):
    _frame_suite(seed)


@pytest.mark.slow
def test_hundred_random_frames():
    for seed in range(100):
        _frame_suite(seed)
