import pytest

from sequent_lab.cut_elimination import derive_inconsistency
from sequent_lab.errors import LevelViolation, MissingPremise, SizeBoundExceeded
from sequent_lab.formula_core import BOT, open_set
from sequent_lab.grammar import parse_formula as f
from sequent_lab.grammar import parse_sequent
from sequent_lab.lab_logger import LabLogger
from sequent_lab.proof_search import (
    Member,
    NotFoundWithinBudget,
    OmegaCutConfig,
    SearchBudget,
    is_found,
    omega_cut_demo,
    omega_cut_reduce,
    omega_membership,
    sample_index_set,
    search_cutfree,
)
from sequent_lab.sequent_kernel import LI, Derivation, Sequent, check, is_cut_free

provable = [
    "p & q |- q & p",
    "p | q |- q | p",
    "p, p -> q, q -> r |- r",
    "|- (p -> q) -> (q -> r) -> p -> r",
    "all x. p(x) |- p(c)",
    "p(c) |- ex x. p(x)",
    "ex x. all y. r(x, y) |- all y. ex x. r(x, y)",
    "bot |- q",
]

Q = "All X. X(c) -> X(x)"


@pytest.mark.parametrize("text", provable)
def test_search_finds_checked_derivations(text):
    goal = parse_sequent(text)
    result = search_cutfree(goal, SearchBudget(max_depth=10))
    assert is_found(result)
    assert result.conclusion == goal
    assert is_cut_free(result)
    assert check(result, LI) == []


def test_search_reports_budget_outcomes():
    logger = LabLogger()
    excluded_middle = search_cutfree(parse_sequent("|- p | (p -> bot)"), SearchBudget(max_depth=10), logger)
    assert isinstance(excluded_middle, NotFoundWithinBudget)
    assert excluded_middle.reason == "search space exhausted"
    peirce = search_cutfree(parse_sequent("|- ((p -> q) -> p) -> p"), SearchBudget(max_depth=8))
    assert not is_found(peirce)
    tiny = search_cutfree(parse_sequent("p & q |- q & p"), SearchBudget(max_nodes=1))
    assert isinstance(tiny, NotFoundWithinBudget)
    assert tiny.reason == "node budget exhausted"
    assert any("No derivation" in line for line in logger.logs)


def test_search_is_first_order():
    with pytest.raises(LevelViolation):
        search_cutfree(Sequent.of([], f("All X. X(c) -> X(c)")))


def test_index_set_membership():
    q = f(Q)
    member = omega_membership(q, [f("p(c)"), f("p(c) -> bot")], SearchBudget(max_depth=8))
    assert isinstance(member, Member)
    assert member.fresh == "Y"
    assert member.sequent == Sequent.of([f("p(c)"), f("p(c) -> bot")], open_set(q.body, "Y"))
    assert check(member.derivation, LI) == []
    assert isinstance(omega_membership(q, [f("p(c)")], SearchBudget(max_depth=8)), NotFoundWithinBudget)
    assert isinstance(omega_membership(q, [], SearchBudget(max_depth=8)), NotFoundWithinBudget)


def test_fresh_variable_avoids_the_context():
    member = omega_membership(f(Q), [f("Y(c)"), f("Y(c) -> bot")], SearchBudget(max_depth=8))
    assert isinstance(member, Member)
    assert member.fresh == "Y1"


def test_existential_index_sets():
    q = f("Ex X. X(c) & (X(c) -> bot)")
    assert isinstance(omega_membership(q, [], SearchBudget(max_depth=8), lam=f("r")), Member)


def test_membership_needs_level_zero():
    with pytest.raises(LevelViolation):
        omega_membership(f("All X. X(c) -> All Y. Y(c)"), [])
    with pytest.raises(LevelViolation):
        omega_membership(f("p"), [])


def test_sampling_an_index_set():
    pool = [f("bot"), f("p(c)"), f("p(c) -> bot"), f("r")]
    members = sample_index_set(f(Q), pool, SearchBudget(max_depth=8))
    contexts = [delta for delta, _ in members]
    assert contexts[0] == frozenset([BOT])
    assert frozenset([f("p(c)"), f("p(c) -> bot")]) in contexts
    assert len(contexts) == 10
    with pytest.raises(SizeBoundExceeded):
        sample_index_set(f(Q), pool + [f("s")])


def test_members_are_inconsistent():
    delta = [f("p(c)"), f("p(c) -> bot")]
    member = omega_membership(f(Q), delta, SearchBudget(max_depth=8))
    derived = derive_inconsistency(delta, member.derivation)
    assert derived["interpolant"] == BOT
    proof = derived["inconsistency"]
    assert isinstance(proof, Derivation)
    assert proof.conclusion == Sequent.of(delta, BOT)


def test_omega_cut_demo():
    result = omega_cut_demo(LabLogger())
    assert result["same_endsequent"]
    assert result["certified"]
    assert result["left_premise_valid"]
    assert "NotFoundWithinBudget" in result["empty_context"]
    assert result["reduced"].conclusion == Sequent.of([BOT], f("r"))


def test_omega_cut_needs_the_stored_premise():
    q = f(Q)
    gamma = frozenset([BOT])
    left = Derivation("BotL", Sequent.of(gamma, open_set(q.body, "Y")))
    with pytest.raises(MissingPremise):
        omega_cut_reduce(OmegaCutConfig(gamma, q, left, {}, f("r")))
