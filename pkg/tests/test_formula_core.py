from hypothesis import assume, given, settings
from hypothesis import strategies as st

from sequent_lab.errors import ArityMismatch
from sequent_lab.formula_core import (
    BOT,
    NOT_PARAMETER_FREE,
    Atom,
    Binary,
    Fn,
    SetAtom,
    Var,
    abstract,
    eq,
    forall,
    forall2,
    fresh_name,
    is_member,
    level_at_most,
    numeral,
    open_set,
    open_term,
    positive_in,
    substitute_set,
    substitute_term,
)
from sequent_lab.grammar import parse_abstract, parse_formula, parse_term

# Formula texts with their parameter-free level
levels = [
    ("p", -1),
    ("all x. p(x) -> ex y. q(x, y)", -1),
    ("All X. X(c)", 0),
    ("All X. X(c) -> all x. X(s(x))", 0),
    ("All X. X(c) -> All Y. Y(c)", 1),
    ("(All X. X(c)) & (All X. All Y. X(c) | Y(c))", NOT_PARAMETER_FREE),
    ("All X. X(c) -> Z(c)", NOT_PARAMETER_FREE),
    ("Z(c) -> All X. X(c)", 0),
    ("bot", -1),
    ("X(c)", -1),
    ("X(c) -> Y(c)", -1),
    ("Ex X. X(c) & p", 0),
    ("all x. All X. X(x)", 0),
    ("ex x. All X. X(x) -> p(x)", 0),
    ("All X. X(c) -> Ex Y. Y(c) & X(c)", NOT_PARAMETER_FREE),
    ("All X. Y(c)", NOT_PARAMETER_FREE),
    ("All X. (All Y. Y(c)) -> X(c)", 1),
    ("All X. All Y. Y(c)", 1),
    ("(All X. X(c)) | (All Y. All Z. Z(c) -> Z(x))", 1),
    ("All X. All Y. All Z. Z(c)", 2),
    ("All X. X(c) & p(c) -> All Y. (All Z. Z(c)) -> Y(c)", 2),
]


def test_levels():
    for text, expected in levels:
        f = parse_formula(text)
        assert f.level == expected, text


def test_membership_agrees_with_level():
    for text, expected in levels:
        f = parse_formula(text)
        for n in range(-1, 3):
            assert is_member(f, n) == level_at_most(f, n), (text, n)


def test_alpha_equivalent_formulas_are_equal():
    assert parse_formula("all x. p(x)") == parse_formula("all y. p(y)")
    assert parse_formula("All X. X(c) -> X(z)") == parse_formula("All Y. Y(c) -> Y(z)")
    assert hash(parse_formula("ex u. q(u, u)")) == hash(parse_formula("ex v. q(v, v)"))
    assert parse_formula("all x. p(x)") != parse_formula("ex x. p(x)")


ranks = [
    ("p", 0),
    ("bot", 0),
    ("X(c)", 0),
    ("c = c", 0),
    ("All X. X(c) -> X(c)", 0),
    ("p & q", 1),
    ("X(c) & Y(c)", 1),
    ("(All X. X(c)) -> p", 1),
    ("all x. All X. X(x)", 1),
    ("all x. p(x) -> q", 2),
    ("p & q -> r", 2),
    ("p -> q -> r", 2),
    ("p | q & r", 2),
    ("(p | q) | (r | p)", 2),
    ("(p -> bot) -> bot", 2),
    ("ex x. p(x) & q", 2),
    ("all x. ex y. q(x, y)", 2),
    ("all x. all y. x = y", 2),
    ("(all x. p(x)) & (ex y. q(y, y))", 2),
    ("((p -> q) -> r) -> p", 3),
    ("all x. (p(x) | q(x)) -> ex y. p(y)", 3),
]


def test_rank():
    for text, expected in ranks:
        assert parse_formula(text).rank == expected, text


def test_golden_tables_are_complete():
    assert len(levels) >= 20
    assert len(ranks) >= 20


def test_substitution_avoids_capture():
    f = parse_formula("all y. p(x, y)")
    result = substitute_term(f, "x", Var("y"))
    assert result.free_term_vars == frozenset(["y"])
    assert str(result) == "all x. p(y, x)"
    assert open_term(result.body, Fn("c")) == parse_formula("p(y, c)")


def test_set_substitution_with_abstract():
    f = parse_formula("X(c) -> X(s(z))")
    tau = parse_abstract("\\u. p(u) & q(u, z)")
    result = substitute_set(f, "X", tau)
    assert result == parse_formula("p(c) & q(c, z) -> p(s(z)) & q(s(z), z)")
    q = parse_formula("All X. X(c) -> X(x)")
    assert open_set(q.body, "Y") == parse_formula("Y(c) -> Y(x)")


def test_positivity():
    assert positive_in(parse_formula("X(c) & all x. p(x) -> X(x)"), "X")
    assert not positive_in(parse_formula("X(c) -> X(x)"), "X")
    assert positive_in(parse_formula("(X(c) -> bot) -> X(c)"), "X")
    assert positive_in(parse_formula("Y(c) -> X(c)"), "X")


def test_builders_and_numerals():
    assert forall("x", eq(Var("x"), Var("x"))) == parse_formula("all z. z = z")
    assert forall2("X", SetAtom("X", Fn("c"))) == parse_formula("All Y. Y(c)")
    assert numeral(2) == parse_term("s(s(0))")
    assert parse_term("c") == Fn("c")
    assert parse_term("x") == Var("x")
    assert Binary("->", BOT, BOT) == parse_formula("bot -> bot")
    assert parse_formula("p(c, x)") == Atom("p", (Fn("c"), Var("x")))


def test_fresh_names():
    assert fresh_name("x", []) == "x"
    assert fresh_name("x", ["x", "x1"]) == "x2"
    assert fresh_name("Y2", ["Y2"]) == "Y1"


def test_declared_arity_is_enforced():
    try:
        parse_formula("s(0, 0) = 0")
    except ArityMismatch:
        pass
    else:
        raise AssertionError("a binary s should be rejected")


## Printing and parsing agree on random formulas

terms = st.recursive(
    st.sampled_from([Var("a"), Var("b"), Var("x"), Fn("c"), Fn("0")]),
    lambda inner: inner.map(lambda t: Fn("s", (t,))),
    max_leaves=3,
)
atoms = st.one_of(
    st.just(BOT),
    st.just(Atom("r")),
    terms.map(lambda t: Atom("p", (t,))),
    st.tuples(terms, terms).map(lambda ts: Atom("q", ts)),
    st.tuples(terms, terms).map(lambda ts: eq(*ts)),
    st.tuples(st.sampled_from(["X", "Y"]), terms).map(lambda nt: SetAtom(*nt)),
)


def _extend(inner):
    return st.one_of(
        st.tuples(st.sampled_from(["&", "|", "->"]), inner, inner).map(lambda t: Binary(*t)),
        st.tuples(st.sampled_from(["x", "a"]), inner).map(lambda t: forall(*t)),
        st.tuples(st.sampled_from(["x", "b"]), inner).map(lambda t: Binary("|", Atom("r"), forall(*t))),
        st.tuples(st.sampled_from(["X", "Y"]), inner).map(lambda t: forall2(*t)),
    )


formulas = st.recursive(atoms, _extend, max_leaves=8)


@settings(max_examples=500, deadline=None)
@given(formulas)
def test_print_then_parse_is_identity(f):
    assert parse_formula(str(f)) == f


## Substituting a set variable keeps the level


def _parameter_free(inner):
    return st.one_of(
        st.tuples(st.sampled_from(["&", "|", "->"]), inner, inner).map(lambda t: Binary(*t)),
        st.tuples(st.sampled_from(["x", "a"]), inner).map(lambda t: forall(*t)),
        inner.map(lambda g: forall2("Z", substitute_set(substitute_set(g, "X", "Z"), "Y", "Z"))),
    )


parameter_free_formulas = st.recursive(atoms, _parameter_free, max_leaves=8)


@settings(max_examples=500, deadline=None)
@given(parameter_free_formulas, parameter_free_formulas, st.integers(min_value=0, max_value=2))
def test_set_substitution_stays_within_the_level(phi, body, n):
    assume(level_at_most(phi, n) and level_at_most(body, n))
    result = substitute_set(phi, "X", abstract("x", body))
    assert level_at_most(result, n)
    assert is_member(result, n)
