from fractions import Fraction

import pytest

from sequent_lab.errors import NotHeyting, ParseError
from sequent_lab.formats import load, parse_label, read_mdl, read_pol
from sequent_lab.formula_core import Fn
from sequent_lab.grammar import parse_formula as f
from sequent_lab.lattice_lab import FiniteHeytingAlgebra, FinitePoset, HeytingFrame, Polarity, chain_algebra
from sequent_lab.semantics import Structure, interpret

THIRD_CHAIN = """\
algebra 3
elements 0 1/3 1
1 1 1
0 1 1
0 0 1
"""

TWO_CHAIN_FRAME = """\
frame 2 2
W 0 1
W' 0 1
1 1
0 1
unit 1
compose
0 0
0 1
residual
1 1
0 1
"""


def test_labels_are_exact():
    assert parse_label("1/2") == Fraction(1, 2)
    assert parse_label("3") == Fraction(3)
    assert parse_label("top") == "top"


def test_read_algebra():
    algebra = read_pol(THIRD_CHAIN)
    assert isinstance(algebra, FiniteHeytingAlgebra)
    assert algebra.elements == (0, Fraction(1, 3), 1)
    assert algebra.is_isomorphic(chain_algebra())


def test_read_poset_and_polarity():
    poset = read_pol("poset 2\nelements a b\n1 0\n0 1\n")
    assert isinstance(poset, FinitePoset)
    assert not isinstance(poset, FiniteHeytingAlgebra)
    polarity = read_pol("# a polarity\npolarity 3 2\nW a b c\nW' p q\n1 0\n0 1\n1 1\n")
    assert isinstance(polarity, Polarity)
    assert polarity.related("c", "q")
    assert not polarity.related("a", "q")
    unnamed = read_pol("polarity 1 1\n1\n")
    assert unnamed.w == ("w0",) and unnamed.w_prime == ("v0",)


def test_read_frame():
    frame = read_pol(TWO_CHAIN_FRAME)
    assert isinstance(frame, HeytingFrame)
    assert frame.unit == 1
    assert frame.compose(Fraction(0), Fraction(1)) == 0
    assert frame.residual(Fraction(1), Fraction(0)) == 0


def test_pol_errors_carry_positions():
    with pytest.raises(ParseError) as e:
        read_pol(THIRD_CHAIN.replace("0 1 1", "0 2 1"))
    assert (e.value.line, e.value.column) == (4, 3)
    with pytest.raises(ParseError) as e:
        read_pol("lattice 3\n")
    assert (e.value.line, e.value.column) == (1, 1)
    with pytest.raises(ParseError):
        read_pol(THIRD_CHAIN + "1 1 1\n")
    with pytest.raises(ParseError):
        read_pol("algebra 3\n1 1 1\n")
    with pytest.raises(ParseError):
        read_pol(TWO_CHAIN_FRAME.replace("unit 1", "unit 5"))
    with pytest.raises(NotHeyting):
        read_pol("algebra 2\nelements a b\n1 0\n0 1\n")


def test_read_mdl():
    s = read_mdl("algebra chain 0 1/2 1\nfunctions * s/1\ndepth 1\np s(*) -> 1/2\n")
    assert isinstance(s, Structure)
    assert s.universe == (Fn("*"), Fn("s", (Fn("*"),)))
    assert interpret(f("p(s(*))"), s) == Fraction(1, 2)
    assert interpret(f("p(*)"), s) == 0
    assert len(read_mdl("algebra boolean 2\n").algebra) == 4


def test_mdl_errors():
    with pytest.raises(ParseError) as e:
        read_mdl("algebra chain\nfunctions * s/1\np s(s(*)) -> 1\n")
    assert e.value.line == 3
    with pytest.raises(ParseError):
        read_mdl("functions *\n")
    with pytest.raises(ParseError):
        read_mdl("algebra chain\np * -> 7\n")
    with pytest.raises(ParseError):
        read_mdl("algebra tree 3\n")


def test_load_by_suffix(tmp_path):
    (tmp_path / "third.pol").write_text(THIRD_CHAIN)
    (tmp_path / "model.mdl").write_text("algebra file third.pol\np * -> 1/3\n")
    (tmp_path / "pool.fml").write_text("p\n# comment\nq -> r\n")
    assert isinstance(load(tmp_path / "third.pol"), FiniteHeytingAlgebra)
    model = load(tmp_path / "model.mdl")
    assert interpret(f("p(*)"), model) == Fraction(1, 3)
    assert load(tmp_path / "pool.fml") == [f("p"), f("q -> r")]
    (tmp_path / "notes.txt").write_text("p\n")
    with pytest.raises(ParseError):
        load(tmp_path / "notes.txt")
