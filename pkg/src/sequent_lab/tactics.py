"""Constructors that assemble derivation nodes from their premises.

Each constructor computes the conclusion from the premises and weakens premises so that they share
one context. Left rules put the main formula into the conclusion antecedent; if a premise already
contains it, it stays there (the antecedent is a set).
"""
from typing import Iterable, List, Optional, Sequence, Set, Tuple

from sequent_lab.config import settings
from sequent_lab.errors import InvalidDerivation
from sequent_lab.formula_core import (
    BOT,
    Abstract,
    Binary,
    Formula,
    Quant,
    Quant2,
    Term,
    Var,
    open_set,
    open_term,
)
from sequent_lab.sequent_kernel import LIT, Derivation, Sequent, _node_reasons, weaken_to


def _finish(d: Derivation) -> Derivation:
    if settings.STRICT_BUILD:
        reasons = _node_reasons(d, LIT)
        if reasons:
            raise InvalidDerivation(f"{d.rule} node does not fit its rule: {reasons[0]}")
    return d


def _context(parts: Sequence[Tuple[Derivation, Optional[Formula]]]) -> Set[Formula]:
    gamma: Set[Formula] = set()
    for d, added in parts:
        gamma |= d.conclusion.ante - ({added} if added is not None else set())
    return gamma


def _align(parts: Sequence[Tuple[Derivation, Optional[Formula]]], gamma: Set[Formula]) -> Tuple[Derivation, ...]:
    return tuple(weaken_to(d, gamma | ({added} if added is not None else set())) for d, added in parts)


def _expect(main: Formula, cls: type, tag: str) -> None:
    if not isinstance(main, cls) or getattr(main, "op", getattr(main, "kind", None)) != tag:
        raise InvalidDerivation(f"Expected a {tag} formula, got {main}")


def axiom(formula: Formula, ctx: Iterable[Formula] = ()) -> Derivation:
    return _finish(Derivation("Id", Sequent.of(list(ctx) + [formula], formula), main=formula))


def bot_left(succedent: Optional[Formula] = None, ctx: Iterable[Formula] = ()) -> Derivation:
    return _finish(Derivation("BotL", Sequent.of(list(ctx) + [BOT], succedent)))


def bot_right(p: Derivation) -> Derivation:
    if p.conclusion.succedent is not None:
        raise InvalidDerivation("BotR needs an empty succedent above")
    return _finish(Derivation("BotR", p.conclusion.with_succedent(BOT), (p,), main=BOT))


def cut(left: Derivation, right: Derivation) -> Derivation:
    """Cut on the succedent of `left`"""
    phi = left.conclusion.succedent
    if phi is None:
        raise InvalidDerivation("The left premise of a cut must have a succedent")
    gamma = _context([(left, None), (right, phi)])
    left, right = _align([(left, None), (right, phi)], gamma)
    return _finish(Derivation("Cut", Sequent.of(gamma, right.conclusion.succedent), (left, right), main=phi))


def and_left(p: Derivation, main: Formula, index: int) -> Derivation:
    _expect(main, Binary, "&")
    minor = main.left if index == 1 else main.right  # type: ignore
    gamma = _context([(p, minor)])
    (p,) = _align([(p, minor)], gamma)
    return _finish(Derivation("AndL", Sequent.of(gamma | {main}, p.conclusion.succedent), (p,), main=main, index=index))


def and_right(p1: Derivation, p2: Derivation) -> Derivation:
    a, b = p1.conclusion.succedent, p2.conclusion.succedent
    if a is None or b is None:
        raise InvalidDerivation("AndR premises need succedents")
    main = Binary("&", a, b)
    gamma = _context([(p1, None), (p2, None)])
    p1, p2 = _align([(p1, None), (p2, None)], gamma)
    return _finish(Derivation("AndR", Sequent.of(gamma, main), (p1, p2), main=main))


def or_left(p1: Derivation, p2: Derivation, main: Formula) -> Derivation:
    _expect(main, Binary, "|")
    parts = [(p1, main.left), (p2, main.right)]  # type: ignore
    if p1.conclusion.succedent != p2.conclusion.succedent:
        raise InvalidDerivation("OrL premises must share their succedent")
    gamma = _context(parts)
    p1, p2 = _align(parts, gamma)
    return _finish(Derivation("OrL", Sequent.of(gamma | {main}, p1.conclusion.succedent), (p1, p2), main=main))


def or_right(p: Derivation, main: Formula, index: int) -> Derivation:
    _expect(main, Binary, "|")
    return _finish(Derivation("OrR", p.conclusion.with_succedent(main), (p,), main=main, index=index))


def imp_left(p1: Derivation, p2: Derivation, main: Formula) -> Derivation:
    """From Γ ⇒ A and B, Γ ⇒ Π infer A→B, Γ ⇒ Π"""
    _expect(main, Binary, "->")
    parts = [(p1, None), (p2, main.right)]  # type: ignore
    gamma = _context(parts)
    p1, p2 = _align(parts, gamma)
    return _finish(Derivation("ImpL", Sequent.of(gamma | {main}, p2.conclusion.succedent), (p1, p2), main=main))


def imp_right(p: Derivation, main: Formula) -> Derivation:
    _expect(main, Binary, "->")
    gamma = _context([(p, main.left)])  # type: ignore
    (p,) = _align([(p, main.left)], gamma)  # type: ignore
    return _finish(Derivation("ImpR", Sequent.of(gamma, main), (p,), main=main))


def all_left(p: Derivation, main: Formula, term: Term) -> Derivation:
    _expect(main, Quant, "all")
    minor = open_term(main.body, term)  # type: ignore
    gamma = _context([(p, minor)])
    (p,) = _align([(p, minor)], gamma)
    return _finish(Derivation("AllL", Sequent.of(gamma | {main}, p.conclusion.succedent), (p,), main=main, term=term))


def all_right(p: Derivation, main: Formula, eigen: str) -> Derivation:
    _expect(main, Quant, "all")
    return _finish(Derivation("AllR", p.conclusion.with_succedent(main), (p,), main=main, eigen=eigen))


def ex_left(p: Derivation, main: Formula, eigen: str) -> Derivation:
    _expect(main, Quant, "ex")
    minor = open_term(main.body, Var(eigen))  # type: ignore
    gamma = _context([(p, minor)])
    (p,) = _align([(p, minor)], gamma)
    return _finish(Derivation("ExL", Sequent.of(gamma | {main}, p.conclusion.succedent), (p,), main=main, eigen=eigen))


def ex_right(p: Derivation, main: Formula, term: Term) -> Derivation:
    _expect(main, Quant, "ex")
    return _finish(Derivation("ExR", p.conclusion.with_succedent(main), (p,), main=main, term=term))


def all2_left(p: Derivation, main: Formula, tau: Abstract) -> Derivation:
    _expect(main, Quant2, "All")
    minor = open_set(main.body, tau)  # type: ignore
    gamma = _context([(p, minor)])
    (p,) = _align([(p, minor)], gamma)
    return _finish(
        Derivation("All2L", Sequent.of(gamma | {main}, p.conclusion.succedent), (p,), main=main, abstract=tau)
    )


def all2_right(p: Derivation, main: Formula, eigen: str) -> Derivation:
    _expect(main, Quant2, "All")
    return _finish(Derivation("All2R", p.conclusion.with_succedent(main), (p,), main=main, eigen=eigen))


def ex2_left(p: Derivation, main: Formula, eigen: str) -> Derivation:
    _expect(main, Quant2, "Ex")
    minor = open_set(main.body, eigen)  # type: ignore
    gamma = _context([(p, minor)])
    (p,) = _align([(p, minor)], gamma)
    return _finish(
        Derivation("Ex2L", Sequent.of(gamma | {main}, p.conclusion.succedent), (p,), main=main, eigen=eigen)
    )


def ex2_right(p: Derivation, main: Formula, tau: Abstract) -> Derivation:
    _expect(main, Quant2, "Ex")
    return _finish(Derivation("Ex2R", p.conclusion.with_succedent(main), (p,), main=main, abstract=tau))


def chain_cuts(lemmas: List[Derivation], goal: Derivation) -> Derivation:
    """Discharge antecedent formulas of `goal` with lemmas proving them, innermost cut first"""
    result = goal
    for lemma in reversed(lemmas):
        result = cut(lemma, result)
    return result
