"""Terms, first- and second-order formulas and abstracts.

Bound variables are stored as de Bruijn indices (a locally nameless representation): term binders
(first-order quantifiers and the lambda of an abstract) number their variables with `BVar`, second-order
quantifiers number theirs with an integer `SetAtom.var`. Free variables keep their names. Two
alpha-equivalent formulas are therefore the same Python value, with equal hashes.
"""
import enum
import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, Optional, Set, Tuple, Union

from sequent_lab.config import settings
from sequent_lab.errors import ArityMismatch

BOUND_TERM_NAMES = ("x", "y", "z", "u", "v", "w")


## Terms


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class BVar:
    index: int

    def __str__(self) -> str:
        return f"#{self.index}"


@dataclass(frozen=True)
class Fn:
    name: str
    args: Tuple["Term", ...] = ()

    def __str__(self) -> str:
        return format_term(self)


Term = Union[Var, BVar, Fn]


def term_vars(t: Term) -> FrozenSet[str]:
    if isinstance(t, Var):
        return frozenset([t.name])
    if isinstance(t, Fn):
        return frozenset().union(*(term_vars(a) for a in t.args)) if t.args else frozenset()
    return frozenset()


def term_loose(t: Term) -> FrozenSet[int]:
    if isinstance(t, BVar):
        return frozenset([t.index])
    if isinstance(t, Fn):
        return frozenset().union(*(term_loose(a) for a in t.args)) if t.args else frozenset()
    return frozenset()


def shift_term(t: Term, by: int, cutoff: int = 0) -> Term:
    if isinstance(t, BVar):
        return BVar(t.index + by) if t.index >= cutoff else t
    if isinstance(t, Fn) and t.args:
        return Fn(t.name, tuple(shift_term(a, by, cutoff) for a in t.args))
    return t


def replace_var_in_term(t: Term, name: str, value: Term) -> Term:
    if isinstance(t, Var):
        return value if t.name == name else t
    if isinstance(t, Fn) and t.args:
        return Fn(t.name, tuple(replace_var_in_term(a, name, value) for a in t.args))
    return t


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, Fn):
        for a in t.args:
            yield from subterms(a)


def term_depth(t: Term) -> int:
    if isinstance(t, Fn) and t.args:
        return 1 + max(term_depth(a) for a in t.args)
    return 0


def format_term(t: Term, names: Tuple[str, ...] = ()) -> str:
    """Print a term, `names[i]` being the display name of the i-th enclosing term binder"""
    if isinstance(t, Var):
        return t.name
    if isinstance(t, BVar):
        return names[t.index] if t.index < len(names) else f"#{t.index}"
    if not t.args:
        return t.name
    return f"{t.name}(" + ", ".join(format_term(a, names) for a in t.args) + ")"


## Formulas


class _Node:
    """Shared caches of every formula node"""

    @cached_property
    def _hash(self) -> int:
        return hash((type(self).__name__,) + tuple(getattr(self, f) for f in self.__dataclass_fields__))  # type: ignore

    def __hash__(self) -> int:
        return self._hash

    @cached_property
    def free_term_vars(self) -> FrozenSet[str]:
        """Fv: names of the free term variables"""
        return _free_term_vars(self)  # type: ignore

    @cached_property
    def free_set_vars(self) -> FrozenSet[str]:
        """FV: names of the free set variables"""
        return _free_set_vars(self)  # type: ignore

    @cached_property
    def loose_set_indices(self) -> FrozenSet[int]:
        return _loose_set(self, 0)  # type: ignore

    @cached_property
    def level(self) -> "Level":
        return _level(self)  # type: ignore

    @cached_property
    def rank(self) -> int:
        return _rank(self)  # type: ignore

    @cached_property
    def text(self) -> str:
        return format_formula(self)  # type: ignore

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True, eq=True)
class Atom(_Node):
    """First-order atom `p(t1, ..., tk)`; equality is the atom with predicate `=`"""

    pred: str
    args: Tuple[Term, ...] = ()

    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class SetAtom(_Node):
    """Set-variable atom `X(t)`: `var` is a name when free, a de Bruijn index when bound"""

    var: Union[str, int]
    arg: Term

    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class Bot(_Node):
    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class Binary(_Node):
    op: str  # "&", "|" or "->"
    left: "Formula"
    right: "Formula"

    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class Quant(_Node):
    """First-order quantifier, `kind` is `all` or `ex`, the body refers to its variable as BVar(0)"""

    kind: str
    body: "Formula"

    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class Quant2(_Node):
    """Second-order quantifier, `kind` is `All` or `Ex`, the body refers to its variable as index 0"""

    kind: str
    body: "Formula"

    __hash__ = _Node.__hash__


Formula = Union[Atom, SetAtom, Bot, Binary, Quant, Quant2]


@dataclass(frozen=True)
class Abstract:
    """An abstract `\\x. body`, the body refers to x as BVar(0)"""

    body: Formula
    _cache: Dict[str, str] = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __call__(self, t: Term) -> Formula:
        return instantiate(self, t)

    def __str__(self) -> str:
        if "text" not in self._cache:
            self._cache["text"] = format_abstract(self)
        return self._cache["text"]

    @property
    def free_term_vars(self) -> FrozenSet[str]:
        return self.body.free_term_vars

    @property
    def free_set_vars(self) -> FrozenSet[str]:
        return self.body.free_set_vars

    @property
    def level(self) -> "Level":
        return self.body.level


class NotParameterFree(enum.Enum):
    NOT_PARAMETER_FREE = "NotParameterFree"

    def __str__(self) -> str:
        return self.value


NOT_PARAMETER_FREE = NotParameterFree.NOT_PARAMETER_FREE
Level = Union[int, NotParameterFree]

BOT = Bot()


def top() -> Formula:
    """⊤ is ⊥→⊥"""
    return Binary("->", BOT, BOT)


TOP = top()


def conj(left: Formula, right: Formula) -> Formula:
    return Binary("&", left, right)


def disj(left: Formula, right: Formula) -> Formula:
    return Binary("|", left, right)


def imp(left: Formula, right: Formula) -> Formula:
    return Binary("->", left, right)


def neg(f: Formula) -> Formula:
    return Binary("->", f, BOT)


def conj_all(formulas: Iterable[Formula]) -> Formula:
    """Left-associated conjunction, ⊤ for an empty sequence"""
    result: Optional[Formula] = None
    for f in formulas:
        result = f if result is None else conj(result, f)
    return result if result is not None else TOP


def eq(a: Term, b: Term) -> Formula:
    return Atom("=", (a, b))


def atom(pred: str, *args: Term) -> Formula:
    return Atom(pred, tuple(args))


def set_atom(name: str, arg: Term) -> Formula:
    return SetAtom(name, arg)


## Traversal


def _map(
    f: Formula,
    on_term: Callable[[Term, int], Term],
    on_set: Callable[[SetAtom, int, int], Formula],
    td: int = 0,
    sd: int = 0,
) -> Formula:
    """Rebuild a formula, rewriting its terms and set atoms; td and sd count enclosing term and set binders"""
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(on_term(a, td) for a in f.args)) if f.args else f
    if isinstance(f, SetAtom):
        return on_set(SetAtom(f.var, on_term(f.arg, td)), td, sd)
    if isinstance(f, Bot):
        return f
    if isinstance(f, Binary):
        return Binary(f.op, _map(f.left, on_term, on_set, td, sd), _map(f.right, on_term, on_set, td, sd))
    if isinstance(f, Quant):
        return Quant(f.kind, _map(f.body, on_term, on_set, td + 1, sd))
    if isinstance(f, Quant2):
        return Quant2(f.kind, _map(f.body, on_term, on_set, td, sd + 1))
    raise TypeError(f"Not a formula: {f!r}")


def _keep_set(a: SetAtom, td: int, sd: int) -> Formula:
    return a


def _keep_term(t: Term, td: int) -> Term:
    return t


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, Binary):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    elif isinstance(f, (Quant, Quant2)):
        yield from subformulas(f.body)


def terms_of(f: Formula) -> Iterator[Term]:
    for sub in subformulas(f):
        if isinstance(sub, Atom):
            yield from sub.args
        elif isinstance(sub, SetAtom):
            yield sub.arg


def ground_terms(f: Formula) -> Set[Term]:
    """Closed subterms of a formula: no free names, no bound indices"""
    found = set()
    for t in terms_of(f):
        for sub in subterms(t):
            if isinstance(sub, Fn) and not term_vars(sub) and not term_loose(sub):
                found.add(sub)
    return found


def open_terms(f: Formula) -> Set[Term]:
    """Subterms free of bound indices, free names allowed"""
    found = set()
    for t in terms_of(f):
        for sub in subterms(t):
            if not isinstance(sub, BVar) and not term_loose(sub):
                found.add(sub)
    return found


def predicates_of(f: Formula) -> Set[str]:
    return {sub.pred for sub in subformulas(f) if isinstance(sub, Atom)}


def functions_of(f: Formula) -> Dict[str, int]:
    found: Dict[str, int] = {}
    for t in terms_of(f):
        for sub in subterms(t):
            if isinstance(sub, Fn):
                found[sub.name] = len(sub.args)
    return found


def _free_term_vars(f: Formula) -> FrozenSet[str]:
    if isinstance(f, Atom):
        return frozenset().union(*(term_vars(a) for a in f.args)) if f.args else frozenset()
    if isinstance(f, SetAtom):
        return term_vars(f.arg)
    if isinstance(f, Binary):
        return f.left.free_term_vars | f.right.free_term_vars
    if isinstance(f, (Quant, Quant2)):
        return f.body.free_term_vars
    return frozenset()


def _free_set_vars(f: Formula) -> FrozenSet[str]:
    if isinstance(f, SetAtom):
        return frozenset([f.var]) if isinstance(f.var, str) else frozenset()
    if isinstance(f, Binary):
        return f.left.free_set_vars | f.right.free_set_vars
    if isinstance(f, (Quant, Quant2)):
        return f.body.free_set_vars
    return frozenset()


def _loose_set(f: Formula, depth: int) -> FrozenSet[int]:
    if isinstance(f, SetAtom):
        if isinstance(f.var, int) and f.var >= depth:
            return frozenset([f.var - depth])
        return frozenset()
    if isinstance(f, Binary):
        return _loose_set(f.left, depth) | _loose_set(f.right, depth)
    if isinstance(f, Quant):
        return _loose_set(f.body, depth)
    if isinstance(f, Quant2):
        return _loose_set(f.body, depth + 1)
    return frozenset()


def free_vars(formulas: Iterable[Formula]) -> Set[str]:
    found: Set[str] = set()
    for f in formulas:
        found |= f.free_term_vars
    return found


def free_set_vars(formulas: Iterable[Formula]) -> Set[str]:
    found: Set[str] = set()
    for f in formulas:
        found |= f.free_set_vars
    return found


## Level and rank


def _level(f: Formula) -> Level:
    if isinstance(f, (Atom, SetAtom, Bot)):
        return -1
    if isinstance(f, Binary):
        left, right = f.left.level, f.right.level
        if left is NOT_PARAMETER_FREE or right is NOT_PARAMETER_FREE:
            return NOT_PARAMETER_FREE
        return max(left, right)  # type: ignore
    if isinstance(f, Quant):
        return f.body.level
    if isinstance(f, Quant2):
        inner = f.body.level
        if inner is NOT_PARAMETER_FREE:
            return NOT_PARAMETER_FREE
        if f.body.free_set_vars or not f.body.loose_set_indices <= {0}:
            return NOT_PARAMETER_FREE
        return inner + 1  # type: ignore
    raise TypeError(f"Not a formula: {f!r}")


def level(f: Formula) -> Level:
    """
    Least n ≥ −1 such that the formula is parameter-free at level n.

    Level −1 means no second-order quantifier at all. A second-order quantified subformula QX.ξ is
    one level above ξ, provided ξ has no free set variable other than X; otherwise the result is
    `NOT_PARAMETER_FREE`.
    """
    return f.level


def level_at_most(f: Formula, n: int) -> bool:
    lv = f.level
    return lv is not NOT_PARAMETER_FREE and lv <= n  # type: ignore


def is_member(f: Formula, n: int) -> bool:
    """Membership in the parameter-free class at level n, read off the grammar clause by clause"""
    if isinstance(f, (Atom, SetAtom, Bot)):
        return n >= -1
    if isinstance(f, Binary):
        return is_member(f.left, n) and is_member(f.right, n)
    if isinstance(f, Quant):
        return is_member(f.body, n)
    if isinstance(f, Quant2):
        if n < 0:
            return False
        parameter_free = not _free_set_vars(f.body) and _loose_set(f.body, 0) <= {0}
        return parameter_free and is_member(f.body, n - 1)
    raise TypeError(f"Not a formula: {f!r}")


def _rank(f: Formula) -> int:
    if isinstance(f, Binary):
        return max(f.left.rank, f.right.rank) + 1
    if isinstance(f, Quant):
        return f.body.rank + 1
    return 0


def rank(f: Formula) -> int:
    """Cut-complexity: 0 for atoms, ⊥ and second-order quantified formulas"""
    return f.rank


def positive_in(f: Formula, name: str) -> bool:
    """True iff every free occurrence of the set variable `name` is positive"""

    def walk(g: Formula, positive: bool) -> bool:
        if isinstance(g, SetAtom):
            return positive or g.var != name
        if isinstance(g, Binary):
            left_sign = not positive if g.op == "->" else positive
            return walk(g.left, left_sign) and walk(g.right, positive)
        if isinstance(g, (Quant, Quant2)):
            return walk(g.body, positive)
        return True

    return walk(f, True)


## Substitution


def _subst_bvar_term(t: Term, k: int, value: Term, td: int) -> Term:
    if isinstance(t, BVar):
        if t.index == k + td:
            return shift_term(value, td)
        if t.index > k + td:
            return BVar(t.index - 1)
        return t
    if isinstance(t, Fn) and t.args:
        return Fn(t.name, tuple(_subst_bvar_term(a, k, value, td) for a in t.args))
    return t


def open_term(body: Formula, value: Term) -> Formula:
    """Instantiate the outermost term binder of a body (BVar(0)) with a term"""
    return _map(body, lambda t, td: _subst_bvar_term(t, 0, value, td), _keep_set)


def instantiate(tau: Abstract, t: Term) -> Formula:
    """τ(t): the body of the abstract with t for its bound variable"""
    return open_term(tau.body, t)


def open_set(body: Formula, value: Union[str, Abstract]) -> Formula:
    """Instantiate the outermost set binder of a body with a set variable name or an abstract"""

    def on_set(a: SetAtom, td: int, sd: int) -> Formula:
        if not isinstance(a.var, int) or a.var < sd:
            return a
        if a.var > sd:
            return SetAtom(a.var - 1, a.arg)
        if isinstance(value, str):
            return SetAtom(value, a.arg)
        return instantiate(value, a.arg)

    return _map(body, _keep_term, on_set)


def substitute_term(f: Formula, name: str, value: Term) -> Formula:
    """Replace the free term variable `name`; bound variables are indices so nothing is captured"""
    if name not in f.free_term_vars:
        return f
    return _map(f, lambda t, td: replace_var_in_term(t, name, value), _keep_set)


def substitute_set(f: Formula, name: str, value: Union[str, Abstract]) -> Formula:
    """Replace every atom X(t) of the free set variable `name` by τ(t)"""
    if name not in f.free_set_vars:
        return f

    def on_set(a: SetAtom, td: int, sd: int) -> Formula:
        if a.var != name:
            return a
        if isinstance(value, str):
            return SetAtom(value, a.arg)
        return instantiate(value, a.arg)

    return _map(f, _keep_term, on_set)


def substitute_term_abstract(tau: Abstract, name: str, value: Term) -> Abstract:
    return Abstract(substitute_term(tau.body, name, value))


def substitute_set_abstract(tau: Abstract, name: str, value: Union[str, Abstract]) -> Abstract:
    return Abstract(substitute_set(tau.body, name, value))


## Binders built from names


def _close_term(f: Formula, name: str) -> Formula:
    def on_term(t: Term, td: int) -> Term:
        return _close_in_term(shift_term(t, 1, td), name, td)

    return _map(f, on_term, _keep_set)


def _close_in_term(t: Term, name: str, td: int) -> Term:
    if isinstance(t, Var):
        return BVar(td) if t.name == name else t
    if isinstance(t, Fn) and t.args:
        return Fn(t.name, tuple(_close_in_term(a, name, td) for a in t.args))
    return t


def _close_set(f: Formula, name: str) -> Formula:
    def on_set(a: SetAtom, td: int, sd: int) -> Formula:
        if a.var == name:
            return SetAtom(sd, a.arg)
        if isinstance(a.var, int) and a.var >= sd:
            return SetAtom(a.var + 1, a.arg)
        return a

    return _map(f, _keep_term, on_set)


def forall(name: str, body: Formula) -> Formula:
    return Quant("all", _close_term(body, name))


def exists(name: str, body: Formula) -> Formula:
    return Quant("ex", _close_term(body, name))


def forall2(name: str, body: Formula) -> Formula:
    return Quant2("All", _close_set(body, name))


def exists2(name: str, body: Formula) -> Formula:
    return Quant2("Ex", _close_set(body, name))


def abstract(name: str, body: Formula) -> Abstract:
    return Abstract(_close_term(body, name))


def quantify(kind: str, name: str, body: Formula) -> Formula:
    builders = {"all": forall, "ex": exists, "All": forall2, "Ex": exists2}
    return builders[kind](name, body)


## Fresh names


def fresh_name(base: str, avoid: Iterable[str]) -> str:
    taken = set(avoid)
    if base not in taken:
        return base
    stem = base.rstrip("0123456789") or base
    for i in itertools.count(1):
        candidate = f"{stem}{i}"
        if candidate not in taken:
            return candidate
    raise AssertionError("unreachable")


def _bound_name_supply(avoid: FrozenSet[str], upper: bool) -> Iterator[str]:
    if upper:
        pool: Iterable[str] = (f"X{i}" for i in itertools.count(1))
    else:
        pool = itertools.chain(BOUND_TERM_NAMES, (f"{n}{i}" for i in itertools.count(1) for n in BOUND_TERM_NAMES))
    return (n for n in pool if n not in avoid)


## Printing

# precedence: "->" 0, "|" 1, "&" 2, atoms 3
_PREC = {"->": 0, "|": 1, "&": 2}


class _Printer:
    def __init__(self, free_terms: FrozenSet[str], free_sets: FrozenSet[str]) -> None:
        self._term_supply = _bound_name_supply(free_terms, False)
        self._set_supply = _bound_name_supply(free_sets, True)
        self._term_pool: list = []
        self._set_pool: list = []

    def term_name(self, depth: int) -> str:
        while len(self._term_pool) <= depth:
            self._term_pool.append(next(self._term_supply))
        return self._term_pool[depth]

    def set_name(self, depth: int) -> str:
        while len(self._set_pool) <= depth:
            self._set_pool.append(next(self._set_supply))
        return self._set_pool[depth]

    def formula(self, f: Formula, names: Tuple[str, ...], sets: Tuple[str, ...], prec: int, rightmost: bool) -> str:
        if isinstance(f, Atom):
            if f.pred == "=" and len(f.args) == 2:
                return f"{format_term(f.args[0], names)} = {format_term(f.args[1], names)}"
            if not f.args:
                return f.pred
            return f"{f.pred}(" + ", ".join(format_term(a, names) for a in f.args) + ")"
        if isinstance(f, SetAtom):
            var = f.var if isinstance(f.var, str) else sets[f.var]
            return f"{var}({format_term(f.arg, names)})"
        if isinstance(f, Bot):
            return "bot"
        if isinstance(f, Binary):
            own = _PREC[f.op]
            if own < prec:
                return "(" + self.formula(f, names, sets, 0, True) + ")"
            if f.op == "->":
                left = self.formula(f.left, names, sets, 1, False)
                right = self.formula(f.right, names, sets, 0, rightmost)
            else:
                left = self.formula(f.left, names, sets, own, False)
                right = self.formula(f.right, names, sets, own + 1, rightmost)
            return f"{left} {f.op} {right}"
        if isinstance(f, Quant):
            name = self.term_name(len(names))
            text = f"{f.kind} {name}. " + self.formula(f.body, (name,) + names, sets, 0, True)
            return text if rightmost else f"({text})"
        if isinstance(f, Quant2):
            name = self.set_name(len(sets))
            text = f"{f.kind} {name}. " + self.formula(f.body, names, (name,) + sets, 0, True)
            return text if rightmost else f"({text})"
        raise TypeError(f"Not a formula: {f!r}")


def format_formula(f: Formula) -> str:
    """Canonical text of a formula; bound names are chosen by binder depth"""
    return _Printer(f.free_term_vars, f.free_set_vars).formula(f, (), (), 0, True)


def format_abstract(tau: Abstract) -> str:
    printer = _Printer(tau.body.free_term_vars, tau.body.free_set_vars)
    name = printer.term_name(0)
    # the lambda occupies depth 0, the body's own binders start at depth 1
    return f"\\{name}. " + printer.formula(tau.body, (name,), (), 0, True)


## Languages


@dataclass(frozen=True)
class Language:
    """Declared function and predicate symbols with their arities"""

    functions: Tuple[Tuple[str, int], ...] = ()
    predicates: Tuple[Tuple[str, int], ...] = ()
    pr_symbols: Tuple[str, ...] = ()

    @cached_property
    def function_arity(self) -> Dict[str, int]:
        return dict(self.functions)

    @cached_property
    def predicate_arity(self) -> Dict[str, int]:
        return dict(self.predicates)

    def is_constant(self, name: str) -> bool:
        return name.isdigit() or name == "*" or self.function_arity.get(name) == 0

    def check_function(self, name: str, arity: int) -> None:
        declared = self.function_arity.get(name)
        if declared is not None and declared != arity:
            raise ArityMismatch(f"Function symbol {name} expects {declared} arguments, got {arity}")

    def check_predicate(self, name: str, arity: int) -> None:
        declared = self.predicate_arity.get(name)
        if declared is not None and declared != arity:
            raise ArityMismatch(f"Predicate symbol {name} expects {declared} arguments, got {arity}")

    def with_functions(self, extra: Dict[str, int]) -> "Language":
        merged = dict(self.functions)
        merged.update(extra)
        return Language(tuple(sorted(merged.items())), self.predicates, self.pr_symbols)

    def constants(self) -> Tuple[str, ...]:
        return tuple(name for name, arity in self.functions if arity == 0)


def arithmetic_language(pr_symbols: Optional[Iterable[str]] = None) -> Language:
    """The arithmetic preset: 0, s, = and a finite list of unary primitive-recursive symbols"""
    prs = tuple(pr_symbols if pr_symbols is not None else settings.PR_SYMBOLS)
    functions = [("0", 0), ("s", 1)] + [(name, 1) for name in prs]
    return Language(tuple(sorted(functions)), (("=", 2),), prs)


LANGUAGE_PA = arithmetic_language(())
DEFAULT_LANGUAGE = Language((("*", 0), ("0", 0), ("c", 0), ("s", 1)), (("=", 2),))

ZERO = Fn("0")


def succ(t: Term) -> Term:
    return Fn("s", (t,))


def numeral(n: int) -> Term:
    t: Term = ZERO
    for _ in range(n):
        t = succ(t)
    return t


def _loose_terms(f: Formula, depth: int) -> FrozenSet[int]:
    if isinstance(f, Atom):
        found: FrozenSet[int] = frozenset()
        for a in f.args:
            found |= frozenset(i - depth for i in term_loose(a) if i >= depth)
        return found
    if isinstance(f, SetAtom):
        return frozenset(i - depth for i in term_loose(f.arg) if i >= depth)
    if isinstance(f, Binary):
        return _loose_terms(f.left, depth) | _loose_terms(f.right, depth)
    if isinstance(f, Quant):
        return _loose_terms(f.body, depth + 1)
    if isinstance(f, Quant2):
        return _loose_terms(f.body, depth)
    return frozenset()


def is_locally_closed(f: Formula) -> bool:
    """No dangling de Bruijn index, neither for term nor for set binders"""
    return not _loose_terms(f, 0) and not f.loose_set_indices


def is_locally_closed_term(t: Term) -> bool:
    return not term_loose(t)


def is_locally_closed_abstract(tau: Abstract) -> bool:
    return _loose_terms(tau.body, 0) <= {0} and not tau.body.loose_set_indices
