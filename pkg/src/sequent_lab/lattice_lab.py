"""Finite polarities, Galois closures, concept lattices, Heyting frames and MacNeille completions.

Elements are arbitrary hashable labels: strings, exact `Fraction` values for chains, frozensets for
closed sets and down-sets. Orders are stored as boolean matrices; meet, join and implication tables are
derived from the order and cached, never supplied by the caller.
"""
import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, FrozenSet, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx
from networkx.algorithms.isomorphism import DiGraphMatcher
from pydantic import BaseModel

from sequent_lab.config import settings
from sequent_lab.errors import (
    IndexOutOfRange,
    NotAHeytingFrame,
    NotALattice,
    NotAPartialOrder,
    NotHeyting,
    SizeBoundExceeded,
)
from sequent_lab.lab_logger import LabLogger, get_logger

Label = Hashable


def label_text(x: Label) -> str:
    if isinstance(x, frozenset):
        return "{" + ",".join(sorted(label_text(y) for y in x)) + "}"
    return str(x)


def _set_key(x: FrozenSet[Label]) -> Tuple[int, str]:
    return (len(x), label_text(x))


## Posets, lattices and Heyting algebras


class FinitePoset:
    """A finite partial order, `matrix[i][j]` is true when `elements[i] ≤ elements[j]`"""

    def __init__(self, elements: Sequence[Label], matrix: Sequence[Sequence[bool]]) -> None:
        self.elements: Tuple[Label, ...] = tuple(elements)
        if len(set(self.elements)) != len(self.elements):
            raise NotAPartialOrder("Element labels must be distinct")
        n = len(self.elements)
        if len(matrix) != n or any(len(row) != n for row in matrix):
            raise NotAPartialOrder(f"Order matrix must be {n}x{n}")
        self.matrix: Tuple[Tuple[bool, ...], ...] = tuple(tuple(bool(v) for v in row) for row in matrix)
        self._index = {x: i for i, x in enumerate(self.elements)}
        self._validate_order()

    def _validate_order(self) -> None:
        m = self.matrix
        n = len(m)
        for i in range(n):
            if not m[i][i]:
                raise NotAPartialOrder(f"Not reflexive at {label_text(self.elements[i])}")
        for i, j in itertools.combinations(range(n), 2):
            if m[i][j] and m[j][i]:
                raise NotAPartialOrder(
                    f"Not antisymmetric: {label_text(self.elements[i])} and {label_text(self.elements[j])}"
                )
        for i, j, k in itertools.product(range(n), repeat=3):
            if m[i][j] and m[j][k] and not m[i][k]:
                raise NotAPartialOrder(f"Not transitive through {label_text(self.elements[j])}")

    @classmethod
    def from_leq(cls, elements: Sequence[Label], leq) -> "FinitePoset":
        return cls(elements, [[leq(a, b) for b in elements] for a in elements])

    @classmethod
    def from_pairs(cls, elements: Sequence[Label], pairs: Iterable[Tuple[Label, Label]]) -> "FinitePoset":
        """The reflexive transitive closure of the given `a ≤ b` pairs"""
        g = nx.DiGraph()
        g.add_nodes_from(elements)
        g.add_edges_from(pairs)
        closure = nx.transitive_closure(g, reflexive=True)
        return cls(elements, [[closure.has_edge(a, b) for b in elements] for a in elements])

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({', '.join(label_text(x) for x in self.elements)})"

    def index(self, a: Label) -> int:
        try:
            return self._index[a]
        except (KeyError, TypeError):
            raise IndexOutOfRange(f"{label_text(a)} is not an element") from None

    def leq(self, a: Label, b: Label) -> bool:
        return self.matrix[self.index(a)][self.index(b)]

    def upper_bounds(self, xs: Iterable[Label]) -> List[Label]:
        xs = list(xs)
        return [b for b in self.elements if all(self.leq(a, b) for a in xs)]

    def lower_bounds(self, xs: Iterable[Label]) -> List[Label]:
        xs = list(xs)
        return [b for b in self.elements if all(self.leq(b, a) for a in xs)]

    def least(self, xs: Sequence[Label]) -> Optional[Label]:
        for a in xs:
            if all(self.leq(a, b) for b in xs):
                return a
        return None

    def greatest(self, xs: Sequence[Label]) -> Optional[Label]:
        for a in xs:
            if all(self.leq(b, a) for b in xs):
                return a
        return None

    def sup(self, xs: Iterable[Label]) -> Optional[Label]:
        return self.least(self.upper_bounds(xs))

    def inf(self, xs: Iterable[Label]) -> Optional[Label]:
        return self.greatest(self.lower_bounds(xs))

    def graph(self) -> nx.DiGraph:
        """Strict order as a directed graph"""
        g = nx.DiGraph()
        g.add_nodes_from(self.elements)
        g.add_edges_from((a, b) for a in self.elements for b in self.elements if a != b and self.leq(a, b))
        return g

    def downsets(self) -> List[FrozenSet[Label]]:
        found = []
        for r in range(len(self.elements) + 1):
            for subset in itertools.combinations(self.elements, r):
                chosen = set(subset)
                if all(b in chosen for a in chosen for b in self.elements if self.leq(b, a)):
                    found.append(frozenset(chosen))
        return sorted(found, key=_set_key)

    def isomorphism(self, other: "FinitePoset") -> Optional[Dict[Label, Label]]:
        if len(self) != len(other):
            return None
        matcher = DiGraphMatcher(self.graph(), other.graph())
        if not matcher.is_isomorphic():
            return None
        return dict(matcher.mapping)

    def is_isomorphic(self, other: "FinitePoset") -> bool:
        return self.isomorphism(other) is not None


class FiniteLattice(FinitePoset):
    def __init__(self, elements: Sequence[Label], matrix: Sequence[Sequence[bool]]) -> None:
        super().__init__(elements, matrix)
        if not self.elements:
            raise NotALattice("A lattice has at least one element")
        for a, b in itertools.combinations(self.elements, 2):
            if self.sup([a, b]) is None:
                raise NotALattice(f"No join of {label_text(a)} and {label_text(b)}")
            if self.inf([a, b]) is None:
                raise NotALattice(f"No meet of {label_text(a)} and {label_text(b)}")

    @classmethod
    def of(cls, poset: FinitePoset):
        return cls(poset.elements, poset.matrix)

    @cached_property
    def _meet(self) -> Dict[Tuple[Label, Label], Label]:
        return {(a, b): self.inf([a, b]) for a in self.elements for b in self.elements}

    @cached_property
    def _join(self) -> Dict[Tuple[Label, Label], Label]:
        return {(a, b): self.sup([a, b]) for a in self.elements for b in self.elements}

    def meet(self, a: Label, b: Label) -> Label:
        return self._meet[(a, b)]

    def join(self, a: Label, b: Label) -> Label:
        return self._join[(a, b)]

    @cached_property
    def bottom(self) -> Label:
        return self.inf(self.elements)

    @cached_property
    def top(self) -> Label:
        return self.sup(self.elements)

    def meet_all(self, xs: Iterable[Label]) -> Label:
        result = self.top
        for x in xs:
            result = self.meet(result, x)
        return result

    def join_all(self, xs: Iterable[Label]) -> Label:
        result = self.bottom
        for x in xs:
            result = self.join(result, x)
        return result

    def is_distributive(self) -> bool:
        return all(
            self.meet(a, self.join(b, c)) == self.join(self.meet(a, b), self.meet(a, c))
            for a, b, c in itertools.product(self.elements, repeat=3)
        )


class FiniteHeytingAlgebra(FiniteLattice):
    """A finite lattice with relative pseudo-complements `a → b = max{c : a ∧ c ≤ b}`"""

    def __init__(self, elements: Sequence[Label], matrix: Sequence[Sequence[bool]]) -> None:
        super().__init__(elements, matrix)
        for a, b in itertools.product(self.elements, repeat=2):
            candidates = [c for c in self.elements if self.leq(self.meet(a, c), b)]
            if self.greatest(candidates) is None:
                raise NotHeyting(f"No implication {label_text(a)} → {label_text(b)}")

    @cached_property
    def _imp(self) -> Dict[Tuple[Label, Label], Label]:
        table = {}
        for a, b in itertools.product(self.elements, repeat=2):
            table[(a, b)] = self.greatest([c for c in self.elements if self.leq(self.meet(a, c), b)])
        return table

    def imp(self, a: Label, b: Label) -> Label:
        return self._imp[(a, b)]

    def neg(self, a: Label) -> Label:
        return self.imp(a, self.bottom)


def as_heyting(poset: FinitePoset) -> FiniteHeytingAlgebra:
    if isinstance(poset, FiniteHeytingAlgebra):
        return poset
    try:
        return FiniteHeytingAlgebra(poset.elements, poset.matrix)
    except NotALattice as e:
        raise NotHeyting(f"Not a lattice: {e}") from e


def chain_algebra(values: Optional[Iterable[Label]] = None) -> FiniteHeytingAlgebra:
    """A finite chain, by default the 3-chain 0 < 1/2 < 1 with exact rational labels"""
    if values is None:
        values = (Fraction(0), Fraction(1, 2), Fraction(1))
    ordered = sorted(values)
    return FiniteHeytingAlgebra(ordered, [[i <= j for j in range(len(ordered))] for i in range(len(ordered))])


def boolean_algebra(n: int) -> FiniteHeytingAlgebra:
    """Powerset of the atoms 0..n-1 ordered by inclusion"""
    subsets = [frozenset(c) for r in range(n + 1) for c in itertools.combinations(range(n), r)]
    return FiniteHeytingAlgebra.from_leq(subsets, lambda a, b: a <= b)  # type: ignore


def downset_algebra(poset: FinitePoset) -> FiniteHeytingAlgebra:
    return FiniteHeytingAlgebra.from_leq(poset.downsets(), lambda a, b: a <= b)  # type: ignore


def enumerate_posets(n: int, logger: Optional[LabLogger] = None) -> List[FinitePoset]:
    """
    All partial orders on the points 0..n-1 up to isomorphism.

    A poset on n points arises from one on n-1 points by adding a maximal point above a down-set, so
    the enumeration extends every representative by every down-set and keeps one poset per
    isomorphism class.

    Parameters:
        n: Number of points
        logger: Optional logger, one line per size

    Returns:
        posets: One representative per isomorphism class
    """
    log = get_logger(logger)
    level: List[FinitePoset] = [FinitePoset([], [])]
    for size in range(1, n + 1):
        buckets: Dict[str, List[nx.DiGraph]] = {}
        found: List[FinitePoset] = []
        new = size - 1
        for base in level:
            for below in base.downsets():
                elements = list(range(size))

                def leq(a: int, b: int, base: FinitePoset = base, below: FrozenSet[Label] = below) -> bool:
                    if b == new:
                        return a == new or a in below
                    if a == new:
                        return False
                    return base.leq(a, b)

                candidate = FinitePoset.from_leq(elements, leq)
                graph = candidate.graph()
                key = nx.weisfeiler_lehman_graph_hash(graph)
                bucket = buckets.setdefault(key, [])
                if any(nx.is_isomorphic(graph, other) for other in bucket):
                    continue
                bucket.append(graph)
                found.append(candidate)
        level = found
        log.info(f"{len(level)} posets on {size} points")
    return level


def heyting_catalogue(max_size: int, logger: Optional[LabLogger] = None) -> List[FiniteHeytingAlgebra]:
    """
    Every finite Heyting algebra with at most `max_size` elements, up to isomorphism.

    A finite distributive lattice is the down-set lattice of its poset of join-irreducibles, which has
    fewer points than the lattice has elements, and non-isomorphic posets give non-isomorphic lattices.
    """
    catalogue: List[FiniteHeytingAlgebra] = []
    for points in range(max_size):
        for poset in enumerate_posets(points):
            if len(poset.downsets()) <= max_size:
                catalogue.append(downset_algebra(poset))
    catalogue.sort(key=len)
    get_logger(logger).info(f"{len(catalogue)} Heyting algebras with at most {max_size} elements")
    return catalogue


def hasse_edges(poset: FinitePoset) -> List[Tuple[str, str]]:
    """Covering pairs (lower, upper) of the order, as element texts"""
    reduced = nx.transitive_reduction(poset.graph())
    return sorted((label_text(a), label_text(b)) for a, b in reduced.edges)


## Polarities and closed sets


@dataclass(frozen=True)
class Polarity:
    """⟨W, W′, R⟩ with `relation[i][j]` true when `w[i] R w_prime[j]`"""

    w: Tuple[Label, ...]
    w_prime: Tuple[Label, ...]
    relation: Tuple[Tuple[bool, ...], ...]

    def __post_init__(self) -> None:
        if len(self.relation) != len(self.w) or any(len(row) != len(self.w_prime) for row in self.relation):
            raise IndexOutOfRange(f"Relation must be a {len(self.w)}x{len(self.w_prime)} matrix")
        if len(set(self.w)) != len(self.w) or len(set(self.w_prime)) != len(self.w_prime):
            raise IndexOutOfRange("Carrier labels must be distinct")

    @classmethod
    def from_pairs(
        cls, w: Sequence[Label], w_prime: Sequence[Label], pairs: Iterable[Tuple[Label, Label]]
    ) -> "Polarity":
        related = set(pairs)
        return cls(tuple(w), tuple(w_prime), tuple(tuple((x, z) in related for z in w_prime) for x in w))

    @classmethod
    def from_poset(cls, poset: FinitePoset) -> "Polarity":
        """⟨A, A, ≤⟩"""
        return cls(poset.elements, poset.elements, poset.matrix)

    @cached_property
    def _w_index(self) -> Dict[Label, int]:
        return {x: i for i, x in enumerate(self.w)}

    @cached_property
    def _wp_index(self) -> Dict[Label, int]:
        return {z: j for j, z in enumerate(self.w_prime)}

    @cached_property
    def _rows(self) -> Tuple[int, ...]:
        return tuple(sum(1 << j for j, r in enumerate(row) if r) for row in self.relation)

    @cached_property
    def _cols(self) -> Tuple[int, ...]:
        return tuple(
            sum(1 << i for i in range(len(self.w)) if self.relation[i][j]) for j in range(len(self.w_prime))
        )

    def related(self, x: Label, z: Label) -> bool:
        return self.relation[self._index(self._w_index, x)][self._index(self._wp_index, z)]

    @staticmethod
    def _index(index: Dict[Label, int], a: Label) -> int:
        try:
            return index[a]
        except (KeyError, TypeError):
            raise IndexOutOfRange(f"{label_text(a)} is not in the carrier") from None

    def w_mask(self, xs: Iterable[Label]) -> int:
        return sum(1 << i for i in {self._index(self._w_index, x) for x in xs})

    def wp_mask(self, zs: Iterable[Label]) -> int:
        return sum(1 << j for j in {self._index(self._wp_index, z) for z in zs})

    def w_set(self, mask: int) -> FrozenSet[Label]:
        return frozenset(x for i, x in enumerate(self.w) if mask >> i & 1)

    def wp_set(self, mask: int) -> FrozenSet[Label]:
        return frozenset(z for j, z in enumerate(self.w_prime) if mask >> j & 1)

    def _up_mask(self, mask: int) -> int:
        result = (1 << len(self.w_prime)) - 1
        for i, row in enumerate(self._rows):
            if mask >> i & 1:
                result &= row
        return result

    def _down_mask(self, mask: int) -> int:
        result = (1 << len(self.w)) - 1
        for j, col in enumerate(self._cols):
            if mask >> j & 1:
                result &= col
        return result

    def up(self, xs: Iterable[Label]) -> FrozenSet[Label]:
        """X^▷, the elements of W′ related to every element of X"""
        return self.wp_set(self._up_mask(self.w_mask(xs)))

    def down(self, zs: Iterable[Label]) -> FrozenSet[Label]:
        """Z^◁, the elements of W related to every element of Z"""
        return self.w_set(self._down_mask(self.wp_mask(zs)))

    def closure(self, xs: Iterable[Label]) -> FrozenSet[Label]:
        """γ(X) = X^▷◁"""
        return self.w_set(self._down_mask(self._up_mask(self.w_mask(xs))))


def galois(p: Polarity, side: str, subset: Iterable[Label]) -> FrozenSet[Label]:
    """
    Apply one map of the Galois connection of a polarity.

    Parameters:
        p: The polarity
        side: `up` (S^▷, S ⊆ W), `down` (S^◁, S ⊆ W′) or `closure` (γ(S), S ⊆ W)
        subset: Labels of the carrier the map starts from

    Returns:
        subset: The image, as a frozenset of labels
    """
    if side == "up":
        return p.up(subset)
    if side == "down":
        return p.down(subset)
    if side == "closure":
        return p.closure(subset)
    raise ValueError(f"Unknown side {side!r}, expected up, down or closure")


@dataclass(frozen=True)
class ClosedSetLattice:
    """Gal(W) with X ∧ Y = X ∩ Y and X ∨ Y = γ(X ∪ Y); a frame adds X → Y"""

    polarity: Polarity
    members: Tuple[FrozenSet[Label], ...]
    frame: Optional["HeytingFrame"] = None

    def __len__(self) -> int:
        return len(self.members)

    def is_closed(self, xs: Iterable[Label]) -> bool:
        xs = frozenset(xs)
        return self.polarity.closure(xs) == xs

    def meet(self, x: FrozenSet[Label], y: FrozenSet[Label]) -> FrozenSet[Label]:
        return x & y

    def join(self, x: FrozenSet[Label], y: FrozenSet[Label]) -> FrozenSet[Label]:
        return self.polarity.closure(x | y)

    @property
    def top(self) -> FrozenSet[Label]:
        return frozenset(self.polarity.w)

    @property
    def bottom(self) -> FrozenSet[Label]:
        return self.polarity.closure(())

    def implication(self, x: FrozenSet[Label], y: FrozenSet[Label]) -> FrozenSet[Label]:
        """X → Y = {w : x ∘ w ∈ Y for every x ∈ X}, defined for frames only"""
        if self.frame is None:
            raise NotAHeytingFrame("monoid", "The polarity carries no monoid")
        frame = self.frame
        return frozenset(w for w in self.polarity.w if all(frame.compose(a, w) in y for a in x))

    def as_lattice(self) -> FiniteLattice:
        cls = FiniteHeytingAlgebra if self.frame is not None else FiniteLattice
        return cls.from_leq(self.members, lambda a, b: a <= b)  # type: ignore


def concept_lattice(p: Polarity, logger: Optional[LabLogger] = None) -> ClosedSetLattice:
    """
    Enumerate Gal(W): the closed sets are exactly the intersections of the extents z^◁, z ∈ W′, so
    the family is generated by intersecting with one extent at a time instead of closing all 2^|W|
    subsets.
    """
    if len(p.w) > settings.MAX_CLOSURE_CARRIER:
        raise SizeBoundExceeded(f"|W| = {len(p.w)} exceeds MAX_CLOSURE_CARRIER = {settings.MAX_CLOSURE_CARRIER}")
    family = {(1 << len(p.w)) - 1}
    for col in p._cols:
        family |= {m & col for m in family}
    members = tuple(sorted((p.w_set(m) for m in family), key=_set_key))
    get_logger(logger).info(f"{len(members)} closed sets over |W| = {len(p.w)}")
    return ClosedSetLattice(p, members)


## Heyting frames


class HeytingFrame:
    """⟨W, W′, R, ∘, ε, ⫞⟩ with full operation tables, validated on construction"""

    def __init__(
        self,
        polarity: Polarity,
        compose: Mapping[Tuple[Label, Label], Label],
        unit: Label,
        residual: Mapping[Tuple[Label, Label], Label],
    ) -> None:
        self.polarity = polarity
        self._compose = dict(compose)
        self.unit = unit
        self._residual = dict(residual)
        self.validate()

    def compose(self, x: Label, y: Label) -> Label:
        return self._compose[(x, y)]

    def residual(self, x: Label, z: Label) -> Label:
        return self._residual[(x, z)]

    def validate(self) -> None:
        """Raise NotAHeytingFrame naming the first law violated: monoid, residuation, exchange, weakening, contraction"""
        p = self.polarity
        w, wp = p.w, p.w_prime
        if self.unit not in w:
            raise NotAHeytingFrame("monoid", "unit outside W")
        for x, y in itertools.product(w, repeat=2):
            if self._compose.get((x, y)) not in w:
                raise NotAHeytingFrame("monoid", f"{label_text(x)}∘{label_text(y)} missing or outside W")
        for x in w:
            if self.compose(self.unit, x) != x or self.compose(x, self.unit) != x:
                raise NotAHeytingFrame("monoid", f"unit law fails at {label_text(x)}")
        for x, y, z in itertools.product(w, repeat=3):
            if self.compose(self.compose(x, y), z) != self.compose(x, self.compose(y, z)):
                raise NotAHeytingFrame("monoid", f"not associative at {label_text(x)}, {label_text(y)}, {label_text(z)}")
        for x, z in itertools.product(w, wp):
            if self._residual.get((x, z)) not in wp:
                raise NotAHeytingFrame("residuation", f"{label_text(x)}⫞{label_text(z)} missing or outside W′")
        for x, y, z in itertools.product(w, w, wp):
            if p.related(self.compose(x, y), z) != p.related(y, self.residual(x, z)):
                raise NotAHeytingFrame("residuation", f"fails at {label_text(x)}, {label_text(y)}, {label_text(z)}")
        for x, y, z in itertools.product(w, w, wp):
            if p.related(self.compose(x, y), z) and not p.related(self.compose(y, x), z):
                raise NotAHeytingFrame("exchange", f"fails at {label_text(x)}, {label_text(y)}, {label_text(z)}")
        for x, z in itertools.product(w, wp):
            if p.related(self.unit, z) and not p.related(x, z):
                raise NotAHeytingFrame("weakening", f"fails at {label_text(x)}, {label_text(z)}")
        for x, z in itertools.product(w, wp):
            if p.related(self.compose(x, x), z) and not p.related(x, z):
                raise NotAHeytingFrame("contraction", f"fails at {label_text(x)}, {label_text(z)}")


def heyting_frame_of(algebra: FiniteHeytingAlgebra) -> HeytingFrame:
    """W_A = ⟨A, A, ≤, ∧, ⊤, →⟩"""
    elements = algebra.elements
    return HeytingFrame(
        Polarity.from_poset(algebra),
        {(x, y): algebra.meet(x, y) for x in elements for y in elements},
        algebra.top,
        {(x, z): algebra.imp(x, z) for x in elements for z in elements},
    )


def frame_plus(frame: HeytingFrame, logger: Optional[LabLogger] = None) -> FiniteHeytingAlgebra:
    """
    The Heyting algebra W⁺ of Galois-closed sets of a frame.

    For every pair of closed sets the implication {y : x ∘ y ∈ Y for all x ∈ X} is checked against
    (X ⫞ Y^▷)^◁, and residuation X ∩ Y ⊆ Z ⇔ X ⊆ Y → Z is checked on every triple.

    Parameters:
        frame: A validated Heyting frame
        logger: Optional logger

    Returns:
        algebra: Closed sets ordered by inclusion, with its derived tables
    """
    p = frame.polarity
    lattice = ClosedSetLattice(p, concept_lattice(p, logger).members, frame)
    members = lattice.members
    for x, y in itertools.product(members, repeat=2):
        direct = lattice.implication(x, y)
        via_residual = p.down({frame.residual(a, z) for a in x for z in p.up(y)})
        if direct != via_residual:
            raise NotAHeytingFrame("residuation", f"{label_text(x)} → {label_text(y)} differs from (X⫞Y^▷)^◁")
    for x, y, z in itertools.product(members, repeat=3):
        if ((x & y) <= z) != (x <= lattice.implication(y, z)):
            raise NotAHeytingFrame("residuation", f"fails on closed sets {label_text(x)}, {label_text(y)}, {label_text(z)}")
    algebra = lattice.as_lattice()
    assert isinstance(algebra, FiniteHeytingAlgebra)
    get_logger(logger).success(f"W⁺ is a Heyting algebra with {len(algebra)} elements")
    return algebra


def random_frame(rng: random.Random, max_w: int = 4, max_w_prime: int = 5) -> HeytingFrame:
    """
    A random Heyting frame with |W| ≤ max_w and |W′| ≤ max_w_prime.

    W is a random family of subsets of a small base set closed under intersection, with ∘ = ∩ and
    ε the base set. The columns of R are random down-sets of W closed under x ⫞ ·, several labels of
    W′ may share a column, and each residual is drawn among the labels with the right column.
    Candidates that `HeytingFrame.validate` rejects are discarded.
    """
    while True:
        w = _random_meet_family(rng, max_w)
        if w is None:
            continue
        columns = _random_residuated_columns(rng, w, max_w_prime)
        if columns is None:
            continue
        size = rng.randint(len(columns), max_w_prime)
        chosen = list(columns) + [rng.choice(columns) for _ in range(size - len(columns))]
        rng.shuffle(chosen)
        w_prime = tuple(f"z{j}" for j in range(size))
        labels = range(len(w))
        compose = {(x, y): w.index(w[x] & w[y]) for x in labels for y in labels}
        residual: Dict[Tuple[Label, Label], Label] = {}
        for x, j in itertools.product(labels, range(size)):
            target = frozenset(y for y in labels if compose[(x, y)] in chosen[j])
            residual[(x, w_prime[j])] = rng.choice([w_prime[k] for k in range(size) if chosen[k] == target])
        polarity = Polarity(
            tuple(labels), w_prime, tuple(tuple(x in chosen[j] for j in range(size)) for x in labels)
        )
        try:
            return HeytingFrame(polarity, compose, len(w) - 1, residual)
        except NotAHeytingFrame:
            continue


def _random_meet_family(rng: random.Random, max_w: int) -> Optional[List[FrozenSet[int]]]:
    """Subsets of a base set closed under ∩, the base set last"""
    base = frozenset(range(rng.randint(1, 3)))
    family = {base}
    for _ in range(rng.randint(0, max_w)):
        family.add(frozenset(b for b in base if rng.random() < 0.5))
    changed = True
    while changed:
        changed = False
        for a, b in itertools.combinations(list(family), 2):
            if a & b not in family:
                family.add(a & b)
                changed = True
    if len(family) > max_w:
        return None
    return sorted(family - {base}, key=lambda s: (len(s), sorted(s))) + [base]


def _random_residuated_columns(
    rng: random.Random, w: List[FrozenSet[int]], max_w_prime: int
) -> Optional[List[FrozenSet[int]]]:
    labels = range(len(w))
    unit = len(w) - 1

    def down(xs: Iterable[int]) -> FrozenSet[int]:
        return frozenset(y for y in labels if any(w[y] <= w[x] for x in xs))

    seeds = {down(x for x in labels if x != unit and rng.random() < 0.5) for _ in range(rng.randint(1, 2))}
    closed = set(seeds)
    frontier = list(seeds)
    while frontier:
        column = frontier.pop()
        for x in labels:
            target = frozenset(y for y in labels if w.index(w[x] & w[y]) in column)
            if target not in closed:
                closed.add(target)
                frontier.append(target)
    if len(closed) > max_w_prime or any(unit in c and len(c) != len(w) for c in closed):
        return None
    return sorted(closed, key=lambda c: (len(c), sorted(c)))


## Completions


@dataclass(frozen=True, eq=False)
class Embedding:
    """An order-preserving map from a finite poset into a finite (hence complete) lattice"""

    source: FinitePoset
    target: FiniteLattice
    mapping: Mapping[Label, Label]

    def __call__(self, a: Label) -> Label:
        return self.mapping[a]

    def image(self) -> List[Label]:
        return [self.mapping[a] for a in self.source.elements]

    def is_order_preserving(self) -> bool:
        s, t = self.source, self.target
        return all(t.leq(self(a), self(b)) for a in s for b in s if s.leq(a, b))

    def is_order_embedding(self) -> bool:
        s, t = self.source, self.target
        return all(s.leq(a, b) == t.leq(self(a), self(b)) for a in s for b in s)


def identity_embedding(lattice: FiniteLattice) -> Embedding:
    return Embedding(lattice, lattice, {a: a for a in lattice.elements})


def macneille(
    poset: FinitePoset, flag: str = "lattice", logger: Optional[LabLogger] = None
) -> Tuple[ClosedSetLattice, Embedding]:
    """
    MacNeille completion through the polarity ⟨A, A, ≤⟩, with a ↦ γ(a) = a^▷◁.

    Parameters:
        poset: A finite partial order
        flag: `lattice`, or `heyting` to complete a Heyting algebra through its frame W_A and check that
            γ preserves ∧, ∨, → and ⊥
        logger: Optional logger

    Returns:
        (lattice, embedding): The closed-set lattice and the embedding into it
    """
    log = get_logger(logger)
    if flag not in ("lattice", "heyting"):
        raise ValueError(f"Unknown flag {flag!r}, expected lattice or heyting")
    frame: Optional[HeytingFrame] = None
    algebra: Optional[FiniteHeytingAlgebra] = None
    if flag == "heyting":
        algebra = as_heyting(poset)
        frame = heyting_frame_of(algebra)
        polarity = frame.polarity
    else:
        polarity = Polarity.from_poset(poset)
    lattice = ClosedSetLattice(polarity, concept_lattice(polarity, logger).members, frame)
    target = lattice.as_lattice()
    embedding = Embedding(poset, target, {a: polarity.closure([a]) for a in poset.elements})
    assert embedding.is_order_embedding(), "γ must be an order embedding"
    if algebra is not None:
        _check_heyting_preservation(algebra, lattice, embedding)
        log.success("γ preserves ∧, ∨, → and ⊥")
    log.info(f"Completion of {len(poset)} elements has {len(lattice)} closed sets")
    return lattice, embedding


def _check_heyting_preservation(algebra: FiniteHeytingAlgebra, lattice: ClosedSetLattice, emb: Embedding) -> None:
    if emb(algebra.bottom) != lattice.bottom:
        raise NotHeyting("γ(⊥) differs from γ(∅)")
    for a, b in itertools.product(algebra.elements, repeat=2):
        checks = (
            ("∧", emb(algebra.meet(a, b)), lattice.meet(emb(a), emb(b))),
            ("∨", emb(algebra.join(a, b)), lattice.join(emb(a), emb(b))),
            ("→", emb(algebra.imp(a, b)), lattice.implication(emb(a), emb(b))),
        )
        for op, left, right in checks:
            if left != right:
                raise NotHeyting(f"γ does not preserve {op} at {label_text(a)}, {label_text(b)}")


class DensityResult(BaseModel):
    join_dense: bool
    meet_dense: bool
    rules_agree: bool
    join_failures: List[str] = []
    meet_failures: List[str] = []


def _join_dense_at(emb: Embedding, x: Label) -> bool:
    t = emb.target
    return t.join_all(a for a in emb.image() if t.leq(a, x)) == x


def _meet_dense_at(emb: Embedding, x: Label) -> bool:
    t = emb.target
    return t.meet_all(a for a in emb.image() if t.leq(x, a)) == x


def _join_rule_at(emb: Embedding, x: Label) -> bool:
    """Left rule: if every a ≤ x gives a ≤ y, then x ≤ y, for every y"""
    t = emb.target
    below = [a for a in emb.image() if t.leq(a, x)]
    return all(t.leq(x, y) for y in t.elements if all(t.leq(a, y) for a in below))


def _meet_rule_at(emb: Embedding, x: Label) -> bool:
    """Right rule with x on the right: if x ≤ a gives w ≤ a, then w ≤ x, for every w"""
    t = emb.target
    above = [a for a in emb.image() if t.leq(x, a)]
    return all(t.leq(w, x) for w in t.elements if all(t.leq(w, a) for a in above))


def density_check(emb: Embedding, at: Optional[Label] = None) -> DensityResult:
    """
    Join- and meet-density of the image of an embedding, at one target element or at all of them.

    Density is computed directly (x = ∨{a ≤ x}, x = ∧{a ≥ x}) and through the validity of the two
    infinitary rules; `rules_agree` reports whether both computations coincide.
    """
    points = list(emb.target.elements) if at is None else [at]
    join_failures, meet_failures = [], []
    agree = True
    for x in points:
        emb.target.index(x)
        join_direct, meet_direct = _join_dense_at(emb, x), _meet_dense_at(emb, x)
        agree = agree and join_direct == _join_rule_at(emb, x) and meet_direct == _meet_rule_at(emb, x)
        if not join_direct:
            join_failures.append(label_text(x))
        if not meet_direct:
            meet_failures.append(label_text(x))
    return DensityResult(
        join_dense=not join_failures,
        meet_dense=not meet_failures,
        rules_agree=agree,
        join_failures=join_failures,
        meet_failures=meet_failures,
    )


def regularity_check(emb: Embedding) -> bool:
    """Does the map preserve every join and meet that exists in the source, including empty ones?"""
    s, t = emb.source, emb.target
    for r in range(len(s) + 1):
        for subset in itertools.combinations(s.elements, r):
            image = [emb(a) for a in subset]
            sup = s.sup(subset)
            if sup is not None and emb(sup) != t.sup(image):
                return False
            inf = s.inf(subset)
            if inf is not None and emb(inf) != t.inf(image):
                return False
    return True


__all__ = [
    "ClosedSetLattice",
    "DensityResult",
    "Embedding",
    "FiniteHeytingAlgebra",
    "FiniteLattice",
    "FinitePoset",
    "HeytingFrame",
    "Polarity",
    "boolean_algebra",
    "chain_algebra",
    "concept_lattice",
    "density_check",
    "downset_algebra",
    "enumerate_posets",
    "frame_plus",
    "galois",
    "hasse_edges",
    "heyting_catalogue",
    "heyting_frame_of",
    "identity_embedding",
    "macneille",
    "random_frame",
    "regularity_check",
]
