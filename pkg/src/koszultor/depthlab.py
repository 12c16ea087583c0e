"""Grade, local depth, Ass-membership, Krull dimension and height.

Depth of ``M`` at a prime ``p`` is computed from Ext against ``R/p`` followed
by a localization test; grade is computed from Koszul cohomology.  The two
routes are independent and are cross-checked in the test-suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache, total_ordering
from itertools import combinations

from .groebner import buchberger
from .homalg import (
    IndeterminateError,
    PresentedModule,
    annihilator,
    ext,
    hom_from_cyclic,
    ideal_basis,
    koszul_cochain,
    homology_at,
    vanishes_at_prime,
)
from .ringcore import Ideal, QuotientRing, SessionError


@total_ordering
@dataclass(frozen=True)
class ExtendedNat:
    """Non-negative integer, infinity (``value is None``), or a budget-limited ``>= value``."""

    value: int | None
    lower_bound: bool = False

    @classmethod
    def infinity(cls) -> "ExtendedNat":
        return cls(None)

    @classmethod
    def at_least_bound(cls, n: int) -> "ExtendedNat":
        return cls(n, True)

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    @property
    def is_determinate(self) -> bool:
        return not self.lower_bound

    def at_least(self, k: int):
        """``self >= k`` as True/False, or None when a budget bound cannot decide it."""
        if self.value is None or self.value >= k:
            return True
        return None if self.lower_bound else False

    def _key(self):
        return (1, 0) if self.value is None else (0, self.value)

    def __lt__(self, other):
        if isinstance(other, int):
            other = ExtendedNat(other)
        return self._key() < other._key()

    def __eq__(self, other):
        if isinstance(other, int):
            return not self.lower_bound and self.value == other
        if not isinstance(other, ExtendedNat):
            return NotImplemented
        return (self.value, self.lower_bound) == (other.value, other.lower_bound)

    def __hash__(self):
        return hash((self.value, self.lower_bound))

    def __str__(self):
        if self.value is None:
            return "inf"
        return f">={self.value}" if self.lower_bound else str(self.value)

    def to_json(self):
        if self.value is None:
            return "inf"
        return {"at_least": self.value} if self.lower_bound else self.value


INF = ExtendedNat.infinity()


@dataclass(frozen=True)
class PrimeEntry:
    """A named prime of the session table; primality is taken on trust."""

    name: str
    ideal: Ideal

    @property
    def ring(self) -> QuotientRing:
        return self.ideal.ring

    @property
    def generators(self):
        return self.ideal.generators

    @property
    def basis(self):
        return ideal_basis(self.ideal)

    def is_proper(self) -> bool:
        return not self.basis.is_unit()

    def __str__(self):
        return f"{self.name}={self.ideal!r}"


@dataclass(frozen=True)
class PrimeTable:
    """Finite window on Spec R, with its containment order and Hasse relation."""

    ring: QuotientRing
    entries: tuple = ()
    containment: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        entries = tuple(self.entries)
        object.__setattr__(self, "entries", entries)
        names = [e.name for e in entries]
        if len(set(names)) != len(names):
            raise SessionError("duplicate prime names")
        for e in entries:
            if e.ring != self.ring:
                raise SessionError(f"prime {e.name!r} lives in another ring")
            if not e.is_proper():
                raise SessionError(f"prime {e.name!r} is the unit ideal")
        n = len(entries)
        mat = tuple(tuple(_contained(entries[i], entries[j]) for j in range(n)) for i in range(n))
        for i in range(n):
            for j in range(i + 1, n):
                if mat[i][j] and mat[j][i]:
                    raise SessionError(f"primes {names[i]!r} and {names[j]!r} coincide")
        object.__setattr__(self, "containment", mat)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def names(self) -> list[str]:
        return [e.name for e in self.entries]

    def index(self, p) -> int:
        name = p.name if isinstance(p, PrimeEntry) else p
        for i, e in enumerate(self.entries):
            if e.name == name:
                return i
        raise KeyError(f"unknown prime {name!r}")

    def entry(self, name: str) -> PrimeEntry:
        return self.entries[self.index(name)]

    def contains(self, p, q) -> bool:
        """Whether ``p ⊆ q``."""
        return self.containment[self.index(p)][self.index(q)]

    def immediate_inclusions(self) -> list[tuple[str, str]]:
        """Pairs ``(q, p)`` with ``q ⊊ p`` and no table entry strictly between."""
        n = len(self.entries)
        below = [[i != j and self.containment[i][j] for j in range(n)] for i in range(n)]
        out = []
        for i in range(n):
            for j in range(n):
                if below[i][j] and not any(below[i][k] and below[k][j] for k in range(n)):
                    out.append((self.entries[i].name, self.entries[j].name))
        return out

    def minimal_entries(self) -> list[str]:
        n = len(self.entries)
        return [self.entries[j].name for j in range(n)
                if not any(i != j and self.containment[i][j] for i in range(n))]


def _contained(p: PrimeEntry, q: PrimeEntry) -> bool:
    gb = q.basis
    return all(gb.contains(g) for g in p.generators)


def _ideal_of(p) -> Ideal:
    return p.ideal if isinstance(p, PrimeEntry) else p


def _gens(J) -> list:
    if isinstance(J, PrimeEntry):
        J = J.ideal
    return list(J.generators) if isinstance(J, Ideal) else list(J)


def _default_budget(ring: QuotientRing) -> int:
    return ring.nvars + 4


# ---------- grade ----------


def grade(J, M: PresentedModule) -> ExtendedNat:
    """Least ``i`` with ``H^i(J; M) != 0`` (Koszul route); infinity if none."""
    xs = _gens(J)
    C = koszul_cochain(xs, M)
    for i in range(len(xs) + 1):
        if not homology_at(C, i).is_zero():
            return ExtendedNat(i)
    return INF


def grade_via_ext(J, M: PresentedModule, max_length: int | None = None) -> ExtendedNat:
    """Least ``i`` with ``Ext^i(R/J, M) != 0`` (resolution route)."""
    ring = M.ring
    xs = _gens(J)
    if max_length is None:
        max_length = _default_budget(ring)
    ann = annihilator(M)
    if buchberger(list(xs) + list(ann.generators), ring).is_unit():
        return INF
    quotient = PresentedModule.cyclic(ring, xs)
    # a proper J + Ann(M) bounds the grade by the number of generators of J
    top = min(len(xs), max_length - 1)
    for i in range(top + 1):
        if not ext(quotient, M, i, max_length).is_zero():
            return ExtendedNat(i)
    if top < len(xs):
        return ExtendedNat.at_least_bound(top + 1)
    raise AssertionError("Ext vanished up to the generator count of a proper ideal")


# ---------- local depth ----------


@lru_cache(maxsize=4096)
def _local_depth(M: PresentedModule, ideal: Ideal, method: str, max_length: int) -> ExtendedNat:
    ring = M.ring
    if vanishes_at_prime(M, ideal):
        return INF
    if method == "koszul":
        xs = list(ideal.generators)
        C = koszul_cochain(xs, M)
        for i in range(len(xs) + 1):
            if not vanishes_at_prime(homology_at(C, i), ideal):
                return ExtendedNat(i)
        raise AssertionError("top Koszul cohomology vanished at p although M_p != 0")
    if method != "ext":
        raise ValueError(f"unknown depth method {method!r}")
    quotient = PresentedModule.cyclic(ring, list(ideal.generators))
    # depth of a nonzero M_p never exceeds the number of variables
    top = min(ring.nvars, max_length - 1)
    for i in range(top + 1):
        if not vanishes_at_prime(ext(quotient, M, i, max_length), ideal):
            return ExtendedNat(i)
    if top < ring.nvars:
        return ExtendedNat.at_least_bound(top + 1)
    raise AssertionError("Ext vanished at p beyond the dimension bound")


def local_depth(M: PresentedModule, p, method: str = "ext", max_length: int | None = None) -> ExtendedNat:
    """``depth_{R_p}(M_p)``; infinity when ``M_p = 0``."""
    if max_length is None:
        max_length = _default_budget(M.ring)
    return _local_depth(M, _ideal_of(p), method, max_length)


def ass_member(p, M: PresentedModule) -> bool:
    """Whether ``p`` is an associated prime of ``M`` (``(0 :_M p)_p != 0``)."""
    return not vanishes_at_prime(hom_from_cyclic(_ideal_of(p), M), _ideal_of(p))


# ---------- dimension ----------


EMPTY_SUPPORT = float("-inf")


def _dimension_of_quotient(ring: QuotientRing, gens) -> int:
    gb = buchberger(list(gens), ring)
    if gb.is_unit():
        return EMPTY_SUPPORT
    leads = [f.leading_monomial() for f in gb.polynomials()]
    n = ring.nvars
    supports = [frozenset(i for i, a in enumerate(e) if a) for e in leads]
    for size in range(n, -1, -1):
        for subset in combinations(range(n), size):
            s = set(subset)
            if not any(sup <= s for sup in supports):
                return size
    return 0  # pragma: no cover


def krull_dim(obj) -> int:
    """Krull dimension of a ring, or of ``R / Ann(M)`` for a module; ``EMPTY_SUPPORT`` for 0."""
    if isinstance(obj, QuotientRing):
        return _dimension_of_quotient(obj, [])
    if isinstance(obj, Ideal):
        return _dimension_of_quotient(obj.ring, obj.generators)
    if obj.is_zero():
        return EMPTY_SUPPORT
    return _dimension_of_quotient(obj.ring, annihilator(obj).generators)


def height(p) -> int:
    """``dim R - dim R/p``; only for rings flagged equidimensional and catenary."""
    ideal = _ideal_of(p)
    ring = ideal.ring
    if not ring.is_equidimensional:
        raise SessionError("height needs a ring flagged equidimensional (set config.equidimensional)")
    return krull_dim(ring) - krull_dim(ideal)


# ---------- profiles ----------


@dataclass(frozen=True)
class DepthProfile:
    table: PrimeTable
    depth: dict
    grade: dict
    height: dict

    def __post_init__(self):
        for name in self.table.names:
            d, g, h = self.depth[name], self.grade.get(name), self.height.get(name)
            if g is not None and d.is_determinate and g.is_determinate and g > d:
                raise AssertionError(f"grade exceeds depth at {name}")
            if h is not None and d.is_determinate and d.value is not None and d.value > h:
                raise AssertionError(f"depth exceeds height at {name}")

    @property
    def names(self):
        return self.table.names

    def depth_of(self, p) -> ExtendedNat:
        return self.depth[p.name if isinstance(p, PrimeEntry) else p]

    def rows(self):
        for name in self.table.names:
            yield name, self.depth[name], self.grade.get(name), self.height.get(name)


def depth_table(table: PrimeTable, max_length: int | None = None, method: str = "ext",
                with_grade: bool = True) -> DepthProfile:
    """Depth of ``R_p`` (and grade of ``p`` on ``R``, height when defined) for every entry."""
    ring = table.ring
    R = PresentedModule.free(ring)
    depth, grd, hts = {}, {}, {}
    for e in table:
        depth[e.name] = local_depth(R, e, method, max_length)
        if with_grade:
            grd[e.name] = grade(e, R)
        if ring.is_equidimensional:
            hts[e.name] = height(e)
    return DepthProfile(table, depth, grd, hts)


def grade_table(table: PrimeTable, max_length: int | None = None) -> DepthProfile:
    """Same profile as :func:`depth_table`; grade always included."""
    return depth_table(table, max_length, with_grade=True)


def raise_if_indeterminate(value: ExtendedNat, what: str):
    if not value.is_determinate:
        raise IndeterminateError(f"{what} is only known to be {value}")
    return value
