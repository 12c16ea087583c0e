"""Groebner bases of submodules of free modules over quotient rings.

Internally a vector of ``P^r`` is a dict ``{(component, exponents): coeff}``;
a polynomial is the rank-1 case with component 0.  Computations over
``R = P/I`` adjoin ``g * e_i`` for every basis element ``g`` of ``I`` and every
free generator ``e_i``.

Module orders are block orders: components below ``split`` form the upper
block, and inside a block terms compare monomial first, then position.
With ``split = rank`` this is plain term-over-position.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from heapq import heapify, heappop, heappush
from typing import Iterable, Sequence

from .ringcore import Polynomial, QuotientRing

DEFAULT_MAX_PAIRS = 500_000


class BudgetExceeded(RuntimeError):
    """A Groebner computation ran past its pair budget; no partial result is kept."""


def _divides(a: tuple, b: tuple) -> bool:
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def _lcm(a: tuple, b: tuple) -> tuple:
    return tuple(x if x > y else y for x, y in zip(a, b))


class _Engine:
    """Buchberger with Gebauer-Moeller pair pruning, usable incrementally."""

    def __init__(self, ring: QuotientRing, split: int, product_criterion: bool = False,
                 max_pairs: int = DEFAULT_MAX_PAIRS):
        self.p = ring.p
        self.mkey = ring.order.key
        self.split = split
        self.product_criterion = product_criterion
        self.max_pairs = max_pairs
        self.pairs_done = 0
        self._nkeys: dict = {}
        self.polys: list[dict] = []
        self.lts: list[tuple] = []
        self.active: dict[int, list[int]] = defaultdict(list)
        self.pairs: dict[tuple[int, int], tuple] = {}
        self.heap: list = []

    # term order ------------------------------------------------------
    def nkey(self, t):
        k = self._nkeys.get(t)
        if k is None:
            c, e = t
            k = (0 if c < self.split else 1,) + tuple(-x for x in self.mkey(e)) + (c,)
            self._nkeys[t] = k
        return k

    def lt(self, v: dict):
        return min(v, key=self.nkey)

    # reduction ---------------------------------------------------------
    def _reducer(self, t, skip=-1):
        c, e = t
        for idx in self.active.get(c, ()):
            if idx != skip and _divides(self.lts[idx][1], e):
                return idx
        return None

    def nf(self, v: dict, skip: int = -1, top_only: bool = False) -> dict:
        p = self.p
        f = dict(v)
        heap = [(self.nkey(t), t) for t in f]
        heapify(heap)
        rem: dict = {}
        nkey = self.nkey
        while heap:
            _, t = heappop(heap)
            c = f.get(t)
            if c is None:
                continue
            idx = self._reducer(t, skip)
            if idx is None:
                rem[t] = c
                del f[t]
                if top_only:
                    rem.update(f)
                    return rem
                continue
            g = self.polys[idx]
            comp, ge = self.lts[idx]
            shift = tuple(a - b for a, b in zip(t[1], ge))
            for (gc, gexp), gcoef in g.items():
                nt = (gc, tuple(a + b for a, b in zip(gexp, shift)))
                old = f.get(nt)
                val = ((old or 0) - c * gcoef) % p
                if val:
                    if old is None:
                        heappush(heap, (nkey(nt), nt))
                    f[nt] = val
                elif old is not None:
                    del f[nt]
        return rem

    # basis maintenance -------------------------------------------------
    def _monic(self, v: dict) -> dict:
        t = self.lt(v)
        c = v[t]
        if c == 1:
            return v
        inv = pow(c, -1, self.p)
        p = self.p
        return {k: x * inv % p for k, x in v.items()}

    def load(self, basis: Iterable[dict]):
        """Install elements known to form a Groebner basis (no pairs created)."""
        for v in basis:
            v = self._monic(v)
            idx = len(self.polys)
            self.polys.append(v)
            lt = self.lt(v)
            self.lts.append(lt)
            self.active[lt[0]].append(idx)

    def insert(self, h: dict) -> int:
        h = self._monic(h)
        idx = len(self.polys)
        self.polys.append(h)
        self.lts.append(self.lt(h))
        self._update(idx)
        return idx

    def add(self, v: dict) -> bool:
        h = self.nf(v)
        if not h:
            return False
        self.insert(h)
        return True

    def _update(self, h: int):
        comp, eh = self.lts[h]
        lts = self.lts
        remaining = [(g, _lcm(eh, lts[g][1])) for g in self.active.get(comp, ())]
        kept = []
        while remaining:
            g1, l1 = remaining.pop(0)
            coprime = self.product_criterion and not any(a and b for a, b in zip(eh, lts[g1][1]))
            if coprime or (not any(_divides(l2, l1) for _, l2 in remaining)
                           and not any(_divides(l2, l1) for _, l2, _ in kept)):
                kept.append((g1, l1, coprime))
        for (a, b), l in list(self.pairs.items()):
            if lts[a][0] != comp or not _divides(eh, l):
                continue
            if _lcm(lts[a][1], eh) != l and _lcm(lts[b][1], eh) != l:
                del self.pairs[(a, b)]
        for g1, l1, coprime in kept:
            if not coprime:
                self.pairs[(g1, h)] = l1
                heappush(self.heap, (sum(l1), g1, h))
        self.active[comp] = [g for g in self.active.get(comp, ()) if not _divides(eh, lts[g][1])] + [h]

    def _spoly(self, a: int, b: int, l: tuple) -> dict:
        p = self.p
        out: dict = {}
        for idx, sign in ((a, 1), (b, -1)):
            shift = tuple(x - y for x, y in zip(l, self.lts[idx][1]))
            for (c, e), coef in self.polys[idx].items():
                t = (c, tuple(x + y for x, y in zip(e, shift)))
                val = (out.get(t, 0) + sign * coef) % p
                if val:
                    out[t] = val
                else:
                    out.pop(t, None)
        return out

    def complete(self):
        while self.heap:
            _, a, b = heappop(self.heap)
            l = self.pairs.pop((a, b), None)
            if l is None:
                continue
            self.pairs_done += 1
            if self.pairs_done > self.max_pairs:
                raise BudgetExceeded(f"Groebner pair budget of {self.max_pairs} exceeded")
            h = self.nf(self._spoly(a, b, l))
            if h:
                self.insert(h)

    def reduced_basis(self) -> list[dict]:
        idxs = sorted((i for lst in self.active.values() for i in lst),
                      key=lambda i: self.nkey(self.lts[i]), reverse=True)
        for i in idxs:
            self.polys[i] = self._monic(self.nf(self.polys[i], skip=i))
        return [self.polys[i] for i in idxs]


def raw_groebner(vecs: Iterable[dict], ring: QuotientRing, rank: int, split: int | None = None,
                 adjoin_relations: bool = True, max_pairs: int = DEFAULT_MAX_PAIRS) -> list[dict]:
    """Reduced Groebner basis (raw vectors) of the submodule spanned by ``vecs`` (+ I*P^rank)."""
    eng = _Engine(ring, rank if split is None else split, product_criterion=(rank == 1),
                  max_pairs=max_pairs)
    gens = [v for v in vecs if v]
    if adjoin_relations:
        for i in range(rank):
            gens.extend({(i, e): c for e, c in r.items()} for r in ring.relation_basis)
    for v in gens:
        eng.add(v)
    eng.complete()
    return eng.reduced_basis()


def reduce_poly_raw(terms: dict, basis: list[dict], ring: QuotientRing) -> dict:
    eng = _Engine(ring, 1)
    eng.load({(0, e): c for e, c in b.items()} for b in basis)
    return {e: c for (_, e), c in eng.nf({(0, e): c for e, c in terms.items()}).items()}


def reduce_vec_mod_relations(v: dict, ring: QuotientRing) -> dict:
    if not ring.relations or not v:
        return v
    rank = max(c for c, _ in v) + 1
    eng = _Engine(ring, rank)
    eng.load({(i, e): c for e, c in r.items()} for i in range(rank) for r in ring.relation_basis)
    return eng.nf(v)


# ---------- vectors <-> polynomials ----------


def vector_to_raw(vec, ring: QuotientRing) -> dict:
    if isinstance(vec, dict):
        return vec
    if isinstance(vec, (Polynomial, str, int)):
        vec = [vec]
    out = {}
    for i, f in enumerate(vec):
        f = ring(f)
        for e, c in f.terms.items():
            out[(i, e)] = c
    return out


def raw_to_vector(v: dict, rank: int, ring: QuotientRing) -> tuple[Polynomial, ...]:
    comps: list[dict] = [{} for _ in range(rank)]
    for (c, e), coef in v.items():
        comps[c][e] = coef
    return tuple(Polynomial(ring, d) for d in comps)


def _freeze(v: dict) -> tuple:
    return tuple(sorted(v.items()))


# ---------- public types ----------


@dataclass(frozen=True, eq=False)
class GroebnerBasis:
    ring: QuotientRing
    rank: int
    elements: tuple
    reduced: bool = True

    @property
    def vectors(self) -> list[dict]:
        return [dict(e) for e in self.elements]

    def polynomials(self) -> list[Polynomial]:
        if self.rank != 1:
            raise ValueError("basis of a submodule of rank > 1; use vectors()")
        return [raw_to_vector(dict(e), 1, self.ring)[0] for e in self.elements]

    def _engine(self):
        eng = getattr(self, "_eng", None)
        if eng is None:
            eng = _Engine(self.ring, self.rank)
            eng.load(dict(e) for e in self.elements)
            object.__setattr__(self, "_eng", eng)
        return eng

    def reduce_raw(self, v: dict) -> dict:
        if v and max(c for c, _ in v) >= self.rank:
            raise ValueError("rank mismatch")
        return self._engine().nf(v)

    def normal_form(self, f):
        raw = vector_to_raw(f, self.ring)
        if isinstance(f, (list, tuple)) and len(f) != self.rank:
            raise ValueError(f"rank mismatch: vector of length {len(f)} against rank {self.rank}")
        out = self.reduce_raw(raw)
        vec = raw_to_vector(out, self.rank, self.ring)
        return vec[0] if self.rank == 1 and not isinstance(f, (list, tuple)) else vec

    def contains(self, f) -> bool:
        return not self.reduce_raw(vector_to_raw(f, self.ring))

    def is_unit(self) -> bool:
        return self.rank == 1 and any(dict(e) == {(0, self.ring.zero_exp): 1} for e in self.elements)

    def spairs_reduce_to_zero(self) -> bool:
        """Independent re-check of the Buchberger criterion on every pair."""
        eng = self._engine()
        vecs = [dict(e) for e in self.elements]
        for i in range(len(vecs)):
            for j in range(i + 1, len(vecs)):
                li, lj = eng.lt(vecs[i]), eng.lt(vecs[j])
                if li[0] != lj[0]:
                    continue
                l = _lcm(li[1], lj[1])
                s = {}
                for v, lt_, sign in ((vecs[i], li, 1), (vecs[j], lj, -1)):
                    inv = pow(v[lt_], -1, self.ring.p)
                    shift = tuple(a - b for a, b in zip(l, lt_[1]))
                    for (c, e), coef in v.items():
                        t = (c, tuple(a + b for a, b in zip(e, shift)))
                        val = (s.get(t, 0) + sign * coef * inv) % self.ring.p
                        if val:
                            s[t] = val
                        else:
                            s.pop(t, None)
                if eng.nf(s):
                    return False
        return True


def buchberger(generators: Sequence, ring: QuotientRing, rank: int | None = None,
               max_pairs: int = DEFAULT_MAX_PAIRS) -> GroebnerBasis:
    """Reduced Groebner basis of the ideal/submodule spanned by ``generators`` over ``ring``.

    Generators are Polynomials (or expressions) for ideals, or sequences of
    Polynomials for submodules of ``R^rank``.
    """
    raws = [vector_to_raw(g, ring) for g in generators]
    if rank is None:
        rank = 1
        for g in generators:
            if isinstance(g, (list, tuple)):
                rank = len(g)
                break
    gb = raw_groebner(raws, ring, rank, max_pairs=max_pairs)
    return GroebnerBasis(ring, rank, tuple(_freeze(g) for g in gb), True)


def normal_form(f, basis: GroebnerBasis):
    return basis.normal_form(f)


def module_basis(ring: QuotientRing, vecs: Iterable[dict], rank: int) -> GroebnerBasis:
    gb = raw_groebner(vecs, ring, rank)
    return GroebnerBasis(ring, rank, tuple(_freeze(g) for g in gb), True)


# ---------- maps, kernels, resolutions ----------


@dataclass(frozen=True, eq=False)
class FreeModuleMap:
    """``R^source_rank -> R^target_rank``; column ``j`` is the image of ``e_j``.

    Columns are stored frozen and already reduced modulo the ring relations.
    """

    ring: QuotientRing
    source_rank: int
    target_rank: int
    columns: tuple

    @classmethod
    def from_columns(cls, ring: QuotientRing, target_rank: int, cols: Iterable,
                     reduce: bool = True) -> "FreeModuleMap":
        frozen = []
        for col in cols:
            raw = vector_to_raw(col, ring)
            if raw and max(c for c, _ in raw) >= target_rank:
                raise ValueError("column exceeds the target rank")
            if reduce:
                raw = reduce_vec_mod_relations(raw, ring)
            frozen.append(_freeze(raw))
        return cls(ring, len(frozen), target_rank, tuple(frozen))

    @classmethod
    def from_rows(cls, ring: QuotientRing, rows: Sequence[Sequence], source_rank: int | None = None):
        m = len(rows)
        n = len(rows[0]) if rows else (source_rank or 0)
        cols = [[rows[i][j] for i in range(m)] for j in range(n)]
        return cls.from_columns(ring, m, cols)

    @classmethod
    def zero(cls, ring: QuotientRing, source_rank: int, target_rank: int):
        return cls(ring, source_rank, target_rank, ((),) * source_rank)

    def __eq__(self, other):
        return (isinstance(other, FreeModuleMap) and self.ring == other.ring
                and (self.source_rank, self.target_rank, self.columns)
                == (other.source_rank, other.target_rank, other.columns))

    def __hash__(self):
        return hash((self.ring, self.source_rank, self.target_rank, self.columns))

    def column_vectors(self) -> list[dict]:
        return [dict(c) for c in self.columns]

    def column_polys(self) -> list[tuple[Polynomial, ...]]:
        return [raw_to_vector(dict(c), self.target_rank, self.ring) for c in self.columns]

    def entry(self, i: int, j: int) -> Polynomial:
        return self.column_polys()[j][i]

    def rows(self) -> list[list[Polynomial]]:
        cols = self.column_polys()
        return [[cols[j][i] for j in range(self.source_rank)] for i in range(self.target_rank)]

    def apply_raw(self, v: dict) -> dict:
        """Image of a raw source vector (reduced modulo relations)."""
        p = self.ring.p
        cols = self.column_vectors()
        out: dict = {}
        for (j, e), c in v.items():
            for (i, ce), cc in cols[j].items():
                t = (i, tuple(a + b for a, b in zip(e, ce)))
                val = (out.get(t, 0) + c * cc) % p
                if val:
                    out[t] = val
                else:
                    out.pop(t, None)
        return reduce_vec_mod_relations(out, self.ring)

    def compose(self, inner: "FreeModuleMap") -> "FreeModuleMap":
        """``self o inner``."""
        if inner.target_rank != self.source_rank:
            raise ValueError("incompatible ranks")
        return FreeModuleMap.from_columns(self.ring, self.target_rank,
                                          [self.apply_raw(c) for c in inner.column_vectors()])

    def is_zero(self) -> bool:
        return all(not c for c in self.columns)

    def transpose(self) -> "FreeModuleMap":
        cols: list[dict] = [{} for _ in range(self.target_rank)]
        for j, col in enumerate(self.columns):
            for (i, e), c in col:
                cols[i][(j, e)] = c
        return FreeModuleMap.from_columns(self.ring, self.source_rank, cols, reduce=False)

    def tensor_identity(self, g: int) -> "FreeModuleMap":
        """``self (x) id_{R^g}`` with basis index ``s*g + t``."""
        if g == 1:
            return self
        cols = []
        for col in self.columns:
            for t in range(g):
                cols.append({(i * g + t, e): c for (i, e), c in col})
        return FreeModuleMap.from_columns(self.ring, self.target_rank * g, cols, reduce=False)

    def __repr__(self):
        return f"FreeModuleMap({self.source_rank} -> {self.target_rank}, {self.rows()})"


def _vec_degree(v: dict) -> int:
    return max((sum(e) for _, e in v), default=0)


def prune_generators(ring: QuotientRing, vecs: list[dict], rank: int,
                     max_pairs: int = DEFAULT_MAX_PAIRS) -> list[dict]:
    """Drop generators lying in the span of earlier (lower degree) ones."""
    vecs = [v for v in vecs if v]
    if len(vecs) <= 1:
        return [v for v in vecs if reduce_vec_mod_relations(v, ring)]
    eng = _Engine(ring, rank, max_pairs=max_pairs)
    for i in range(rank):
        for r in ring.relation_basis:
            eng.add({(i, e): c for e, c in r.items()})
    eng.complete()
    order = sorted(range(len(vecs)), key=lambda i: (_vec_degree(vecs[i]), eng.nkey(eng.lt(vecs[i])), i))
    kept = []
    for i in order:
        if eng.add(vecs[i]):
            kept.append(i)
            eng.complete()
    return [vecs[i] for i in sorted(kept)]


def kernel_vectors(ring: QuotientRing, cols: Sequence[dict], mod_cols: Sequence[dict], rank: int,
                   prune: bool = True, max_pairs: int = DEFAULT_MAX_PAIRS) -> list[dict]:
    """Generators of ``{a in R^n : sum a_j cols_j in span(mod_cols)}`` (n = len(cols)).

    Elimination in ``R^rank (+) R^n`` with the first block above the second.
    """
    n = len(cols)
    zero = ring.zero_exp
    gens = []
    for j, v in enumerate(cols):
        w = dict(v)
        w[(rank + j, zero)] = 1
        gens.append(w)
    gens.extend(dict(v) for v in mod_cols if v)
    for i in range(rank + n):
        gens.extend({(i, e): c for e, c in r.items()} for r in ring.relation_basis)
    eng = _Engine(ring, rank, max_pairs=max_pairs)
    for v in gens:
        eng.add(v)
    eng.complete()
    out = []
    for g in eng.reduced_basis():
        if eng.lt(g)[0] < rank:
            continue
        v = {(c - rank, e): coef for (c, e), coef in g.items()}
        if reduce_vec_mod_relations(v, ring):
            out.append(v)
    if prune and len(out) > 1:
        out = prune_generators(ring, out, n, max_pairs)
    return out


def syzygies(fmap: FreeModuleMap, prune: bool = True) -> FreeModuleMap:
    """Map whose image is the kernel of ``fmap`` (relations of the ring included)."""
    vecs = kernel_vectors(fmap.ring, fmap.column_vectors(), [], fmap.target_rank, prune)
    return FreeModuleMap.from_columns(fmap.ring, fmap.source_rank, vecs, reduce=False)


@dataclass(frozen=True)
class ResolutionPrefix:
    """``F_length -> ... -> F_1 -> F_0``; ``maps[i]`` is ``d_{i+1}``."""

    maps: tuple
    target: object
    length: int
    complete: bool
    next_map: FreeModuleMap | None = None

    @property
    def ranks(self) -> list[int]:
        r0 = self.target.rank
        return [r0] + [m.source_rank for m in self.maps]

    def differential(self, i: int) -> FreeModuleMap:
        """``d_i : F_i -> F_{i-1}`` for ``i >= 1``; zero maps past a complete end."""
        ranks = self.ranks
        if 1 <= i <= self.length:
            return self.maps[i - 1]
        if i == self.length + 1 and self.next_map is not None and not self.complete:
            return self.next_map
        if self.complete and i > self.length:
            src = 0
            tgt = ranks[i - 1] if i - 1 < len(ranks) else 0
            return FreeModuleMap.zero(self.target.ring, src, tgt)
        raise IndexError(f"differential d_{i} not available in a prefix of length {self.length}")

    def rank(self, i: int) -> int:
        ranks = self.ranks
        if i < len(ranks):
            return ranks[i]
        if self.complete:
            return 0
        if i == len(ranks) and self.next_map is not None:
            return self.next_map.source_rank
        raise IndexError(f"F_{i} not available")

    def covers(self, i: int) -> bool:
        """Whether ``d_i`` and the rank of ``F_i`` are known."""
        return self.complete or i <= self.length + (1 if self.next_map is not None else 0)


_RES_CACHE: dict = {}


def free_resolution(M, length: int, max_pairs: int = DEFAULT_MAX_PAIRS) -> ResolutionPrefix:
    """Iterated syzygies of the presentation of ``M``, up to ``length`` maps."""
    if length < 0:
        raise ValueError("length must be non-negative")
    cached = _RES_CACHE.get(M)
    if cached is not None and (cached.complete or cached.length >= length):
        if cached.length <= length:
            return cached
        return ResolutionPrefix(cached.maps[:length], M, length, False, cached.maps[length])
    if cached is not None:
        maps, cur = list(cached.maps), cached.next_map
    else:
        pres = M.relations
        vecs = prune_generators(M.ring, pres.column_vectors(), M.rank, max_pairs)
        maps, cur = [], FreeModuleMap.from_columns(M.ring, M.rank, vecs, reduce=False)
    complete = False
    while True:
        if cur.source_rank == 0:
            complete = True
            break
        if len(maps) >= length:
            break
        maps.append(cur)
        cur = syzygies(cur)
    res = ResolutionPrefix(tuple(maps), M, len(maps), complete, None if complete else cur)
    if len(_RES_CACHE) > 4096:
        _RES_CACHE.clear()
    _RES_CACHE[M] = res
    return res
