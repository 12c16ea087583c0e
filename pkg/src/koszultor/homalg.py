"""Finitely presented modules, chain complexes, Koszul complexes, Tor and Ext.

A :class:`PresentedModule` is ``coker(R^s -> R^g)``.  Complexes whose terms
are presented modules are stored as the free-level lifts of their
differentials; homology is a subquotient ``ker / (im + relations)`` computed
with two elimination steps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Sequence

from .groebner import (
    FreeModuleMap,
    GroebnerBasis,
    buchberger,
    free_resolution,
    kernel_vectors,
    module_basis,
    prune_generators,
)
from .ringcore import Ideal, Polynomial, QuotientRing


class IndeterminateError(RuntimeError):
    """A homological quantity needed a longer resolution than the budget allows."""


@dataclass(frozen=True, eq=False)
class PresentedModule:
    ring: QuotientRing
    rank: int
    relations: FreeModuleMap
    name: str | None = field(default=None, compare=False)
    # columns in the ambient free module that the generators stand for (subquotients)
    ambient_generators: FreeModuleMap | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.relations.target_rank != self.rank:
            raise ValueError("presentation target rank differs from the generator count")

    @classmethod
    def from_relations(cls, ring: QuotientRing, rank: int, relations: Sequence[Sequence], name=None):
        """``R^rank`` modulo the span of the given relation vectors."""
        return cls(ring, rank, FreeModuleMap.from_columns(ring, rank, relations), name)

    @classmethod
    def free(cls, ring: QuotientRing, rank: int = 1):
        return cls(ring, rank, FreeModuleMap.zero(ring, 0, rank), "R" if rank == 1 else f"R^{rank}")

    @classmethod
    def zero(cls, ring: QuotientRing):
        return cls(ring, 0, FreeModuleMap.zero(ring, 0, 0), "0")

    @classmethod
    def cyclic(cls, ring: QuotientRing, generators, name=None):
        """``R / J`` for ``J`` given by an Ideal or a list of elements."""
        gens = generators.generators if isinstance(generators, Ideal) else generators
        return cls.from_relations(ring, 1, [[g] for g in gens], name)

    def __eq__(self, other):
        return (isinstance(other, PresentedModule) and self.ring == other.ring
                and self.rank == other.rank and self.relations == other.relations)

    def __hash__(self):
        return hash((self.ring, self.rank, self.relations))

    def __repr__(self):
        label = f"{self.name}: " if self.name else ""
        return f"<PresentedModule {label}R^{self.rank} / {len(self.relations.columns)} relations>"

    # ------------------------------------------------------------------
    @property
    def relation_basis(self) -> GroebnerBasis:
        gb = self.__dict__.get("_relation_basis")
        if gb is None:
            gb = module_basis(self.ring, self.relations.column_vectors(), self.rank)
            object.__setattr__(self, "_relation_basis", gb)
        return gb

    def is_zero(self) -> bool:
        if self.rank == 0:
            return True
        zero = self.ring.zero_exp
        gb = self.relation_basis
        return all(not gb.reduce_raw({(j, zero): 1}) for j in range(self.rank))

    def normalized(self) -> "PresentedModule":
        """Rank-0 presentation for the zero module, ``self`` otherwise."""
        return PresentedModule.zero(self.ring) if self.rank and self.is_zero() else self

    def power(self, b: int) -> "PresentedModule":
        """``M^b`` with generator index ``s*g + t``."""
        g = self.rank
        cols = []
        for s in range(b):
            for col in self.relations.columns:
                cols.append({(s * g + i, e): c for (i, e), c in col})
        return PresentedModule(self.ring, g * b, FreeModuleMap.from_columns(self.ring, g * b, cols, reduce=False))

    def with_name(self, name: str) -> "PresentedModule":
        return PresentedModule(self.ring, self.rank, self.relations, name, self.ambient_generators)


def direct_sum(*mods: PresentedModule) -> PresentedModule:
    ring = mods[0].ring
    rank = sum(m.rank for m in mods)
    cols, off = [], 0
    for m in mods:
        for col in m.relations.columns:
            cols.append({(i + off, e): c for (i, e), c in col})
        off += m.rank
    return PresentedModule(ring, rank, FreeModuleMap.from_columns(ring, rank, cols, reduce=False))


def syzygy_module(M: PresentedModule) -> PresentedModule:
    """First syzygy ``ker(R^g -> M)``, i.e. the image of the presentation, as a module."""
    from .groebner import syzygies

    A = M.relations
    return PresentedModule(M.ring, A.source_rank, syzygies(A), f"Omega1({M.name})" if M.name else None)


def subquotient(ring: QuotientRing, n: int, K: Sequence[dict], N: Sequence[dict]) -> PresentedModule:
    """``(span K + span N) / span N`` inside ``R^n`` as a presented module."""
    gbN = module_basis(ring, N, n)
    gens = []
    for k in K:
        r = gbN.reduce_raw(k)
        if r:
            gens.append(r)
    if not gens:
        return PresentedModule.zero(ring)
    if len(gens) > 1:
        gens = _prune_mod(ring, gens, N, n)
    rels = kernel_vectors(ring, gens, N, n)
    t = len(gens)
    emb = FreeModuleMap.from_columns(ring, n, gens, reduce=False)
    return PresentedModule(ring, t, FreeModuleMap.from_columns(ring, t, rels, reduce=False), None, emb)


def _prune_mod(ring, gens, N, n):
    """Drop generators already in the span of ``N`` and earlier kept generators."""
    from .groebner import _Engine, _vec_degree

    eng = _Engine(ring, n)
    for i in range(n):
        for r in ring.relation_basis:
            eng.add({(i, e): c for e, c in r.items()})
    for v in N:
        if v:
            eng.add(v)
    eng.complete()
    order = sorted(range(len(gens)), key=lambda i: (_vec_degree(gens[i]), eng.nkey(eng.lt(gens[i])), i))
    kept = []
    for i in order:
        if eng.add(gens[i]):
            kept.append(i)
            eng.complete()
    return [gens[i] for i in sorted(kept)]


# ---------- chain complexes ----------


@dataclass(frozen=True)
class ChainComplex:
    """Bounded complex of presented modules.

    ``terms[k]`` sits in degree ``offset + k``.  Homologically
    ``differentials[k]`` is ``d: C_{k+1} -> C_k``; cohomologically it is
    ``d: C^k -> C^{k+1}``.  Differentials are maps of the ambient free modules.
    """

    terms: tuple
    differentials: tuple
    cohomological: bool = False
    offset: int = 0

    def __post_init__(self):
        if len(self.differentials) != max(len(self.terms) - 1, 0):
            raise ValueError("need one differential between each pair of adjacent terms")
        for k, d in enumerate(self.differentials):
            src, tgt = (self.terms[k], self.terms[k + 1]) if self.cohomological else (self.terms[k + 1], self.terms[k])
            if (d.source_rank, d.target_rank) != (src.rank, tgt.rank):
                raise ValueError(f"differential {k} has ranks {d.source_rank}->{d.target_rank}")
        if not self.composites_vanish():
            raise ValueError("d o d is not zero")

    def composites_vanish(self) -> bool:
        ds = self.differentials
        for k in range(len(ds) - 1):
            first, second = (ds[k], ds[k + 1]) if self.cohomological else (ds[k + 1], ds[k])
            comp = second.compose(first)
            if comp.is_zero():
                continue
            target = self.terms[k + 2] if self.cohomological else self.terms[k]
            gb = target.relation_basis
            if any(gb.reduce_raw(c) for c in comp.column_vectors()):
                return False
        return True

    @property
    def ring(self) -> QuotientRing:
        return self.terms[0].ring

    def ranks(self) -> list[int]:
        return [t.rank for t in self.terms]


def _homology(term: PresentedModule, out: FreeModuleMap | None, out_target: PresentedModule | None,
              inc: FreeModuleMap | None) -> PresentedModule:
    ring, n = term.ring, term.rank
    if n == 0:
        return PresentedModule.zero(ring)
    zero = ring.zero_exp
    if out is None or out.target_rank == 0:
        K = [{(j, zero): 1} for j in range(n)]
    else:
        K = kernel_vectors(ring, out.column_vectors(), out_target.relations.column_vectors(), out.target_rank)
    N = term.relations.column_vectors()
    if inc is not None:
        N = inc.column_vectors() + N
    return subquotient(ring, n, K, N)


def homology_at(C: ChainComplex, i: int) -> PresentedModule:
    """``H_i`` (or ``H^i`` for cohomological complexes) as a presented module."""
    j = i - C.offset
    if j < 0 or j >= len(C.terms):
        return PresentedModule.zero(C.ring)
    ds = C.differentials
    if C.cohomological:
        out = ds[j] if j < len(ds) else None
        out_target = C.terms[j + 1] if out is not None else None
        inc = ds[j - 1] if j >= 1 else None
    else:
        out = ds[j - 1] if j >= 1 else None
        out_target = C.terms[j - 1] if out is not None else None
        inc = ds[j] if j < len(ds) else None
    return _homology(C.terms[j], out, out_target, inc)


# ---------- Koszul complexes ----------


def _elements(ring: QuotientRing, x) -> list[Polynomial]:
    if isinstance(x, Ideal):
        x = x.generators
    return [ring.reduce(ring(f)) for f in x]


def koszul_differentials(ring: QuotientRing, xs: Sequence[Polynomial]) -> list[FreeModuleMap]:
    """``d_1, ..., d_l`` of ``K(x)`` on the exterior basis ordered by ``combinations``."""
    l = len(xs)
    subsets = [list(combinations(range(l), i)) for i in range(l + 1)]
    index = [{s: k for k, s in enumerate(level)} for level in subsets]
    maps = []
    for i in range(1, l + 1):
        cols = []
        for S in subsets[i]:
            col = {}
            for pos, s in enumerate(S):
                T = S[:pos] + S[pos + 1:]
                row = index[i - 1][T]
                f = xs[s] if pos % 2 == 0 else -xs[s]
                for e, c in f.terms.items():
                    col[(row, e)] = c
            cols.append(col)
        maps.append(FreeModuleMap.from_columns(ring, len(subsets[i - 1]), cols))
    return maps


@lru_cache(maxsize=1024)
def _koszul(ring, xs, M, cohomological):
    l = len(xs)
    terms = tuple(M.power(comb(l, i)) for i in range(l + 1))
    g = M.rank
    ds = koszul_differentials(ring, list(xs))
    if cohomological:
        diffs = tuple(d.transpose().tensor_identity(g) for d in ds)
    else:
        diffs = tuple(d.tensor_identity(g) for d in ds)
    return ChainComplex(terms, diffs, cohomological)


def koszul_chain(x, M: PresentedModule) -> ChainComplex:
    """``K_*(x; M)``; ranks ``binomial(l, i)`` copies of ``M`` in degree ``i``."""
    return _koszul(M.ring, tuple(_elements(M.ring, x)), M, False)


def koszul_cochain(x, M: PresentedModule) -> ChainComplex:
    """``Hom(K_*(x), M)``, cohomological degrees ``0..l``."""
    return _koszul(M.ring, tuple(_elements(M.ring, x)), M, True)


def koszul_homology(x, M: PresentedModule, i: int) -> PresentedModule:
    return homology_at(koszul_chain(x, M), i)


def koszul_cohomology(x, M: PresentedModule, i: int) -> PresentedModule:
    return homology_at(koszul_cochain(x, M), i)


def cocycle_module(J, M: PresentedModule, k: int) -> PresentedModule:
    """``Coker(d^{k-1})`` of the Koszul cochain complex of ``J`` with coefficients in ``M``."""
    xs = _elements(M.ring, J)
    l = len(xs)
    if k < 0 or k > l:
        raise ValueError(f"level {k} outside 0..{l}")
    if k == 0:
        return M
    C = koszul_cochain(xs, M)
    d = C.differentials[k - 1]
    target = C.terms[k]
    cols = d.column_vectors() + target.relations.column_vectors()
    cols = prune_generators(M.ring, cols, target.rank)
    name = None
    if isinstance(J, Ideal) or M.name:
        name = f"S_{k}({J!r};{M.name or 'M'})"
    return PresentedModule(M.ring, target.rank, FreeModuleMap.from_columns(M.ring, target.rank, cols, reduce=False), name)


# ---------- Tor and Ext ----------


def _resolution(M: PresentedModule, i: int, max_length: int | None):
    need = i + 1
    if max_length is not None and need > max_length:
        res = free_resolution(M, max_length)
        if res.complete:
            return res
        raise IndeterminateError(f"degree {i} needs a resolution of length {need} > budget {max_length}")
    return free_resolution(M, need)


@lru_cache(maxsize=8192)
def tor(M: PresentedModule, N: PresentedModule, i: int, max_length: int | None = None) -> PresentedModule:
    """``Tor_i(M, N)`` as ``H_i(F (x) N)`` for a free resolution ``F`` of ``M``."""
    if i < 0:
        raise ValueError("negative degree")
    res = _resolution(M, i, max_length)
    g = N.rank
    ri = res.rank(i)
    if ri == 0 or g == 0:
        return PresentedModule.zero(M.ring)
    term = N.power(ri)
    out = out_target = None
    if i >= 1:
        out = res.differential(i).tensor_identity(g)
        out_target = N.power(res.rank(i - 1))
    inc = None
    if res.rank(i + 1):
        inc = res.differential(i + 1).tensor_identity(g)
    return _homology(term, out, out_target, inc)


@lru_cache(maxsize=8192)
def ext(M: PresentedModule, N: PresentedModule, i: int, max_length: int | None = None) -> PresentedModule:
    """``Ext^i(M, N)`` as ``H^i(Hom(F, N))``."""
    if i < 0:
        raise ValueError("negative degree")
    res = _resolution(M, i, max_length)
    g = N.rank
    ri = res.rank(i)
    if ri == 0 or g == 0:
        return PresentedModule.zero(M.ring)
    term = N.power(ri)
    out = out_target = None
    if res.rank(i + 1):
        out = res.differential(i + 1).transpose().tensor_identity(g)
        out_target = N.power(res.rank(i + 1))
    inc = None
    if i >= 1 and res.rank(i - 1):
        inc = res.differential(i).transpose().tensor_identity(g)
    return _homology(term, out, out_target, inc)


def hom_from_cyclic(J, M: PresentedModule) -> PresentedModule:
    """``(0 :_M J)``, presented as a subquotient of the generators of ``M``."""
    return homology_at(koszul_cochain(J, M), 0)


# ---------- annihilators and localization ----------


@lru_cache(maxsize=8192)
def _transporter(M: PresentedModule, j: int) -> tuple:
    """``(im A : e_j)`` as a tuple of raw polynomial dicts."""
    e = {(j, M.ring.zero_exp): 1}
    if not M.relation_basis.reduce_raw(e):
        return ({M.ring.zero_exp: 1},)
    vecs = kernel_vectors(M.ring, [e], M.relations.column_vectors(), M.rank, prune=False)
    return tuple({ex: c for (_, ex), c in v.items()} for v in vecs)


def _intersect(ring: QuotientRing, a: list[dict], b: list[dict]) -> list[dict]:
    zero = ring.zero_exp
    mod = [{(0, e): c for e, c in f.items()} for f in a] + [{(1, e): c for e, c in f.items()} for f in b]
    vecs = kernel_vectors(ring, [{(0, zero): 1, (1, zero): 1}], mod, 2, prune=False)
    return [{e: c for (_, e), c in v.items()} for v in vecs]


def annihilator(M: PresentedModule) -> Ideal:
    """``Ann(M)``: intersection of the transporters ``(relations : e_j)``."""
    ring = M.ring
    if M.is_zero():
        return Ideal(ring, (ring.one(),))
    current = None
    for j in range(M.rank):
        t = list(_transporter(M, j))
        current = t if current is None else _intersect(ring, current, t)
    gens = [Polynomial(ring, f) for f in current] if current else []
    gens = [ring.reduce(f) for f in gens]
    gens = [f for f in gens if not f.is_zero()]
    return Ideal(ring, tuple(gens), zero_ideal=not gens)


@lru_cache(maxsize=4096)
def ideal_basis(ideal: Ideal) -> GroebnerBasis:
    return buchberger(list(ideal.generators), ideal.ring)


def _as_ideal(p) -> Ideal:
    return p if isinstance(p, Ideal) else p.ideal


def vanishes_at_prime(M: PresentedModule, p) -> bool:
    """Whether ``M_p = 0``, i.e. ``Ann(M)`` is not contained in the prime ``p``.

    Since ``p`` is prime this reduces to one transporter per generator.
    """
    if M.rank == 0:
        return True
    gb = ideal_basis(_as_ideal(p))
    for j in range(M.rank):
        if all(not gb.reduce_raw({(0, e): c for e, c in f.items()}) for f in _transporter(M, j)):
            return False
    return True


def in_ideal(f: Polynomial, ideal: Ideal) -> bool:
    return ideal_basis(ideal).contains(f)


def ideal_contained(a: Ideal, b: Ideal) -> bool:
    gb = ideal_basis(b)
    return all(gb.contains(g) for g in a.generators)
