"""Depth-bounded functions on a prime table and the Tor-pairs they classify.

A function ``phi`` on the table with ``phi <= depth`` determines the class of
modules ``M`` with ``depth M_p >= phi(p)`` everywhere.  Membership can be
decided two ways: from local depths, or by Tor-vanishing against the Koszul
cocycle modules ``S_phi(p)(p; R)`` localized at ``p``.  Both are provided so
they can be compared.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from itertools import product
from math import prod
from typing import Iterable, Iterator, Sequence

from .depthlab import (
    DepthProfile,
    PrimeEntry,
    PrimeTable,
    depth_table,
    height,
    local_depth,
)
from .groebner import free_resolution
from .homalg import (
    IndeterminateError,
    PresentedModule,
    cocycle_module,
    homology_at,
    koszul_cochain,
    tor,
    vanishes_at_prime,
)

ENUMERATION_LIMIT = 10**7


class PhiViolation(ValueError):
    """``phi`` exceeds the depth function at the listed primes."""

    def __init__(self, violations):
        self.violations = list(violations)
        desc = ", ".join(f"{name} ({v} > {d})" for name, v, d in self.violations)
        super().__init__(f"phi exceeds depth at {desc}")


class RecoveryRefused(ValueError):
    """A generator without a certified finite flat dimension was supplied."""


class NotRegular(ValueError):
    pass


@dataclass(frozen=True)
class PhiFunction:
    """Values of ``phi`` on every entry of a prime table, stored in table order."""

    table: PrimeTable
    values: tuple
    validated: bool = field(default=False, compare=False)

    def __post_init__(self):
        if len(self.values) != len(self.table):
            raise ValueError("phi must be total on the prime table")
        if any(not isinstance(v, int) or v < 0 for v in self.values):
            raise ValueError("phi values must be non-negative integers")

    @classmethod
    def from_mapping(cls, table: PrimeTable, mapping) -> "PhiFunction":
        missing = [n for n in table.names if n not in mapping]
        if missing:
            raise ValueError(f"phi is undefined at {', '.join(missing)}")
        extra = set(mapping) - set(table.names)
        if extra:
            raise ValueError(f"phi refers to unknown primes {sorted(extra)}")
        return cls(table, tuple(int(mapping[n]) for n in table.names))

    @classmethod
    def constant(cls, table: PrimeTable, c: int = 0) -> "PhiFunction":
        return cls(table, (c,) * len(table))

    def __getitem__(self, p) -> int:
        return self.values[self.table.index(p)]

    def items(self):
        return zip(self.table.names, self.values)

    def as_dict(self) -> dict:
        return dict(self.items())

    def max(self) -> int:
        return max(self.values, default=0)

    def __str__(self):
        return "{" + ", ".join(f"{n}: {v}" for n, v in self.items()) + "}"


@dataclass(frozen=True)
class GeneratorSpec:
    """The cocycle module ``S_level(p; R)``; with ``localized`` it stands for its localization at ``p``."""

    prime: PrimeEntry
    level: int
    module: PresentedModule
    localized: bool = True


@dataclass(frozen=True)
class Verdict:
    """A yes/no/indeterminate answer with its witnesses and computation path."""

    holds: bool | None
    witnesses: tuple = ()
    path: str = ""
    note: str = ""

    def __bool__(self):
        if self.holds is None:
            raise IndeterminateError(f"indeterminate verdict: {self.note or self.witnesses}")
        return self.holds


@dataclass(frozen=True)
class SubsetChain:
    """``X_0 ⊆ X_1 ⊆ ... ⊆ X_N`` where ``X_n`` holds the primes with ``phi <= n``."""

    chain: tuple

    def at(self, n: int) -> tuple:
        return self.chain[min(n, len(self.chain) - 1)]


def _profile_for(phi: PhiFunction, profile: DepthProfile):
    if profile.table.names != phi.table.names or profile.table.ring != phi.table.ring:
        raise ValueError("phi and the depth profile live on different tables")


def phi_violations(phi: PhiFunction, profile: DepthProfile) -> list:
    _profile_for(phi, profile)
    out = []
    for name, v in phi.items():
        d = profile.depth[name]
        ok = d.at_least(v)
        if ok is None:
            raise IndeterminateError(f"depth at {name} is only known to be {d}")
        if not ok:
            out.append((name, v, d.value))
    return out


def validate_phi(phi: PhiFunction, profile: DepthProfile) -> PhiFunction:
    """Return ``phi`` marked valid, or raise :class:`PhiViolation` listing every bad prime."""
    bad = phi_violations(phi, profile)
    if bad:
        raise PhiViolation(bad)
    return PhiFunction(phi.table, phi.values, True)


def _require_valid(phi: PhiFunction):
    if not phi.validated:
        raise ValueError("phi has not been validated against the depth function")


# ---------- membership ----------


def class_membership(M: PresentedModule, phi: PhiFunction, shift: int = 0, primes=None,
                     max_length: int | None = None) -> Verdict:
    """Whether ``depth M_p >= phi(p) - shift`` at every table prime (or at ``primes``)."""
    _require_valid(phi)
    names = phi.table.names if primes is None else [p.name if isinstance(p, PrimeEntry) else p for p in primes]
    failures, unknown = [], []
    for name in names:
        need = phi[name] - shift
        if need <= 0:
            continue
        d = local_depth(M, phi.table.entry(name), "ext", max_length)
        ok = d.at_least(need)
        if ok is False:
            failures.append((name, d.value))
        elif ok is None:
            unknown.append((name, str(d)))
    if failures:
        return Verdict(False, tuple(failures), "ext")
    if unknown:
        return Verdict(None, tuple(unknown), "ext", "depth budget exhausted")
    return Verdict(True, (), "ext")


def generator_set(phi: PhiFunction) -> list[GeneratorSpec]:
    """One localized cocycle module ``S_phi(p)(p; R)`` per prime with ``phi(p) > 0``."""
    _require_valid(phi)
    R = PresentedModule.free(phi.table.ring)
    out = []
    for e, k in zip(phi.table.entries, phi.values):
        if k > 0:
            out.append(GeneratorSpec(e, k, cocycle_module(e.ideal, R, k).with_name(f"S_{k}({e.name})")))
    return out


def tor_oracle_membership(M: PresentedModule, phi: PhiFunction, max_length: int | None = None) -> Verdict:
    """Membership via ``Tor_j(S_phi(p)(p;R), M)_p = 0`` for ``1 <= j <= phi(p)``."""
    _require_valid(phi)
    if max_length is None:
        max_length = M.ring.nvars + 4
    for spec in generator_set(phi):
        for j in range(1, spec.level + 1):
            try:
                group = tor(spec.module, M, j, max_length)
            except IndeterminateError:
                return Verdict(None, ((spec.prime.name, j),), "tor-oracle", "resolution budget exhausted")
            if not vanishes_at_prime(group, spec.prime):
                return Verdict(False, ((spec.prime.name, j),), "tor-oracle")
    return Verdict(True, (), "tor-oracle")


# ---------- recovering phi from generators ----------


def _local_koszul_exact_below(spec: GeneratorSpec) -> bool:
    """``H^i(p; R)_p = 0`` for ``i < level``, so the localized ``S_level`` has flat dimension <= level."""
    R = PresentedModule.free(spec.prime.ring)
    C = koszul_cochain(list(spec.prime.generators), R)
    return all(vanishes_at_prime(homology_at(C, i), spec.prime) for i in range(spec.level))


def _flat_length(G, max_length: int) -> int:
    if isinstance(G, GeneratorSpec):
        if G.localized and _local_koszul_exact_below(G):
            return G.level
        G = G.module
    res = free_resolution(G, max_length)
    if not res.complete:
        raise RecoveryRefused(f"no finite free resolution of length <= {max_length} for {G!r}")
    return res.length


def recover_phi(generators: Iterable, table: PrimeTable, max_length: int | None = None) -> PhiFunction:
    """``phi(p) = max j`` such that some generator has ``Tor_j(G, R/p)_p != 0``.

    Plain modules need a complete free resolution.  A :class:`GeneratorSpec`
    tagged as localized at ``q`` only counts at primes ``p ⊆ q``.
    """
    ring = table.ring
    if max_length is None:
        max_length = ring.nvars + 4
    gens = list(generators)
    lengths = [_flat_length(G, max_length) for G in gens]
    residues = {e.name: PresentedModule.cyclic(ring, list(e.generators)) for e in table}
    values = []
    for e in table:
        best = 0
        for G, L in zip(gens, lengths):
            module = G
            if isinstance(G, GeneratorSpec):
                if G.localized and not _below(e, G.prime):
                    continue
                module = G.module
            for j in range(L, best, -1):
                if not vanishes_at_prime(tor(module, residues[e.name], j, max(max_length, j + 1)), e):
                    best = j
                    break
        values.append(best)
    return PhiFunction(table, tuple(values))


def _below(p: PrimeEntry, q: PrimeEntry) -> bool:
    gb = q.basis
    return all(gb.contains(g) for g in p.generators)


# ---------- order conditions ----------


def is_order_preserving(phi: PhiFunction, table: PrimeTable | None = None) -> bool:
    """``phi(q) <= phi(p)`` whenever ``q ⊆ p`` in the table."""
    table = table or phi.table
    for q in table.names:
        for p in table.names:
            if table.contains(q, p) and phi[q] > phi[p]:
                return False
    return True


def cotilting_check(phi: PhiFunction, profile: DepthProfile) -> Verdict:
    bad = phi_violations(phi, profile)
    if bad:
        return Verdict(False, tuple(bad), "ext", "phi exceeds depth")
    if not is_order_preserving(phi):
        return Verdict(False, _order_witnesses(phi), "ext", "phi is not order-preserving")
    return Verdict(True, (), "ext")


def _order_witnesses(phi: PhiFunction) -> tuple:
    t = phi.table
    return tuple((q, p) for q in t.names for p in t.names if t.contains(q, p) and phi[q] > phi[p])


def _require_regular(table: PrimeTable):
    if not table.ring.is_polynomial_ring:
        raise NotRegular("ring not regular: the session ring has relations")


def regular_dual(phi: PhiFunction, table: PrimeTable | None = None) -> PhiFunction:
    """``psi(p) = height(p) - phi(p)`` over a polynomial ring."""
    table = table or phi.table
    _require_regular(table)
    vals = []
    for name, v in phi.items():
        h = height(table.entry(name))
        if v > h:
            raise PhiViolation([(name, v, h)])
        vals.append(h - v)
    return PhiFunction(table, tuple(vals), True)


def both_definable_check(phi: PhiFunction, table: PrimeTable | None = None) -> Verdict:
    """Zero on table-minimal primes and steps of 0 or 1 along table-immediate inclusions."""
    table = table or phi.table
    _require_regular(table)
    bad = [(n, "minimal", phi[n]) for n in table.minimal_entries() if phi[n] != 0]
    for q, p in table.immediate_inclusions():
        gap = phi[p] - phi[q]
        if not 0 <= gap <= 1:
            bad.append((q, p, gap))
    return Verdict(not bad, tuple(bad), "ext", "minimality and immediacy are relative to the prime table")


def almost_cm_check(profile: DepthProfile) -> Verdict:
    """``grade(p) == depth(p)`` on every entry; witnesses are the primes where they differ."""
    diff, unknown = [], []
    for name, d, g, _ in profile.rows():
        if g is None:
            raise ValueError("profile has no grade values")
        if not (d.is_determinate and g.is_determinate):
            unknown.append(name)
        elif d != g:
            diff.append((name, g.to_json(), d.to_json()))
    if diff:
        return Verdict(False, tuple(diff), "koszul+ext")
    if unknown:
        return Verdict(None, tuple(unknown), "koszul+ext", "depth budget exhausted")
    return Verdict(True, (), "koszul+ext")


# ---------- restricted flat dimension ----------


def rfd(M: PresentedModule, profile: DepthProfile, max_length: int | None = None) -> int:
    """Table-restricted large restricted flat dimension: ``max depth(p) - depth M_p``, at least 0."""
    best = 0
    for e in profile.table:
        dm = local_depth(M, e, "ext", max_length)
        if dm.is_infinite:
            continue
        d = profile.depth[e.name]
        if not (d.is_determinate and dm.is_determinate):
            raise IndeterminateError(f"depth at {e.name} is not determinate")
        best = max(best, d.value - dm.value)
    return best


def rfd_small_lower(M: PresentedModule, testset: Sequence, max_length: int | None = None) -> int:
    """Largest ``j`` with ``Tor_j(F, M) != 0`` over test modules of certified finite flat dimension."""
    if max_length is None:
        max_length = M.ring.nvars + 4
    best = 0
    for F in testset:
        if isinstance(F, GeneratorSpec):
            F = F.module
        res = free_resolution(F, max_length)
        if not res.complete:
            warnings.warn(f"skipping {F!r}: no complete free resolution within the budget")
            continue
        for j in range(res.length, best, -1):
            if not tor(F, M, j, max_length).is_zero():
                best = j
                break
    return best


# ---------- enumeration ----------

FILTERS = ("none", "order-preserving", "both-definable")


def enumeration_size(profile: DepthProfile) -> int:
    sizes = []
    for name in profile.names:
        d = profile.depth[name]
        if not d.is_determinate or d.is_infinite:
            raise IndeterminateError(f"depth at {name} is {d}")
        sizes.append(d.value + 1)
    return prod(sizes)


def enumerate_phi(profile: DepthProfile, filter: str = "none", allow_large: bool = False) -> Iterator[PhiFunction]:
    """All ``phi <= depth`` on the table in lexicographic order, optionally filtered."""
    if filter not in FILTERS:
        raise ValueError(f"unknown filter {filter!r}; choose from {', '.join(FILTERS)}")
    size = enumeration_size(profile)
    if size > ENUMERATION_LIMIT and not allow_large:
        raise ValueError(f"{size} candidate functions exceed {ENUMERATION_LIMIT}; pass allow_large")
    if filter == "both-definable":
        _require_regular(profile.table)
    return _enumerate(profile, filter)


def _enumerate(profile, filter):
    table = profile.table
    ranges = [range(profile.depth[n].value + 1) for n in table.names]
    for vals in product(*ranges):
        phi = PhiFunction(table, tuple(vals), True)
        if filter == "order-preserving" and not is_order_preserving(phi):
            continue
        if filter == "both-definable" and not both_definable_check(phi).holds:
            continue
        yield phi


def sequence_view(phi: PhiFunction) -> SubsetChain:
    top = phi.max()
    return SubsetChain(tuple(tuple(n for n, v in phi.items() if v <= k) for k in range(top + 1)))


# ---------- reports ----------


@dataclass(frozen=True)
class ClassificationReport:
    phi: PhiFunction
    memberships: dict
    oracle: dict
    order_preserving: bool
    cotilting: Verdict
    both_definable: Verdict | None
    almost_cm: Verdict
    dual: PhiFunction | None


def classify(modules: dict, phi: PhiFunction, profile: DepthProfile | None = None,
             max_length: int | None = None) -> ClassificationReport:
    """Validate ``phi`` and decide membership of every module by both routes."""
    profile = profile or depth_table(phi.table, max_length)
    phi = validate_phi(phi, profile)
    members = {name: class_membership(M, phi, 0, max_length=max_length) for name, M in modules.items()}
    oracle = {name: tor_oracle_membership(M, phi, max_length) for name, M in modules.items()}
    regular = phi.table.ring.is_polynomial_ring
    return ClassificationReport(
        phi, members, oracle, is_order_preserving(phi), cotilting_check(phi, profile),
        both_definable_check(phi) if regular else None, almost_cm_check(profile),
        regular_dual(phi) if regular else None,
    )


__all__ = [
    "PhiFunction", "GeneratorSpec", "Verdict", "SubsetChain", "ClassificationReport",
    "PhiViolation", "RecoveryRefused", "NotRegular", "phi_violations", "validate_phi",
    "class_membership", "generator_set", "tor_oracle_membership", "recover_phi",
    "is_order_preserving", "cotilting_check", "regular_dual", "both_definable_check",
    "almost_cm_check", "rfd", "rfd_small_lower", "enumerate_phi", "enumeration_size",
    "sequence_view", "classify", "ENUMERATION_LIMIT", "FILTERS",
]
