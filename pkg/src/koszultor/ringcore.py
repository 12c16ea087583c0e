"""Polynomial arithmetic over prime fields, quotient rings and session parsing.

Monomials are exponent tuples.  A polynomial keeps its terms in a dict
``{exponents: coefficient}`` with coefficients in ``range(1, p)``; sorted
views are produced on demand from the ring's monomial order.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Mapping

ORDERS = ("grevlex", "lex", "grlex")
_ORDER_ALIASES = {"graded-lex": "grlex", "deglex": "grlex", "degrevlex": "grevlex"}


class ParseError(ValueError):
    """Malformed polynomial expression or session document."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}, column {column})"
        elif column is not None:
            where = f" (column {column})"
        super().__init__(message + where)


class SessionError(ValueError):
    """A syntactically valid session that violates a semantic constraint."""


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class PrimeField:
    characteristic: int

    def __post_init__(self):
        p = self.characteristic
        if not isinstance(p, int) or not 2 <= p < 2**31 or not is_prime(p):
            raise SessionError(f"characteristic not prime: {p!r}")

    def inv(self, a: int) -> int:
        a %= self.characteristic
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return pow(a, -1, self.characteristic)


class MonomialOrder:
    """Monomial order on exponent tuples; variable precedence is tuple position."""

    def __init__(self, kind: str, nvars: int):
        kind = _ORDER_ALIASES.get(kind, kind)
        if kind not in ORDERS:
            raise SessionError(f"unknown monomial order {kind!r}")
        self.kind = kind
        self.nvars = nvars
        self._cache: dict[tuple, tuple] = {}

    def key(self, exp: tuple) -> tuple:
        """Flat integer tuple; larger key means larger monomial."""
        k = self._cache.get(exp)
        if k is None:
            if self.kind == "lex":
                k = exp
            elif self.kind == "grlex":
                k = (sum(exp),) + exp
            else:
                k = (sum(exp),) + tuple(-e for e in reversed(exp))
            self._cache[exp] = k
        return k

    def compare(self, a: tuple, b: tuple) -> int:
        if len(a) != len(b) or len(a) != self.nvars:
            raise ValueError("monomials have mismatched lengths")
        ka, kb = self.key(a), self.key(b)
        return (ka > kb) - (ka < kb)

    def __eq__(self, other):
        return isinstance(other, MonomialOrder) and (self.kind, self.nvars) == (other.kind, other.nvars)

    def __hash__(self):
        return hash((self.kind, self.nvars))

    def __repr__(self):
        return f"MonomialOrder({self.kind!r}, {self.nvars})"


def compare_monomials(a: tuple, b: tuple, order: MonomialOrder) -> int:
    """Return -1, 0 or 1 as ``a`` is less than, equal to or greater than ``b``."""
    return order.compare(tuple(a), tuple(b))


# ---------- polynomial expression parsing ----------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*^()]))")


def _tokenize(text: str):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r} in {text!r}", column=pos + 1)
        num, name, op = m.groups()
        start = m.start(m.lastindex)
        if num is not None:
            out.append(("num", int(num), start))
        elif name is not None:
            out.append(("name", name, start))
        else:
            out.append(("op", "^" if op == "**" else op, start))
        pos = m.end()
    out.append(("end", None, len(text)))
    return out


class _ExprParser:
    def __init__(self, ring: "QuotientRing", text: str):
        self.ring = ring
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, msg, tok):
        raise ParseError(f"{msg} in {self.text!r}", column=tok[2] + 1)

    def parse(self) -> "Polynomial":
        if self.peek()[0] == "end":
            self.fail("empty expression", self.peek())
        f = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected token {self.peek()[1]!r}", self.peek())
        return f

    def expr(self):
        f = self.term()
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            g = self.term()
            f = f + g if op == "+" else f - g
        return f

    def term(self):
        f = self.unary()
        while self.peek()[:2] == ("op", "*"):
            self.take()
            f = f * self.unary()
        return f

    def unary(self):
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek()[:2] == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            tok = self.take()
            if tok[0] != "num":
                self.fail("exponent must be a non-negative integer literal", tok)
            return base ** tok[1]
        return base

    def atom(self):
        tok = self.take()
        kind, val, _ = tok
        if kind == "num":
            return self.ring.constant(val)
        if kind == "name":
            if val not in self.ring.variables:
                self.fail(f"unknown variable {val!r}", tok)
            return self.ring.gen(val)
        if (kind, val) == ("op", "("):
            f = self.expr()
            if self.take()[:2] != ("op", ")"):
                self.fail("missing ')'", tok)
            return f
        self.fail(f"unexpected token {val!r}", tok)


# ---------- rings and polynomials ----------


@dataclass(frozen=True, eq=False)
class QuotientRing:
    """``F_p[variables] / relations`` with a fixed monomial order.

    ``relations`` holds polynomial expressions (or Polynomials of a ring with
    the same variables).  Equality and hashing are by value.
    """

    characteristic: int
    variables: tuple[str, ...]
    order_kind: str = "grevlex"
    relations: tuple = ()
    equidimensional: bool | None = None

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        if len(set(self.variables)) != len(self.variables):
            raise SessionError("duplicate variable names")
        for v in self.variables:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", v):
                raise SessionError(f"invalid variable name {v!r}")
        object.__setattr__(self, "field", PrimeField(self.characteristic))
        object.__setattr__(self, "order", MonomialOrder(self.order_kind, len(self.variables)))
        object.__setattr__(self, "order_kind", self.order.kind)
        rels = []
        for r in self.relations:
            poly = canonical_poly(r, self) if isinstance(r, str) else self.lift(r)
            if not poly.is_zero():
                rels.append(tuple(sorted(poly.terms.items())))
        object.__setattr__(self, "relations", tuple(rels))
        if self.relation_basis and self.relation_basis[0] == {self.zero_exp: 1}:
            raise SessionError("unit relation ideal")

    # identity ---------------------------------------------------------
    def _ident(self):
        return (self.characteristic, self.variables, self.order_kind, self.relations)

    def __eq__(self, other):
        return isinstance(other, QuotientRing) and self._ident() == other._ident()

    def __hash__(self):
        return hash(self._ident())

    def __repr__(self):
        rel = ", ".join(str(r) for r in self.relation_polys)
        base = f"F_{self.characteristic}[{', '.join(self.variables)}]"
        return f"{base}/({rel})" if rel else base

    # basics -----------------------------------------------------------
    @property
    def nvars(self) -> int:
        return len(self.variables)

    @property
    def p(self) -> int:
        return self.characteristic

    @cached_property
    def zero_exp(self) -> tuple:
        return (0,) * self.nvars

    @property
    def is_polynomial_ring(self) -> bool:
        return not self.relations

    @property
    def is_equidimensional(self) -> bool:
        if self.is_polynomial_ring:
            return True
        return bool(self.equidimensional)

    @cached_property
    def relation_polys(self) -> tuple["Polynomial", ...]:
        return tuple(Polynomial(self, dict(r)) for r in self.relations)

    @cached_property
    def relation_basis(self) -> list[dict]:
        """Reduced Groebner basis of the relation ideal, as raw term dicts."""
        from . import groebner

        if not self.relations:
            return []
        vecs = [{(0, e): c for e, c in r} for r in self.relations]
        gb = groebner.raw_groebner(vecs, self, rank=1, adjoin_relations=False)
        return [{e: c for (_, e), c in g.items()} for g in gb]

    def constant(self, c: int) -> "Polynomial":
        c %= self.p
        return Polynomial(self, {self.zero_exp: c} if c else {})

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return self.constant(1)

    def gen(self, name: str | int) -> "Polynomial":
        i = self.variables.index(name) if isinstance(name, str) else name
        e = [0] * self.nvars
        e[i] = 1
        return Polynomial(self, {tuple(e): 1})

    def gens(self) -> list["Polynomial"]:
        return [self.gen(i) for i in range(self.nvars)]

    def __call__(self, expr) -> "Polynomial":
        if isinstance(expr, Polynomial):
            return self.lift(expr)
        if isinstance(expr, int):
            return self.constant(expr)
        return canonical_poly(expr, self)

    def lift(self, f: "Polynomial") -> "Polynomial":
        """Re-home a polynomial of a ring with the same variables."""
        if f.ring is self:
            return f
        if f.ring.variables != self.variables:
            raise ValueError("polynomial belongs to a ring with different variables")
        return Polynomial(self, {e: c % self.p for e, c in f.terms.items()})

    def reduce(self, f: "Polynomial") -> "Polynomial":
        """Normal form modulo the relation ideal."""
        if not self.relations:
            return f
        from .groebner import reduce_poly_raw

        return Polynomial(self, reduce_poly_raw(f.terms, self.relation_basis, self))

    def ambient(self) -> "QuotientRing":
        """The polynomial ring with the same variables, field and order."""
        return QuotientRing(self.characteristic, self.variables, self.order_kind)

    def with_relations(self, relations: Iterable) -> "QuotientRing":
        return QuotientRing(self.characteristic, self.variables, self.order_kind,
                            tuple(relations), self.equidimensional)


class Polynomial:
    """Immutable sparse polynomial over a prime field."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: QuotientRing, terms: Mapping[tuple, int]):
        self.ring = ring
        self.terms = terms if isinstance(terms, dict) else dict(terms)
        self._hash = None

    # views
    def sorted_terms(self) -> list[tuple[tuple, int]]:
        key = self.ring.order.key
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or set(self.terms) == {self.ring.zero_exp}

    def leading_monomial(self) -> tuple:
        return max(self.terms, key=self.ring.order.key)

    def leading_coefficient(self) -> int:
        return self.terms[self.leading_monomial()]

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    # arithmetic
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.ring is not self.ring and other.ring != self.ring:
                other = self.ring.lift(other)
            return other
        if isinstance(other, int):
            return self.ring.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.ring.p
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = (out.get(e, 0) + c) % p
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Polynomial(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        p = self.ring.p
        return Polynomial(self.ring, {e: p - c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.ring.p
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = (out.get(e, 0) + c1 * c2) % p
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return Polynomial(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative exponent")
        result, base = self.ring.one(), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.terms == other.terms and self.ring.variables == other.ring.variables

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Polynomial({format_poly(self)!r})"


def canonical_poly(expr: str, ring: QuotientRing) -> Polynomial:
    """Parse ``expr`` into canonical form (no reduction modulo relations)."""
    return _ExprParser(ring, expr).parse()


def format_poly(f: Polynomial) -> str:
    if f.is_zero():
        return "0"
    p = f.ring.p
    names = f.ring.variables
    parts = []
    for e, c in f.sorted_terms():
        sign = "+"
        if c > p // 2:
            sign, c = "-", p - c
        mono = "*".join(
            names[i] if k == 1 else f"{names[i]}^{k}" for i, k in enumerate(e) if k
        )
        if not mono:
            body = str(c)
        elif c == 1:
            body = mono
        else:
            body = f"{c}*{mono}"
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


@dataclass(frozen=True, eq=False)
class Ideal:
    """Finitely generated ideal; ``zero_ideal`` marks the explicit (0)."""

    ring: QuotientRing
    generators: tuple[Polynomial, ...]
    zero_ideal: bool = False

    def __post_init__(self):
        gens = tuple(self.ring(g) for g in self.generators)
        if not gens and not self.zero_ideal:
            raise SessionError("an ideal needs generators or the zero_ideal marker")
        object.__setattr__(self, "generators", gens)

    def __eq__(self, other):
        return (isinstance(other, Ideal) and self.ring == other.ring
                and self.generators == other.generators and self.zero_ideal == other.zero_ideal)

    def __hash__(self):
        return hash((self.ring, self.generators, self.zero_ideal))

    def __repr__(self):
        if not self.generators:
            return "(0)"
        return "(" + ", ".join(map(str, self.generators)) + ")"


# ---------- sessions ----------


@dataclass(frozen=True)
class SessionConfig:
    max_resolution_length: int
    format: str = "text"
    equidimensional: bool | None = None


@dataclass(frozen=True)
class Session:
    ring: QuotientRing
    modules: dict = field(default_factory=dict)
    primes: Any = None
    phi: dict | None = None
    config: SessionConfig | None = None

    def module(self, name: str):
        if name not in self.modules:
            raise SessionError(f"unknown module {name!r}")
        return self.modules[name]


def _where(text: str, needle: str) -> tuple[int | None, int | None]:
    idx = text.find(needle)
    if idx < 0:
        return None, None
    line = text.count("\n", 0, idx) + 1
    col = idx - (text.rfind("\n", 0, idx) + 1) + 1
    return line, col


def parse_session(source: str | Mapping) -> Session:
    """Build a validated :class:`Session` from a JSON document or dict."""
    from .depthlab import PrimeEntry, PrimeTable
    from .homalg import PresentedModule

    text = source if isinstance(source, str) else None
    if text is not None:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"syntax error: {exc.msg}", exc.lineno, exc.colno) from None
    else:
        doc = source
    if not isinstance(doc, Mapping) or "ring" not in doc:
        raise ParseError("session must be an object with a 'ring' entry", 1, 1)

    def poly_error(exc: ParseError, expr: str):
        line, col = _where(text, json.dumps(expr)) if text else (None, None)
        if line is not None:
            col += (exc.column or 1)
        raise ParseError(str(exc).split(" (column")[0], line, col) from None

    r = doc["ring"]
    cfg = doc.get("config", {}) or {}
    for key in ("char", "vars"):
        if key not in r:
            raise ParseError(f"ring is missing {key!r}")
    nv = len(r["vars"])
    equi = cfg.get("equidimensional", r.get("equidimensional"))
    try:
        ring = QuotientRing(int(r["char"]), tuple(r["vars"]), r.get("order", "grevlex"),
                            (), equi)
        rels = []
        for expr in r.get("relations", []):
            try:
                rels.append(canonical_poly(expr, ring))
            except ParseError as exc:
                poly_error(exc, expr)
        ring = ring.with_relations(rels)
    except ZeroDivisionError:  # pragma: no cover
        raise SessionError("invalid ring")

    def poly(expr):
        try:
            return canonical_poly(str(expr), ring)
        except ParseError as exc:
            poly_error(exc, str(expr))

    modules = {}
    for name, spec in (doc.get("modules") or {}).items():
        n = int(spec["generators"])
        rows = []
        for rel in spec.get("relations", []):
            if len(rel) != n:
                raise SessionError(f"module {name!r}: relation {rel!r} has length {len(rel)}, expected {n}")
            rows.append([poly(e) for e in rel])
        modules[name] = PresentedModule.from_relations(ring, n, rows, name=name)

    entries, seen = [], set()
    for pr in doc.get("primes", []) or []:
        name = pr["name"]
        if name in seen or name in modules:
            raise SessionError(f"duplicate name {name!r}")
        seen.add(name)
        gens = [poly(g) for g in pr.get("generators", [])]
        entries.append(PrimeEntry(name, Ideal(ring, tuple(gens), bool(pr.get("zero_ideal", False)))))
    table = PrimeTable(ring, tuple(entries))

    phi = None
    if doc.get("phi") is not None:
        phi = {}
        for k, v in doc["phi"].items():
            if k not in seen:
                raise SessionError(f"phi refers to unknown prime {k!r}")
            if not isinstance(v, int) or v < 0:
                raise SessionError(f"phi({k}) must be a non-negative integer")
            phi[k] = v
    config = SessionConfig(int(cfg.get("max_resolution_length", nv + 4)),
                           cfg.get("format", "text"), equi)
    return Session(ring, modules, table, phi, config)


def serialize_session(s: Session) -> dict:
    ring = s.ring
    doc = {
        "ring": {
            "char": ring.characteristic,
            "vars": list(ring.variables),
            "order": ring.order_kind,
            "relations": [str(f) for f in ring.relation_polys],
        },
        "modules": {},
        "primes": [],
        "config": {"max_resolution_length": s.config.max_resolution_length,
                   "format": s.config.format},
    }
    if s.config.equidimensional is not None:
        doc["config"]["equidimensional"] = s.config.equidimensional
    for name, m in s.modules.items():
        doc["modules"][name] = {"generators": m.rank,
                                "relations": [[str(f) for f in col] for col in m.relations.column_polys()]}
    for e in s.primes.entries:
        item = {"name": e.name, "generators": [str(g) for g in e.ideal.generators]}
        if e.ideal.zero_ideal:
            item["zero_ideal"] = True
        doc["primes"].append(item)
    if s.phi is not None:
        doc["phi"] = dict(s.phi)
    return doc
