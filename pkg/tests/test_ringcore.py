import json

import pytest
from hypothesis import given, settings, strategies as st

from koszultor import ParseError, QuotientRing, SessionError, parse_session, serialize_session
from koszultor.ringcore import MonomialOrder, PrimeField, canonical_poly, compare_monomials, is_prime

from support import ring


# ---------- fields and orders ----------


def test_is_prime_small_values():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert is_prime(2**31 - 1)
    assert not is_prime(2**31 - 3)  # 2147483645 is divisible by 5


def test_field_inverses():
    F = PrimeField(101)
    assert all(a * F.inv(a) % 101 == 1 for a in range(1, 101))


@pytest.mark.parametrize("bad", [4, 1, 0, 2**31 + 11])
def test_field_rejects_bad_characteristic(bad):
    with pytest.raises(ValueError):
        PrimeField(bad)


def test_grevlex_examples():
    order = MonomialOrder("grevlex", 2)
    assert compare_monomials((2, 0), (1, 1), order) == 1
    assert compare_monomials((1, 0), (2, 0), order) == -1
    assert compare_monomials((3, 4), (3, 4), order) == 0


def test_grevlex_differs_from_grlex():
    # x*z^2 versus y^3 in three variables
    a, b = (1, 0, 2), (0, 3, 0)
    assert compare_monomials(a, b, MonomialOrder("grlex", 3)) == 1
    assert compare_monomials(a, b, MonomialOrder("grevlex", 3)) == -1


def test_lex_is_not_graded():
    assert compare_monomials((1, 0), (0, 5), MonomialOrder("lex", 2)) == 1


def test_order_aliases():
    assert MonomialOrder("graded-lex", 2) == MonomialOrder("grlex", 2)


def test_compare_rejects_mismatched_lengths():
    with pytest.raises(ValueError):
        compare_monomials((1,), (1, 0), MonomialOrder("grevlex", 2))


exps = st.tuples(*[st.integers(0, 4)] * 3)


@pytest.mark.parametrize("kind", ["grevlex", "lex", "grlex"])
@settings(max_examples=1000, deadline=None)
@given(a=exps, b=exps, c=exps)
def test_order_is_total_and_multiplicative(kind, a, b, c):
    order = MonomialOrder(kind, 3)
    ab, bc, ac = compare_monomials(a, b, order), compare_monomials(b, c, order), compare_monomials(a, c, order)
    assert compare_monomials(b, a, order) == -ab
    assert (ab == 0) == (a == b)
    if ab <= 0 and bc <= 0:
        assert ac <= 0
    shifted = [tuple(x + y for x, y in zip(m, c)) for m in (a, b)]
    assert compare_monomials(*shifted, order) == ab
    assert compare_monomials((0, 0, 0), a, order) <= 0


# ---------- polynomials ----------


def test_canonical_poly_examples():
    R = ring("xy")
    assert str(canonical_poly("y*x + x*y", R)) == "2*x*y"
    assert canonical_poly("x - x", R).is_zero()
    assert canonical_poly("102*x", R) == R("x")


def test_canonical_poly_does_not_reduce_modulo_relations():
    R = ring("xy", ["x*y"])
    assert str(canonical_poly("x*y", R)) == "x*y"
    assert R.reduce(R("x*y")).is_zero()


def test_parser_syntax():
    R = ring("xy")
    assert R("(x+y)^2") == R("x**2 + 2*x*y + y^2")
    assert R("-x - -y") == R("y - x")
    assert str(R("x^2*y - 3*x")) == "x^2*y - 3*x"
    assert R(5) == R("106")


@pytest.mark.parametrize("text", ["x +", "x ** ", "(x", "2x$", "z"])
def test_parser_errors(text):
    with pytest.raises(ParseError):
        ring("xy")(text)


def test_parser_error_column():
    with pytest.raises(ParseError) as info:
        ring("xy")("x + q")
    assert info.value.column == 5


def test_terms_sorted_and_leading_data():
    R = ring("xy")
    f = R("y^2 + x^2 + x*y + 1")
    assert [e for e, _ in f.sorted_terms()] == [(2, 0), (1, 1), (0, 2), (0, 0)]
    assert f.leading_monomial() == (2, 0) and f.leading_coefficient() == 1 and f.degree() == 2


polys = st.lists(st.tuples(st.integers(-200, 200), st.integers(0, 3), st.integers(0, 3)), max_size=5)


def build(R, spec):
    x, y = R.gens()
    out = R.zero()
    for c, a, b in spec:
        out = out + c * x**a * y**b
    return out


@settings(max_examples=200, deadline=None)
@given(f=polys, g=polys, h=polys)
def test_ring_axioms(f, g, h):
    R = ring("xy")
    f, g, h = build(R, f), build(R, g), build(R, h)
    assert f + g == g + f
    assert f * (g + h) == f * g + f * h
    assert (f * g) * h == f * (g * h)
    assert canonical_poly(str(f + g), R) == canonical_poly(str(g + f), R)
    assert canonical_poly(str(f), R) == f


# ---------- quotient rings and sessions ----------


def test_session_example_ring():
    s = parse_session({"ring": {"char": 101, "vars": ["x", "y"], "relations": ["x*y"]}})
    assert s.ring.nvars == 2 and [str(f) for f in s.ring.relation_polys] == ["x*y"]
    assert not s.ring.is_polynomial_ring


def test_characteristic_not_prime():
    with pytest.raises(SessionError, match="characteristic not prime"):
        parse_session({"ring": {"char": 4, "vars": ["x"]}})


def test_unit_relation_ideal():
    with pytest.raises(SessionError, match="unit relation ideal"):
        parse_session({"ring": {"char": 101, "vars": ["x"], "relations": ["1"]}})
    with pytest.raises(SessionError, match="unit relation ideal"):
        parse_session({"ring": {"char": 101, "vars": ["x", "y"], "relations": ["x", "x*y + 1"]}})


def test_unknown_variable_has_location():
    text = '{"ring": {"char": 101, "vars": ["x"],\n "relations": ["x*q"]}}'
    with pytest.raises(ParseError, match="unknown variable") as info:
        parse_session(text)
    assert info.value.line == 2


def test_json_syntax_error_location():
    with pytest.raises(ParseError) as info:
        parse_session('{"ring": {"char": 101,}')
    assert (info.value.line, info.value.column) == (1, 23)


def test_duplicate_names():
    doc = {"ring": {"char": 101, "vars": ["x"]},
           "primes": [{"name": "a", "generators": ["x"]}, {"name": "a", "generators": ["x"]}]}
    with pytest.raises(SessionError, match="duplicate"):
        parse_session(doc)


def test_zero_ideal_needs_marker():
    with pytest.raises(SessionError):
        parse_session({"ring": {"char": 101, "vars": ["x"]}, "primes": [{"name": "z", "generators": []}]})


def test_phi_validation_in_session():
    base = {"ring": {"char": 101, "vars": ["x"]}, "primes": [{"name": "m", "generators": ["x"]}]}
    with pytest.raises(SessionError):
        parse_session({**base, "phi": {"q": 1}})
    with pytest.raises(SessionError):
        parse_session({**base, "phi": {"m": -1}})


def test_module_row_length_checked():
    doc = {"ring": {"char": 101, "vars": ["x"]}, "modules": {"M": {"generators": 2, "relations": [["x"]]}}}
    with pytest.raises(SessionError):
        parse_session(doc)


def test_default_budget():
    s = parse_session({"ring": {"char": 101, "vars": ["x", "y", "z"]}})
    assert s.config.max_resolution_length == 7


def test_session_round_trip(tmp_path):
    doc = {
        "ring": {"char": 101, "vars": ["x", "y"], "order": "lex", "relations": ["x*y"]},
        "modules": {"M": {"generators": 2, "relations": [["x", "y^2"], ["0", "x"]]}},
        "primes": [{"name": "px", "generators": ["x"]}, {"name": "m", "generators": ["x", "y"]}],
        "phi": {"px": 0, "m": 1},
        "config": {"max_resolution_length": 5, "format": "json"},
    }
    s = parse_session(json.dumps(doc))
    once = serialize_session(s)
    again = serialize_session(parse_session(json.dumps(once)))
    assert once == again
    assert s.module("M").rank == 2 and s.phi == {"px": 0, "m": 1}
    assert s.config.format == "json" and s.ring.order_kind == "lex"


def test_ring_equality_is_by_value():
    assert ring("xy", ["x*y"]) == ring("xy", ["y*x"])
    assert ring("xy") != ring("xy", ["x*y"])
    assert QuotientRing(101, ("x",)) != QuotientRing(103, ("x",))
