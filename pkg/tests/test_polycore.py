import pytest
from fractions import Fraction

import sympy as sp
from hypothesis import given, settings, strategies as st

from diagasym.polycore import (
    MPoly,
    ParseError,
    RatFun,
    SingularOrigin,
    UPoly,
    graeffe,
    int_from_json,
    int_to_json,
    is_squarefree,
    mpoly_divexact,
    mpoly_gcd,
    parse_mpoly,
    parse_ratfun,
    real_imag_split,
    resultant,
    squarefree_part,
    upoly_gcd,
    upoly_resultant,
)


# -- helpers -----------------------------------------------------------------


def to_sympy(p: MPoly):
    syms = sp.symbols(p.vars) if p.vars else ()
    out = sp.Integer(0)
    for e, c in p.terms.items():
        t = sp.Integer(c)
        for s, x in zip(syms, e):
            t *= s**x
        out += t
    return sp.expand(out), syms


def upoly_to_sympy(p: UPoly, x):
    return sum(sp.Integer(c) * x**i for i, c in enumerate(p.coeffs))


def sylvester_resultant(a: UPoly, b: UPoly) -> int:
    """Independent oracle: determinant of the Sylvester matrix, rows of the
    first polynomial on top."""
    m, n = a.degree(), b.degree()
    if m < 0 or n < 0:
        return 0
    if m == 0:
        return a.coeffs[0] ** n
    if n == 0:
        return b.coeffs[0] ** m
    size = m + n
    rows = []
    ra = list(reversed(a.coeffs))
    rb = list(reversed(b.coeffs))
    for i in range(n):
        rows.append([0] * i + ra + [0] * (size - i - len(ra)))
    for i in range(m):
        rows.append([0] * i + rb + [0] * (size - i - len(rb)))
    return int(sp.Matrix(rows).det())


class QQi:
    """Exact Gaussian rationals for checking the real/imaginary split."""

    def __init__(self, re, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    def __add__(self, o):
        o = o if isinstance(o, QQi) else QQi(o)
        return QQi(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __mul__(self, o):
        o = o if isinstance(o, QQi) else QQi(o)
        return QQi(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = QQi(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, o):
        o = o if isinstance(o, QQi) else QQi(o)
        return self.re == o.re and self.im == o.im


mpoly_coeff = st.integers(min_value=-40, max_value=40)


@st.composite
def small_mpolys(draw, vars=("x", "y")):
    nterms = draw(st.integers(0, 6))
    terms = {}
    for _ in range(nterms):
        e = tuple(draw(st.integers(0, 3)) for _ in vars)
        terms[e] = draw(mpoly_coeff)
    return MPoly(vars, terms)


@st.composite
def small_upolys(draw, maxdeg=6):
    n = draw(st.integers(1, maxdeg + 1))
    return UPoly([draw(st.integers(-30, 30)) for _ in range(n)])


# -- parsing -----------------------------------------------------------------


def test_parse_product_expansion():
    # frozen from an independent expansion (sympy agrees)
    p = parse_mpoly("(1-x-y)*(20-x-40*y)-1")
    expected = parse_mpoly("19 - 21*x - 60*y + x^2 + 41*x*y + 40*y^2")
    assert p == expected


def test_parse_rejects_implicit_multiplication():
    with pytest.raises(ParseError):
        parse_mpoly("2x + 1")
    with pytest.raises(ParseError):
        parse_mpoly("(1+x)(1-x)")


def test_parse_rejects_division_in_polynomial():
    with pytest.raises(ParseError):
        parse_mpoly("x/2")


def test_parse_unary_minus_and_nesting():
    assert parse_mpoly("-x + -(-3)") == parse_mpoly("3 - x")
    assert parse_mpoly("-(x - (y - 1))") == parse_mpoly("y - x - 1")


def test_parse_power_rules():
    assert parse_mpoly("x^3*x^2") == parse_mpoly("x^5")
    with pytest.raises(ParseError):
        parse_mpoly("x^(2)")
    with pytest.raises(ParseError):
        parse_mpoly("x^y")


def test_parse_fixed_variable_order():
    p = parse_mpoly("z + a", vars=("a", "z"))
    assert p.vars == ("a", "z")
    with pytest.raises(ParseError):
        parse_mpoly("w + a", vars=("a", "z"))


def test_parse_error_position():
    with pytest.raises(ParseError) as err:
        parse_mpoly("1 + $")
    assert err.value.pos == 4


def test_parse_ratfun_reduces():
    f = parse_ratfun("(1-x^2)/(1-x)")
    assert f.num == parse_mpoly("1+x").with_vars(f.vars)
    assert f.den == 1


def test_ratfun_origin_pole_rejected():
    with pytest.raises(SingularOrigin):
        parse_ratfun("1/(x+y)")


def test_ratfun_denominator_sign_normalized():
    f = parse_ratfun("x/(0-1+x)")
    assert f.den.constant_term() > 0


# -- MPoly arithmetic --------------------------------------------------------


@settings(max_examples=120, deadline=None)
@given(small_mpolys(), small_mpolys(), small_mpolys())
def test_mpoly_ring_axioms_against_sympy(p, q, r):
    sp_p, _ = to_sympy(p)
    sp_q, _ = to_sympy(q)
    sp_r, _ = to_sympy(r)
    got, _ = to_sympy(p * q + r)
    assert sp.expand(sp_p * sp_q + sp_r - got) == 0
    got2, _ = to_sympy((p - q) * (p + q))
    assert sp.expand(sp_p**2 - sp_q**2 - got2) == 0


@settings(max_examples=60, deadline=None)
@given(small_mpolys())
def test_mpoly_partial_matches_sympy(p):
    sp_p, syms = to_sympy(p)
    for v, s in zip(p.vars, syms):
        got, _ = to_sympy(p.partial(v))
        assert sp.expand(sp.diff(sp_p, s) - got) == 0


def test_mpoly_degree_and_height():
    p = parse_mpoly("5*x^2*y - 3*x + 7")
    assert p.degree() == 3
    assert p.height() == 3  # ceil(log2 7)
    assert MPoly.const(0, ("x",)).degree() == -1


def test_dilate_scales_by_total_degree():
    h = parse_mpoly("1 - x - y")
    ht = h.dilate("t")
    assert ht == parse_mpoly("1 - x*t - y*t", vars=("x", "y", "t"))
    g = parse_mpoly("x^2*y")
    assert g.dilate("t") == parse_mpoly("x^2*y*t^3", vars=("x", "y", "t"))


@settings(max_examples=60, deadline=None)
@given(small_mpolys(), st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3))
def test_real_imag_split_is_exact(p, ar, ai, br, bi):
    rp, ip = real_imag_split(p, ("xr", "yr"), ("xi", "yi"))
    z = {"x": QQi(ar, ai), "y": QQi(br, bi)}
    want = p.evaluate(z)
    want = want if isinstance(want, QQi) else QQi(want)
    subs = {"xr": Fraction(ar), "xi": Fraction(ai), "yr": Fraction(br), "yi": Fraction(bi)}
    assert QQi(rp.evaluate(subs), ip.evaluate(subs)) == want


def test_evaluate_exact_fractions():
    p = parse_mpoly("x^2 + 41*x*y + 40*y^2 - 21*x - 60*y + 19")
    v = p.evaluate({"x": Fraction(1, 2), "y": Fraction(1, 2)})
    assert v == Fraction(19 * 4 - 21 * 2 - 60 * 2 + 1 + 41 + 40, 4)


# -- UPoly -------------------------------------------------------------------


@settings(max_examples=100, deadline=None)
@given(small_upolys(), small_upolys())
def test_upoly_mul_matches_sympy(a, b):
    x = sp.Symbol("x")
    got = upoly_to_sympy(a * b, x)
    assert sp.expand(upoly_to_sympy(a, x) * upoly_to_sympy(b, x) - got) == 0


@settings(max_examples=80, deadline=None)
@given(small_upolys(), small_upolys())
def test_pseudo_divmod_identity(a, b):
    if b.is_zero:
        return
    q, r = a.pseudo_divmod(b)
    d = max(a.degree() - b.degree() + 1, 0)
    assert a * (b.lc() ** d) == q * b + r
    assert r.degree() < b.degree()


@settings(max_examples=60, deadline=None)
@given(small_upolys(), small_upolys(), small_upolys())
def test_gcd_divides_and_catches_common_factor(a, b, c):
    if c.degree() < 1:
        return
    g = upoly_gcd(a * c, b * c)
    # c divides the gcd
    assert upoly_resultant(g, c) == 0 or g.pseudo_rem(c).is_zero or c.pseudo_rem(g).is_zero
    if not (a * c).is_zero:
        assert (a * c).pseudo_rem(g).is_zero
    if not (b * c).is_zero:
        assert (b * c).pseudo_rem(g).is_zero


def test_gcd_known_value():
    a = UPoly([-1, 0, 1]) * UPoly([2, 3])
    b = UPoly([-1, 1]) * UPoly([2, 3])
    assert upoly_gcd(a, b) == UPoly([-2, -1, 3])


@settings(max_examples=60, deadline=None)
@given(small_upolys())
def test_squarefree_part_is_squarefree(p):
    if p.is_zero:
        return
    s = squarefree_part(p)
    assert is_squarefree(s)
    # same root set: s divides p and p divides a power of s
    assert p.pseudo_rem(s).is_zero


def test_squarefree_known():
    p = UPoly([-1, 1]) ** 3 * UPoly([1, 1])
    assert squarefree_part(p) == UPoly([-1, 0, 1])


@settings(max_examples=80, deadline=None)
@given(small_upolys())
def test_graeffe_identity(p):
    # g(T^2) == +/- p(T) * p(-T), same degree, positive leading coefficient
    g = graeffe(p)
    if p.is_zero:
        assert g.is_zero
        return
    assert g.degree() == p.degree()
    assert g.lc() > 0
    gsq = UPoly([c if i % 2 == 0 else 0 for i, cs in enumerate(g.coeffs) for c in [cs]])
    # compose g(T^2) directly
    comp = [0] * (2 * len(g.coeffs) - 1) if g.coeffs else []
    for i, c in enumerate(g.coeffs):
        comp[2 * i] = c
    comp = UPoly(comp)
    pm = UPoly([c if i % 2 == 0 else -c for i, c in enumerate(p.coeffs)])
    prod = p * pm
    assert comp == prod or comp == -prod


@settings(max_examples=50, deadline=None)
@given(small_upolys(), small_upolys())
def test_upoly_resultant_matches_sylvester(a, b):
    if a.is_zero or b.is_zero:
        return
    assert upoly_resultant(a, b) == sylvester_resultant(a, b)


def test_resultant_shared_root_is_zero():
    common = UPoly([-3, 1])
    assert upoly_resultant(common * UPoly([1, 1]), common * UPoly([7, 2])) == 0


def test_bivariate_resultant_matches_sympy():
    a = parse_mpoly("3*x^2*y - x + y^2 - 2")
    b = parse_mpoly("x^3 + 2*x*y - 5")
    x, y = sp.symbols("x y")
    want = sp.Poly(sp.resultant(3 * x**2 * y - x + y**2 - 2, x**3 + 2 * x * y - 5, x), y)
    got = resultant(a, b, "x")
    assert list(got.coeffs) == list(reversed([int(c) for c in want.all_coeffs()]))


def test_bivariate_resultant_eliminates_named_variable():
    a = parse_mpoly("x^2 + y^2 - 1")
    b = parse_mpoly("x - y")
    assert resultant(a, b, "x") == UPoly([-1, 0, 2])
    assert resultant(a, b, "y") == UPoly([-1, 0, 2])


# -- multivariate gcd / RatFun ----------------------------------------------


@settings(max_examples=30, deadline=None)
@given(small_mpolys(), small_mpolys(), small_mpolys())
def test_mpoly_gcd_divides(p, q, c):
    g = mpoly_gcd(p * c, q * c)
    if (p * c).is_zero and (q * c).is_zero:
        return
    assert mpoly_divexact(p * c, g) * g == p * c
    assert mpoly_divexact(q * c, g) * g == q * c


def test_ratfun_equality_cross_multiplies():
    assert parse_ratfun("(2-2*x)/(2-2*y)") == parse_ratfun("(1-x)/(1-y)")


# -- serialization -----------------------------------------------------------


def test_int_json_roundtrip():
    for v in [0, 1, -1, 2**52, 2**53, -(2**80), 10**30]:
        assert int_from_json(int_to_json(v)) == v
    assert isinstance(int_to_json(2**60), str)
    assert isinstance(int_to_json(12), int)


def test_upoly_json_roundtrip():
    p = UPoly([1, -(2**70), 0, 5])
    assert UPoly.from_json(p.to_json()) == p


def test_str_forms():
    assert str(parse_mpoly("x^2 - y + 3")) == "x^2 - y + 3"
    assert UPoly([-1, -2, 1]).to_str("u") == "u^2 - 2*u - 1"
    assert str(UPoly([])) == "0"
