from fractions import Fraction

import sympy as sp

from diagasym.oracle import (
    CLOSED_FORMS,
    closed_form_terms,
    diagonal_terms,
    heuristic_nonnegative,
)
from diagasym.polycore import parse_ratfun


def sympy_diagonal(fstr, K, names):
    """Independent series oracle: truncated geometric inversion of 1/H in sympy."""
    syms = sp.symbols(names)
    f = sp.together(sp.sympify(fstr.replace("^", "**")))
    gs, hs = sp.fraction(f)
    pg = sp.Poly(gs, *syms, domain="QQ")
    ph = sp.Poly(hs, *syms, domain="QQ")
    h0 = ph.coeff_monomial(sp.Integer(1))

    def trunc(p):
        d = {m: c for m, c in p.terms() if all(e <= K for e in m)}
        return sp.Poly(d, *syms, domain="QQ")

    m = trunc(sp.Poly(1, *syms, domain="QQ") - ph * sp.Rational(1, 1) / h0)
    acc = sp.Poly(0, *syms, domain="QQ")
    term = sp.Poly(1, *syms, domain="QQ")
    for _ in range(len(names) * K + 1):
        acc = acc + term
        term = trunc(term * m)
    full = trunc(acc * pg).mul_ground(sp.Rational(1, 1) / h0)
    return [full.coeff_monomial(sp.prod([s**k for s in syms])) for k in range(K + 1)]


def test_central_binomial_series():
    F = parse_ratfun("1/(1-x-y)")
    s = diagonal_terms(F, 12)
    assert s.terms == [CLOSED_FORMS["central_binomial"](k) for k in range(13)]


def test_series_matches_sympy_on_awkward_input():
    # numerator, mixed signs, and a non-unit constant coefficient
    fstr = "(2+x)/(2-2*x-y+x*y^2)"
    F = parse_ratfun(fstr, vars=("x", "y"))
    s = diagonal_terms(F, 8)
    want = sympy_diagonal(fstr, 8, ("x", "y"))
    for mine, theirs in zip(s.terms, want):
        m = mine if isinstance(mine, Fraction) else Fraction(mine)
        assert Fraction(str(theirs)) == m


def test_apery_zeta3_diagonal():
    # 4-variable fixture whose diagonal is the classical zeta(3) sequence
    F = parse_ratfun(
        "1/(1 - z*(1+a)*(1+b)*(1+c)*(1 + b + c + b*c + a*b*c))",
        vars=("a", "b", "c", "z"),
    )
    s = diagonal_terms(F, 6)
    assert s.terms == [1, 5, 73, 1445, 33001, 819005, 21460825]
    assert s.terms == [CLOSED_FORMS["apery_zeta3"](k) for k in range(7)]


def test_apery_zeta2_diagonal():
    F = parse_ratfun("1/(1 - x - y - z*(1-x)*(1-y))", vars=("x", "y", "z"))
    s = diagonal_terms(F, 8)
    assert s.terms[:5] == [1, 3, 19, 147, 1251]
    assert s.terms == [CLOSED_FORMS["apery_zeta2"](k) for k in range(9)]


def test_signed_factorial_cube_diagonal():
    F = parse_ratfun("1/(1 - x*(1-y)*(1-z)*(1-y*z))", vars=("x", "y", "z"))
    s = diagonal_terms(F, 9)
    assert s.terms == [CLOSED_FORMS["signed_factorial_cube"](k) for k in range(10)]
    # parity structure: odd entries vanish, even entries alternate in sign
    assert s.terms[1] == s.terms[3] == s.terms[5] == 0
    assert s.terms[2] < 0 < s.terms[4]


def test_closed_form_values_are_frozen():
    assert closed_form_terms("central_binomial", 4).terms == [1, 2, 6, 20, 70]
    assert closed_form_terms("apery_zeta2", 3).terms == [1, 3, 19, 147]
    assert closed_form_terms("signed_factorial_cube", 6).terms == [1, 0, -6, 0, 90, 0, -1680]


def test_rational_coefficient_series():
    # constant term of the denominator is 8, so intermediate terms leave Z
    F = parse_ratfun("8/(8 - 8*x - 8*y - 8*z + 81*x*y*z)", vars=("x", "y", "z"))
    s = diagonal_terms(F, 6)
    want = sympy_diagonal("8/(8 - 8*x - 8*y - 8*z + 81*x*y*z)", 6, ("x", "y", "z"))
    for mine, theirs in zip(s.terms, want):
        m = mine if isinstance(mine, Fraction) else Fraction(mine)
        assert Fraction(str(theirs)) == m


def test_heuristic_nonnegative():
    assert heuristic_nonnegative(parse_ratfun("1/(1-x-y)"))
    assert not heuristic_nonnegative(
        parse_ratfun("1/(1 - x*(1-y)*(1-z)*(1-y*z))", vars=("x", "y", "z"))
    )


def test_box_guard():
    import pytest

    F = parse_ratfun("1/(1-a-b-c-d)", vars=("a", "b", "c", "d"))
    with pytest.raises(ValueError):
        diagonal_terms(F, 300)
