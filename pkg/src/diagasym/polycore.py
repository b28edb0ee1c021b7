"""Exact polynomial cores.

Multivariate polynomials over the integers (MPoly), dense univariate
polynomials over the integers (UPoly), reduced rational functions (RatFun),
a strict expression parser, and the exact algebra the rest of the engine
leans on: pseudo-remainder sequences, subresultant resultants, primitive
gcds, square-free parts, the Graeffe root-squaring step, coordinate
dilation and real/imaginary splitting.

Everything in this module is exact integer / rational arithmetic.  No
floating point enters here.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence


class PolyError(Exception):
    """Base class for errors raised by the polynomial layer."""


class ParseError(PolyError):
    """Raised when an input expression does not match the grammar."""

    def __init__(self, message: str, pos: int = -1):
        self.pos = pos
        if pos >= 0:
            message = f"{message} (at position {pos})"
        super().__init__(message)


class SingularOrigin(PolyError):
    """Raised when a rational function's denominator vanishes at 0."""


# ---------------------------------------------------------------------------
# integer helpers


def _igcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def int_to_json(v: int):
    """Integers that fit a double stay numbers, the rest become strings."""
    return v if -(2**53) < v < 2**53 else str(v)


def int_from_json(v) -> int:
    if isinstance(v, bool):
        raise ValueError("expected an integer, got a bool")
    if isinstance(v, int):
        return v
    if isinstance(v, str):
        return int(v, 10)
    raise ValueError(f"expected an integer or decimal string, got {v!r}")


def height_bits(m: int) -> int:
    """max(0, ceil(log2 m)) for m >= 1; 0 for m in {0, 1}."""
    m = abs(m)
    return 0 if m <= 1 else (m - 1).bit_length()


# ---------------------------------------------------------------------------
# multivariate polynomials


def _grlex_key(exps: tuple) -> tuple:
    return (sum(exps), exps)


class MPoly:
    """Multivariate polynomial with integer coefficients.

    `vars` is the ordered tuple of variable names; `terms` maps exponent
    tuples (one entry per variable) to nonzero integer coefficients.
    Instances are treated as immutable.
    """

    __slots__ = ("vars", "terms")

    def __init__(self, vars: Sequence[str], terms: Mapping[tuple, int]):
        vs = tuple(vars)
        nv = len(vs)
        clean = {}
        for e, c in terms.items():
            if c == 0:
                continue
            e = tuple(e)
            if len(e) != nv or any(x < 0 for x in e):
                raise ValueError(f"bad exponent tuple {e} for {nv} variables")
            clean[e] = clean.get(e, 0) + c
        # store in descending graded-lex order so iteration is canonical
        object.__setattr__(self, "vars", vs)
        object.__setattr__(
            self,
            "terms",
            {e: clean[e] for e in sorted(clean, key=_grlex_key, reverse=True) if clean[e] != 0},
        )

    def __setattr__(self, *a):
        raise AttributeError("MPoly is immutable")

    # -- constructors

    @staticmethod
    def const(c: int, vars: Sequence[str] = ()) -> "MPoly":
        vs = tuple(vars)
        return MPoly(vs, {(0,) * len(vs): c} if c else {})

    @staticmethod
    def var(name: str, vars: Sequence[str] | None = None) -> "MPoly":
        vs = tuple(vars) if vars is not None else (name,)
        if name not in vs:
            raise ValueError(f"variable {name!r} not among {vs}")
        e = tuple(1 if v == name else 0 for v in vs)
        return MPoly(vs, {e: 1})

    # -- basic queries

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Maximal total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, var: str) -> int:
        i = self.vars.index(var)
        return max((e[i] for e in self.terms), default=-1)

    def multidegree(self) -> tuple:
        """Per-variable maximal exponent (all zeros for the zero poly)."""
        md = [0] * len(self.vars)
        for e in self.terms:
            for i, x in enumerate(e):
                if x > md[i]:
                    md[i] = x
        return tuple(md)

    def height(self) -> int:
        return height_bits(max((abs(c) for c in self.terms.values()), default=0))

    def constant_term(self) -> int:
        return self.terms.get((0,) * len(self.vars), 0)

    def is_constant(self) -> bool:
        return self.degree() <= 0

    def content(self) -> int:
        g = 0
        for c in self.terms.values():
            g = _igcd(g, c)
            if g == 1:
                return 1
        return g

    # -- variable bookkeeping

    def with_vars(self, newvars: Sequence[str]) -> "MPoly":
        """Reindex onto a superset (or reordering) of the current variables."""
        nvs = tuple(newvars)
        pos = []
        for v in self.vars:
            if v not in nvs:
                raise ValueError(f"variable {v!r} missing from {nvs}")
            pos.append(nvs.index(v))
        nt = {}
        for e, c in self.terms.items():
            ne = [0] * len(nvs)
            for p, x in zip(pos, e):
                ne[p] = x
            nt[tuple(ne)] = c
        return MPoly(nvs, nt)

    def rename_vars(self, mapping: Mapping[str, str]) -> "MPoly":
        return MPoly(tuple(mapping.get(v, v) for v in self.vars), self.terms)

    @staticmethod
    def _aligned(p: "MPoly", q: "MPoly"):
        if p.vars == q.vars:
            return p, q
        merged = list(p.vars)
        for v in q.vars:
            if v not in merged:
                merged.append(v)
        return p.with_vars(merged), q.with_vars(merged)

    # -- arithmetic

    def __add__(self, other):
        if isinstance(other, int):
            other = MPoly.const(other, self.vars)
        if not isinstance(other, MPoly):
            return NotImplemented
        a, b = MPoly._aligned(self, other)
        t = dict(a.terms)
        for e, c in b.terms.items():
            t[e] = t.get(e, 0) + c
        return MPoly(a.vars, t)

    __radd__ = __add__

    def __neg__(self):
        return MPoly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, int):
            other = MPoly.const(other, self.vars)
        if not isinstance(other, MPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 0:
                return MPoly.const(0, self.vars)
            return MPoly(self.vars, {e: c * other for e, c in self.terms.items()})
        if not isinstance(other, MPoly):
            return NotImplemented
        a, b = MPoly._aligned(self, other)
        t: dict = {}
        bi = list(b.terms.items())
        for ea, ca in a.terms.items():
            for eb, cb in bi:
                e = tuple(x + y for x, y in zip(ea, eb))
                t[e] = t.get(e, 0) + ca * cb
        return MPoly(a.vars, t)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = MPoly.const(1, self.vars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            return self.is_constant() and self.constant_term() == other
        if not isinstance(other, MPoly):
            return NotImplemented
        a, b = MPoly._aligned(self, other)
        return a.terms == b.terms

    def __hash__(self):
        return hash((self.vars, tuple(self.terms.items())))

    # -- calculus / structural ops

    def partial(self, var: str) -> "MPoly":
        i = self.vars.index(var)
        t = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                continue
            ne = e[:i] + (e[i] - 1,) + e[i + 1:]
            t[ne] = t.get(ne, 0) + c * e[i]
        return MPoly(self.vars, t)

    def dilate(self, factor_var: str) -> "MPoly":
        """Scale every variable by a fresh variable: p(t*z1, ..., t*zn).

        The factor variable is appended to the variable order; each term
        picks up the factor raised to its total degree.
        """
        if factor_var in self.vars:
            raise ValueError(f"{factor_var!r} already occurs in the polynomial")
        nvs = self.vars + (factor_var,)
        return MPoly(nvs, {e + (sum(e),): c for e, c in self.terms.items()})

    def evaluate(self, subs: Mapping[str, Any]):
        """Evaluate with values from any commutative ring (int, Fraction, balls...)."""
        missing = [v for v in self.vars if v not in subs]
        if missing:
            raise ValueError(f"missing values for {missing}")
        vals = [subs[v] for v in self.vars]
        total = None
        for e, c in self.terms.items():
            prod = c
            for val, x in zip(vals, e):
                if x:
                    prod = prod * (val ** x)
            total = prod if total is None else total + prod
        return 0 if total is None else total

    def as_upoly(self) -> "UPoly":
        """View a polynomial in at most one effective variable as a UPoly."""
        live = [i for i, v in enumerate(self.vars) if self.degree_in(v) > 0]
        if len(live) > 1:
            raise ValueError("polynomial has more than one effective variable")
        if not live:
            return UPoly([self.constant_term()])
        i = live[0]
        coeffs = [0] * (max(e[i] for e in self.terms) + 1)
        for e, c in self.terms.items():
            coeffs[e[i]] += c
        return UPoly(coeffs)

    # -- printing

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms.items():
            factors = []
            for v, x in zip(self.vars, e):
                if x == 1:
                    factors.append(v)
                elif x > 1:
                    factors.append(f"{v}^{x}")
            if not factors:
                mono = str(abs(c))
            elif abs(c) == 1:
                mono = "*".join(factors)
            else:
                mono = "*".join([str(abs(c))] + factors)
            parts.append(("-" if c < 0 else "+", mono))
        sign, mono = parts[0]
        out = ("-" if sign == "-" else "") + mono
        for sign, mono in parts[1:]:
            out += f" {sign} {mono}"
        return out

    def __repr__(self):
        return f"MPoly({', '.join(self.vars)}: {self})"


def real_imag_split(p: MPoly, re_names: Sequence[str], im_names: Sequence[str]):
    """Substitute var_j -> re_j + i*im_j and split into (real, imaginary) parts.

    Exact Gaussian-integer bookkeeping: the result pair satisfies
    p(a + i*b) = real(a, b) + i * imag(a, b) identically.
    """
    if len(re_names) != len(p.vars) or len(im_names) != len(p.vars):
        raise ValueError("need one (re, im) name pair per variable")
    nvs = tuple(re_names) + tuple(im_names)
    if len(set(nvs)) != len(nvs):
        raise ValueError("split variable names must be distinct")
    zero = MPoly.const(0, nvs)
    subs = {}
    for j, v in enumerate(p.vars):
        subs[v] = (MPoly.var(re_names[j], nvs), MPoly.var(im_names[j], nvs))

    def cmul(a, b):
        return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])

    total = (zero, zero)
    for e, c in p.terms.items():
        prod = (MPoly.const(c, nvs), zero)
        for v, x in zip(p.vars, e):
            base = subs[v]
            k = x
            while k:
                if k & 1:
                    prod = cmul(prod, base)
                k >>= 1
                if k:
                    base = cmul(base, base)
        total = (total[0] + prod[0], total[1] + prod[1])
    return total


# ---------------------------------------------------------------------------
# univariate polynomials


class UPoly:
    """Dense univariate polynomial over the integers, coefficients low-first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[int]):
        cs = list(coeffs)
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, *a):
        raise AttributeError("UPoly is immutable")

    # -- queries

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def lc(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def height(self) -> int:
        return height_bits(max((abs(c) for c in self.coeffs), default=0))

    def max_abs_coeff(self) -> int:
        return max((abs(c) for c in self.coeffs), default=0)

    def content(self) -> int:
        g = 0
        for c in self.coeffs:
            g = _igcd(g, c)
            if g == 1:
                return 1
        return g

    def primitive(self) -> "UPoly":
        g = self.content()
        if g <= 1:
            return self
        return UPoly([c // g for c in self.coeffs])

    # -- arithmetic

    def __add__(self, other):
        if isinstance(other, int):
            other = UPoly([other])
        if not isinstance(other, UPoly):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return UPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return UPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        if isinstance(other, int):
            other = UPoly([other])
        if not isinstance(other, UPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return UPoly([c * other for c in self.coeffs]) if other else UPoly([])
        if not isinstance(other, UPoly):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return UPoly([])
        out = [0] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca:
                for j, cb in enumerate(b):
                    out[i + j] += ca * cb
        return UPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = UPoly([1])
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            return self.coeffs == ((other,) if other else ())
        if not isinstance(other, UPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def shift_exp(self, k: int) -> "UPoly":
        """Multiply by x^k."""
        if self.is_zero:
            return self
        return UPoly([0] * k + list(self.coeffs))

    def derivative(self) -> "UPoly":
        return UPoly([i * c for i, c in enumerate(self.coeffs)][1:])

    def evaluate(self, x):
        """Horner evaluation; works for ints, Fractions, floats, balls."""
        total = None
        for c in reversed(self.coeffs):
            total = c if total is None else total * x + c
        return 0 if total is None else total

    def reversed_coeffs(self) -> "UPoly":
        """x^deg * p(1/x)."""
        return UPoly(list(reversed(self.coeffs)))

    # -- division

    def divexact(self, other: "UPoly") -> "UPoly":
        """Exact division over the integers; raises if not exact."""
        q, r = _divmod_int(self.coeffs, other.coeffs)
        if r is None or any(r):
            raise ValueError("division is not exact over the integers")
        return UPoly(q)

    def pseudo_divmod(self, other: "UPoly"):
        """Pseudo quotient/remainder: lc(other)^(deg diff + 1) * self = q*other + r."""
        if other.is_zero:
            raise ZeroDivisionError("pseudo-division by zero")
        a = list(self.coeffs)
        b = other.coeffs
        db = len(b) - 1
        da = len(a) - 1
        if da < db:
            return UPoly([]), self
        lb = b[-1]
        q = [0] * (da - db + 1)
        for k in range(da - db, -1, -1):
            c = a[db + k]
            for i in range(len(a)):
                a[i] *= lb
            for i in range(len(q)):
                q[i] *= lb
            q[k] += c
            if c:
                for i in range(db + 1):
                    a[i + k] -= c * b[i]
        return UPoly(q), UPoly(a[:db])

    def pseudo_rem(self, other: "UPoly") -> "UPoly":
        return self.pseudo_divmod(other)[1]

    # -- printing / serialization

    def __str__(self, varname: str = "u"):
        return self.to_str(varname)

    def to_str(self, varname: str = "u") -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            if i == 0:
                mono = str(abs(c))
            elif abs(c) == 1:
                mono = varname if i == 1 else f"{varname}^{i}"
            else:
                mono = f"{abs(c)}*{varname}" if i == 1 else f"{abs(c)}*{varname}^{i}"
            parts.append(("-" if c < 0 else "+", mono))
        sign, mono = parts[0]
        out = ("-" if sign == "-" else "") + mono
        for sign, mono in parts[1:]:
            out += f" {sign} {mono}"
        return out

    def __repr__(self):
        return f"UPoly({self})"

    def to_json(self) -> list:
        return [int_to_json(c) for c in self.coeffs]

    @staticmethod
    def from_json(data) -> "UPoly":
        return UPoly([int_from_json(c) for c in data])


def _divmod_int(a: Sequence[int], b: Sequence[int]):
    """Long division over Z; returns (quotient, remainder) coefficient lists,
    or (None, None) when some coefficient division fails."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    db = len(b) - 1
    lb = b[-1]
    if len(a) - 1 < db:
        return [], a
    q = [0] * (len(a) - db)
    for k in range(len(a) - 1 - db, -1, -1):
        c = a[db + k]
        if c % lb:
            return None, None
        c //= lb
        q[k] = c
        if c:
            for i in range(db + 1):
                a[i + k] -= c * b[i]
    return q, a[:db]


def upoly_divmod_frac(a: UPoly, b: UPoly):
    """Division over Q, returning Fraction-coefficient lists (quot, rem)."""
    if b.is_zero:
        raise ZeroDivisionError("polynomial division by zero")
    ac = [Fraction(c) for c in a.coeffs]
    bc = [Fraction(c) for c in b.coeffs]
    db = len(bc) - 1
    lb = bc[-1]
    if len(ac) - 1 < db:
        return [], ac
    q = [Fraction(0)] * (len(ac) - db)
    for k in range(len(ac) - 1 - db, -1, -1):
        c = ac[db + k] / lb
        q[k] = c
        if c:
            for i in range(db + 1):
                ac[i + k] -= c * bc[i]
    rem = ac[:db]
    while rem and rem[-1] == 0:
        rem.pop()
    return q, rem


def upoly_gcd(a: UPoly, b: UPoly) -> UPoly:
    """Primitive gcd over Z via a primitive pseudo-remainder sequence.

    The result is primitive with a positive leading coefficient, scaled by
    the gcd of the contents.
    """
    if a.is_zero:
        g = b.primitive()
    elif b.is_zero:
        g = a.primitive()
    else:
        ca, cb = a.content(), b.content()
        p, q = a.primitive(), b.primitive()
        if p.degree() < q.degree():
            p, q = q, p
        while not q.is_zero:
            r = p.pseudo_rem(q).primitive()
            p, q = q, r
        g = p.primitive() * _igcd(ca, cb)
    if g.lc() < 0:
        g = -g
    return g


def squarefree_part(p: UPoly) -> UPoly:
    """Primitive square-free part, positive leading coefficient."""
    if p.is_zero:
        return p
    if p.degree() == 0:
        return UPoly([1])
    g = upoly_gcd(p, p.derivative())
    if g.degree() == 0:
        out = p.primitive()
    else:
        num = p * g.lc() ** (p.degree() - g.degree() + 1)
        q, r = _divmod_int(num.coeffs, g.coeffs)
        if q is None or any(r):
            # fall back to rational division (always exact here)
            qf, rf = upoly_divmod_frac(p, g)
            assert not rf, "square-free division must be exact"
            den_lcm = 1
            for c in qf:
                den_lcm = den_lcm * c.denominator // _igcd(den_lcm, c.denominator)
            out = UPoly([int(c * den_lcm) for c in qf])
        else:
            out = UPoly(q)
        out = out.primitive()
    if out.lc() < 0:
        out = -out
    return out


def is_squarefree(p: UPoly) -> bool:
    return (not p.is_zero) and (p.degree() == 0 or upoly_gcd(p, p.derivative()).degree() == 0)


def graeffe(p: UPoly) -> UPoly:
    """One root-squaring step: returns g with g(T^2) = +/- p(T) p(-T),
    same degree as p, normalized to a positive leading coefficient.

    The roots of g are exactly the squares of the roots of p.
    """
    if p.is_zero:
        return p
    even = UPoly(list(p.coeffs[0::2]))
    odd = UPoly(list(p.coeffs[1::2]))
    g = even * even - (odd * odd).shift_exp(1)
    if g.lc() < 0:
        g = -g
    return g


def upoly_compose(p: UPoly, q: UPoly) -> UPoly:
    """p(q(x)) by Horner on polynomial coefficients."""
    total = UPoly([])
    for c in reversed(p.coeffs):
        total = total * q + c
    return total


# ---------------------------------------------------------------------------
# resultants (subresultant pseudo-remainder sequences)
#
# The recursion below follows the classical exact-division resultant over an
# integral domain: with r = prem(f, g), delta = deg f - deg g + 1,
#
#   res(f, g) = (-1)^(deg f * deg g) * res(g, r) / lc(g)^(delta*deg g - deg f + deg r)
#
# where the division is exact.  Integer content is stripped from remainders
# to keep growth polynomial, with the matching correction res(g, c*rbar) =
# c^(deg g) * res(g, rbar).


def _res_generic(f, g, deg, prem, mul, power, divexact, content_split, is_zero, one):
    sign = 1
    num = [one]
    den = [one]
    while True:
        m, n = deg(f), deg(g)
        if n < 0:
            return None  # common factor: resultant is zero
        if m < n:
            if (m * n) & 1:
                sign = -sign
            f, g = g, f
            continue
        if n == 0:
            num.append(power(_lc_of(g, deg), m))
            break
        r = prem(f, g)
        if is_zero(r):
            return None
        c, rbar = content_split(r)
        s = deg(rbar)
        l = _lc_of(g, deg)
        if (m * n) & 1:
            sign = -sign
        # res(f,g) = sign * c^n * res(g, rbar) / l^((m-n+1)*n - m + s + c-part)
        num.append(power(c, n))
        den.append(power(l, (m - n + 1) * n - m + s))
        f, g = g, rbar
    acc_num = one
    for x in num:
        acc_num = mul(acc_num, x)
    acc_den = one
    for x in den:
        acc_den = mul(acc_den, x)
    out = divexact(acc_num, acc_den)
    return mul(out, sign) if sign < 0 else out


def _lc_of(p, deg):
    if isinstance(p, UPoly):
        return p.lc()
    return p[deg(p)]


def upoly_resultant(a: UPoly, b: UPoly) -> int:
    """Resultant of two integer polynomials (0 if they share a factor)."""
    if a.is_zero or b.is_zero:
        return 0

    def content_split(p: UPoly):
        c = p.content()
        return c, (p if c <= 1 else UPoly([x // c for x in p.coeffs]))

    out = _res_generic(
        a,
        b,
        deg=lambda p: p.degree(),
        prem=lambda p, q: p.pseudo_rem(q),
        mul=lambda x, y: x * y,
        power=lambda x, k: x**k,
        divexact=_int_divexact,
        content_split=content_split,
        is_zero=lambda p: p.is_zero,
        one=1,
    )
    return 0 if out is None else out


def _int_divexact(a: int, b: int) -> int:
    q, r = divmod(a, b)
    if r:
        raise ValueError("resultant bookkeeping division was not exact")
    return q


# bivariate layer: a polynomial in (main, T) is a list of UPoly (T-coefficients)
# indexed by the power of the eliminated main variable.


def _bp_norm(p: list) -> list:
    while p and p[-1].is_zero:
        p.pop()
    return p


def _bp_deg(p: list) -> int:
    return len(p) - 1


def _bp_is_zero(p: list) -> bool:
    return not p


def _bp_mul_scalar(p: list, s: UPoly) -> list:
    return _bp_norm([c * s for c in p])


def _bp_sub(p: list, q: list) -> list:
    out = [UPoly([]) for _ in range(max(len(p), len(q)))]
    for i, c in enumerate(p):
        out[i] = out[i] + c
    for i, c in enumerate(q):
        out[i] = out[i] - c
    return _bp_norm(out)


def _bp_prem(a: list, b: list) -> list:
    da, db = _bp_deg(a), _bp_deg(b)
    lb = b[-1]
    r = list(a)
    for k in range(da - db, -1, -1):
        c = r[db + k] if db + k < len(r) else UPoly([])
        r = [x * lb for x in r]
        if not c.is_zero:
            for i in range(db + 1):
                r[i + k] = r[i + k] - c * b[i]
    return _bp_norm(r[:db] if db > 0 else [])


def _upoly_content_of_list(p: list) -> int:
    g = 0
    for c in p:
        for x in c.coeffs:
            g = _igcd(g, x)
            if g == 1:
                return 1
    return g


def resultant(p: MPoly, q: MPoly, elim_var: str) -> UPoly:
    """Resultant of two polynomials in at most two variables, eliminating
    `elim_var`; the result is univariate in the remaining variable.

    Computed by an exact subresultant pseudo-remainder sequence over Z[T].
    """
    pv = [v for v in p.vars if p.degree_in(v) > 0]
    qv = [v for v in q.vars if q.degree_in(v) > 0]
    others = sorted(set(pv + qv) - {elim_var})
    if len(others) > 1:
        raise ValueError(f"resultant needs at most two variables, got {sorted(set(pv + qv))}")
    keep = others[0] if others else None

    def to_bp(f: MPoly) -> list:
        if elim_var in f.vars:
            ei = f.vars.index(elim_var)
        else:
            ei = None
        ki = f.vars.index(keep) if keep is not None and keep in f.vars else None
        dm = max((e[ei] for e in f.terms), default=0) if ei is not None else 0
        rows: list = [dict() for _ in range(dm + 1)]
        for e, c in f.terms.items():
            i = e[ei] if ei is not None else 0
            j = e[ki] if ki is not None else 0
            rows[i][j] = rows[i].get(j, 0) + c
        out = []
        for row in rows:
            if row:
                deg = max(row)
                out.append(UPoly([row.get(k, 0) for k in range(deg + 1)]))
            else:
                out.append(UPoly([]))
        return _bp_norm(out)

    A, B = to_bp(p), to_bp(q)
    if _bp_is_zero(A) or _bp_is_zero(B):
        return UPoly([])
    if _bp_deg(A) == 0 and _bp_deg(B) == 0:
        return UPoly([1])
    if _bp_deg(A) == 0:
        return A[0] ** _bp_deg(B)
    if _bp_deg(B) == 0:
        return B[0] ** _bp_deg(A)

    def content_split(r: list):
        c = _upoly_content_of_list(r)
        if c <= 1:
            return UPoly([1]), r
        return UPoly([c]), [UPoly([x // c for x in u.coeffs]) for u in r]

    def upower(x: UPoly, k: int) -> UPoly:
        return x**k

    def udivexact(a: UPoly, b: UPoly) -> UPoly:
        if b.degree() == 0:
            lc = b.coeffs[0]
            if lc in (1, -1):
                return a * lc
            out = []
            for c in a.coeffs:
                qq, rr = divmod(c, lc)
                if rr:
                    raise ValueError("resultant bookkeeping division was not exact")
                out.append(qq)
            return UPoly(out)
        return a.divexact(b)

    out = _res_generic(
        A,
        B,
        deg=_bp_deg,
        prem=_bp_prem,
        mul=lambda x, y: (x * y) if isinstance(y, (UPoly, int)) else x * y,
        power=upower,
        divexact=udivexact,
        content_split=content_split,
        is_zero=_bp_is_zero,
        one=UPoly([1]),
    )
    return UPoly([]) if out is None else out


# ---------------------------------------------------------------------------
# multivariate gcd (recursive primitive PRS; used to reduce rational functions)


def mpoly_gcd(p: MPoly, q: MPoly) -> MPoly:
    """Gcd over Z, computed by recursive primitive pseudo-remainder sequences.

    Fine for the input sizes a rational-function front end sees; not meant
    for heavy elimination work.
    """
    a, b = MPoly._aligned(p, q)
    vs = a.vars
    if a.is_zero:
        return _gcd_sign_fix(b)
    if b.is_zero:
        return _gcd_sign_fix(a)
    live = [v for v in vs if a.degree_in(v) > 0 or b.degree_in(v) > 0]
    if not live:
        return MPoly.const(_igcd(a.constant_term(), b.constant_term()), vs)
    main = live[0]
    ca, pa = _mp_content_primitive(a, main)
    cb, pb = _mp_content_primitive(b, main)
    cont = mpoly_gcd(ca, cb)
    f, g = pa, pb
    if f.degree_in(main) < g.degree_in(main):
        f, g = g, f
    while not g.is_zero:
        r = _mp_prem(f, g, main)
        if not r.is_zero:
            r = _mp_content_primitive(r, main)[1]
        f, g = g, r
    f = _mp_content_primitive(f, main)[1]
    return _gcd_sign_fix(cont * f)


def _gcd_sign_fix(p: MPoly) -> MPoly:
    if p.terms and next(iter(p.terms.values())) < 0:
        return -p
    return p


def _mp_coeffs_in(p: MPoly, main: str):
    i = p.vars.index(main)
    d = p.degree_in(main)
    rows = [dict() for _ in range(d + 1)]
    for e, c in p.terms.items():
        re = e[:i] + (0,) + e[i + 1:]
        rows[e[i]][re] = c
    return [MPoly(p.vars, r) for r in rows]


def _mp_content_primitive(p: MPoly, main: str):
    coeffs = _mp_coeffs_in(p, main)
    cont = MPoly.const(0, p.vars)
    for c in coeffs:
        cont = mpoly_gcd(cont, c)
        if cont.is_constant() and abs(cont.constant_term()) == 1:
            return MPoly.const(1, p.vars), p
    prim = mpoly_divexact(p, cont)
    return cont, prim


def _mp_prem(a: MPoly, b: MPoly, main: str) -> MPoly:
    i = a.vars.index(main)
    db = b.degree_in(main)
    bc = _mp_coeffs_in(b, main)
    lb = bc[-1]
    r = a
    while True:
        dr = r.degree_in(main)
        if dr < db or r.is_zero:
            return r
        rc = _mp_coeffs_in(r, main)
        lead = rc[-1]
        shift = {e[:i] + (e[i] + dr - db,) + e[i + 1:]: c for e, c in lead.terms.items()}
        r = r * lb - b * MPoly(a.vars, shift)


def mpoly_divexact(p: MPoly, d: MPoly) -> MPoly:
    """Exact multivariate division (raises if the division is not exact)."""
    a, b = MPoly._aligned(p, d)
    if b.is_zero:
        raise ZeroDivisionError("division by the zero polynomial")
    if a.is_zero:
        return a
    if b.is_constant():
        k = b.constant_term()
        t = {}
        for e, c in a.terms.items():
            q, r = divmod(c, k)
            if r:
                raise ValueError("division is not exact")
            t[e] = q
        return MPoly(a.vars, t)
    rem = a
    quot: dict = {}
    lmb, lcb = next(iter(b.terms.items())), None
    lmb, lcb = lmb[0], lmb[1]
    while not rem.is_zero:
        lma, lca = next(iter(rem.terms.items()))
        e = tuple(x - y for x, y in zip(lma, lmb))
        if any(x < 0 for x in e):
            raise ValueError("division is not exact")
        q, r = divmod(lca, lcb)
        if r:
            raise ValueError("division is not exact")
        quot[e] = quot.get(e, 0) + q
        rem = rem - b * MPoly(a.vars, {e: q})
    return MPoly(a.vars, quot)


# ---------------------------------------------------------------------------
# rational functions


class RatFun:
    """Rational function num/den over Z, reduced to lowest terms.

    The denominator must not vanish at the origin and is normalized to a
    positive constant term.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: MPoly, den: MPoly, reduce: bool = True):
        num, den = MPoly._aligned(num, den)
        if den.is_zero:
            raise ZeroDivisionError("zero denominator")
        if den.constant_term() == 0:
            raise SingularOrigin("denominator vanishes at the origin")
        if reduce and not num.is_zero:
            g = mpoly_gcd(num, den)
            if not (g.is_constant() and abs(g.constant_term()) == 1):
                num = mpoly_divexact(num, g)
                den = mpoly_divexact(den, g)
        if den.constant_term() < 0:
            num, den = -num, -den
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, *a):
        raise AttributeError("RatFun is immutable")

    @property
    def vars(self):
        return self.den.vars

    def __eq__(self, other):
        if not isinstance(other, RatFun):
            return NotImplemented
        return self.num * other.den == other.num * self.den

    def __str__(self):
        return f"({self.num}) / ({self.den})"

    def __repr__(self):
        return f"RatFun({self})"


# ---------------------------------------------------------------------------
# parsing
#
# Grammar (strict; no implicit multiplication):
#   expr   := term (('+' | '-') term)*
#   term   := factor (('*' | '/') factor)*      ('/' only for rational input)
#   factor := ('+' | '-')* base
#   base   := atom ('^' INT)*
#   atom   := INT | IDENT | '(' expr ')'
#   INT    := [0-9]+           IDENT := [a-zA-Z][a-zA-Z0-9_]*

_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([a-zA-Z][a-zA-Z0-9_]*)|([-+*/^()]))")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            tail = text[pos:].lstrip()
            if not tail:
                break
            raise ParseError(f"unexpected character {tail[0]!r}", pos + len(text[pos:]) - len(tail))
        if m.group(1) is not None:
            tokens.append(("INT", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(("IDENT", m.group(2), m.start(2)))
        else:
            tokens.append((m.group(3), m.group(3), m.start(3)))
        pos = m.end()
    tokens.append(("END", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, vars: Sequence[str] | None, allow_div: bool):
        self.tokens = _tokenize(text)
        self.i = 0
        self.allow_div = allow_div
        self.fixed_vars = tuple(vars) if vars is not None else None
        self.seen_vars: list = []

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, kind):
        t = self.next()
        if t[0] != kind:
            raise ParseError(f"expected {kind}, found {t[1]!r}", t[2])
        return t

    # every node is a pair (num: MPoly, den: MPoly); den is 1 for polynomials

    def parse(self):
        node = self.expr()
        t = self.peek()
        if t[0] != "END":
            raise ParseError(f"unexpected {t[1]!r}", t[2])
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.next()[0]
            rhs = self.term()
            a, b = node
            c, d = rhs
            node = (a * d + b * c, b * d) if op == "+" else (a * d - b * c, b * d)
        return node

    def term(self):
        node = self.factor()
        while self.peek()[0] in ("*", "/"):
            op, _, pos = self.next()
            rhs = self.factor()
            a, b = node
            c, d = rhs
            if op == "*":
                node = (a * c, b * d)
            else:
                if not self.allow_div:
                    raise ParseError("'/' is not allowed in a polynomial", pos)
                if c.is_zero:
                    raise ParseError("division by zero", pos)
                node = (a * d, b * c)
        return node

    def factor(self):
        sign = 1
        while self.peek()[0] in ("+", "-"):
            if self.next()[0] == "-":
                sign = -sign
        num, den = self.base()
        return (num * sign, den) if sign < 0 else (num, den)

    def base(self):
        node = self.atom()
        while self.peek()[0] == "^":
            self.next()
            t = self.next()
            if t[0] != "INT":
                raise ParseError("exponent must be a nonnegative integer literal", t[2])
            k = int(t[1])
            num, den = node
            node = (num**k, den**k)
        return node

    def atom(self):
        t = self.next()
        if t[0] == "INT":
            return MPoly.const(int(t[1])), MPoly.const(1)
        if t[0] == "IDENT":
            name = t[1]
            if self.fixed_vars is not None:
                if name not in self.fixed_vars:
                    raise ParseError(f"unknown variable {name!r}", t[2])
            elif name not in self.seen_vars:
                self.seen_vars.append(name)
            return MPoly(
                (name,),
                {(1,): 1},
            ), MPoly.const(1)
        if t[0] == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ParseError(f"unexpected {t[1]!r}" if t[0] != "END" else "unexpected end of input", t[2])


def _finalize_vars(parser: _Parser, *polys: MPoly):
    vs = parser.fixed_vars if parser.fixed_vars is not None else tuple(parser.seen_vars)
    return [p.with_vars(vs) if set(p.vars) <= set(vs) and p.vars != vs else p.with_vars(vs) for p in polys]


def parse_mpoly(text: str, vars: Sequence[str] | None = None) -> MPoly:
    """Parse a polynomial. Division is rejected; see the module grammar."""
    parser = _Parser(text, vars, allow_div=False)
    num, den = parser.parse()
    (num,) = _finalize_vars(parser, num)
    return num


def parse_ratfun(text: str, vars: Sequence[str] | None = None) -> RatFun:
    """Parse a rational function (the polynomial grammar plus '/'),
    reduced to lowest terms."""
    parser = _Parser(text, vars, allow_div=True)
    num, den = parser.parse()
    num, den = _finalize_vars(parser, num, den)
    return RatFun(num, den)
