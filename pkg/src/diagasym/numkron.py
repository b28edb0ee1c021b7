"""Certified numerics over Kronecker representations.

Exact dyadic midpoint-radius ball arithmetic drives root isolation and
refinement for the square-free minimal polynomial of a representation,
evaluation of parametrized values Q(u)/P'(u) with guaranteed error radii,
and decision procedures for equality, sign, interval membership, and
modulus grouping.  Decisions combine adaptive precision doubling with
explicit lower bounds (root separation, the minimum a nonzero integer
polynomial can take at an algebraic number, and so on), so refinement
either separates the quantities in question or drives a ball below the
bound that forces equality; every answer is certified, never heuristic.

Refinement of distinct roots is independent; NumericalKroneckerRep is an
immutable snapshot, and refining produces a new snapshot rather than
mutating a shared one.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt
from typing import Iterable, Sequence

from gmpy2 import mpq

from .kronecker import minimal_polynomial
from .polycore import PolyError, UPoly, graeffe, is_squarefree, squarefree_part

__all__ = [
    "Dyadic",
    "Ball",
    "IsolatedRoot",
    "NumericalKroneckerRep",
    "BoundSet",
    "ValueReport",
    "NotSquareFree",
    "HypothesisViolated",
    "isolate_roots",
    "refine",
    "numeric_rep",
    "eval_param",
    "group_by_value",
    "sign_at_roots",
    "group_by_modulus",
    "bounds",
    "pi_ball",
]


class NotSquareFree(PolyError):
    """Root isolation was asked for a polynomial with repeated roots."""


class HypothesisViolated(PolyError):
    """A queried modulus is provably not (up to sign) a root of the
    polynomial that was supposed to vanish at it."""


# ---------------------------------------------------------------------------
# dyadic rationals


def _ceil_log2(m: int) -> int:
    """Smallest e with m <= 2**e, for m >= 1."""
    return (m - 1).bit_length()


class Dyadic:
    """Exact binary rational man * 2**exp with odd (or zero) mantissa.

    Addition, subtraction and multiplication are exact; directed rounding
    is explicit via floor_to / ceil_to.  Exact halving is free (exponent
    decrement), which is why centers, radii and interval endpoints live in
    this type.
    """

    __slots__ = ("man", "exp")

    def __init__(self, man: int, exp: int = 0):
        if man == 0:
            exp = 0
        else:
            s = (man & -man).bit_length() - 1
            if s:
                man >>= s
                exp += s
        self.man = man
        self.exp = exp

    # -- queries

    def sign(self) -> int:
        return -1 if self.man < 0 else (1 if self.man > 0 else 0)

    def mag_exp(self) -> int:
        """e with 2**(e-1) <= |x| < 2**e; only for nonzero values."""
        return abs(self.man).bit_length() + self.exp

    def is_zero(self) -> bool:
        return self.man == 0

    # -- arithmetic (exact)

    def __neg__(self) -> "Dyadic":
        return Dyadic(-self.man, self.exp)

    def __abs__(self) -> "Dyadic":
        return Dyadic(abs(self.man), self.exp)

    def __add__(self, other: "Dyadic") -> "Dyadic":
        if self.man == 0:
            return other
        if other.man == 0:
            return self
        e = min(self.exp, other.exp)
        return Dyadic(
            (self.man << (self.exp - e)) + (other.man << (other.exp - e)), e
        )

    def __sub__(self, other: "Dyadic") -> "Dyadic":
        return self + (-other)

    def __mul__(self, other: "Dyadic") -> "Dyadic":
        if self.man == 0 or other.man == 0:
            return _ZERO
        return Dyadic(self.man * other.man, self.exp + other.exp)

    # -- comparison

    def cmp(self, other: "Dyadic") -> int:
        return (self - other).sign()

    def __lt__(self, other):
        return self.cmp(other) < 0

    def __le__(self, other):
        return self.cmp(other) <= 0

    def __gt__(self, other):
        return self.cmp(other) > 0

    def __ge__(self, other):
        return self.cmp(other) >= 0

    def __eq__(self, other):
        if not isinstance(other, Dyadic):
            return NotImplemented
        return self.man == other.man and self.exp == other.exp

    def __hash__(self):
        return hash((self.man, self.exp))

    # -- rounding

    def floor_to(self, prec: int) -> "Dyadic":
        """Largest dyadic <= self with a mantissa of at most prec bits."""
        bl = abs(self.man).bit_length()
        if bl <= prec:
            return self
        s = bl - prec
        return Dyadic(self.man >> s, self.exp + s)

    def ceil_to(self, prec: int) -> "Dyadic":
        """Smallest dyadic >= self with a mantissa of at most prec bits."""
        bl = abs(self.man).bit_length()
        if bl <= prec:
            return self
        s = bl - prec
        return Dyadic(-((-self.man) >> s), self.exp + s)

    # -- conversions

    def __float__(self) -> float:
        try:
            return self.man * 2.0 ** self.exp
        except OverflowError:
            r = self.floor_to(53)
            e = r.mag_exp()
            if e > 1024:
                return float("inf") if r.man > 0 else float("-inf")
            if e < -1070:
                return 0.0
            return r.man * 2.0 ** r.exp

    def to_fraction(self):
        from fractions import Fraction

        if self.exp >= 0:
            return Fraction(self.man << self.exp)
        return Fraction(self.man, 1 << -self.exp)

    def to_json(self) -> dict:
        return {"mantissa": str(self.man), "exp2": self.exp}

    @staticmethod
    def from_json(data) -> "Dyadic":
        return Dyadic(int(data["mantissa"]), int(data["exp2"]))

    def __repr__(self):
        return "Dyadic(%d, %d)" % (self.man, self.exp)

    def __str__(self):
        return "%.6g" % float(self)


_ZERO = Dyadic(0)
_ONE = Dyadic(1)


def _pow2(e: int) -> Dyadic:
    return Dyadic(1, e)


def _sqrt_up(x: Dyadic) -> Dyadic:
    """Dyadic upper bound for sqrt(x), x >= 0, accurate to ~32 bits."""
    if x.man == 0:
        return _ZERO
    x = x.ceil_to(128)
    man, exp = x.man, x.exp
    pad = 64 + (exp & 1)
    man <<= pad
    exp -= pad
    r = isqrt(man)
    if r * r < man:
        r += 1
    return Dyadic(r, exp >> 1)


def _sqrt_down(x: Dyadic) -> Dyadic:
    """Dyadic lower bound for sqrt(x), x >= 0."""
    if x.man == 0:
        return _ZERO
    x = x.floor_to(128)
    man, exp = x.man, x.exp
    pad = 64 + (exp & 1)
    man <<= pad
    exp -= pad
    return Dyadic(isqrt(man), exp >> 1)


def _div_floor(n: Dyadic, d: Dyadic, prec: int):
    """(q, ulp) with q <= n/d < q + ulp, q holding ~prec significant bits."""
    t = prec + abs(d.man).bit_length() - abs(n.man).bit_length() + 4
    if t < 0:
        t = 0
    q = (n.man << t) // d.man
    e = n.exp - d.exp - t
    return Dyadic(q, e), Dyadic(1, e)


def _div_up(n: Dyadic, d: Dyadic, prec: int = 32) -> Dyadic:
    """Dyadic upper bound for n/d with n >= 0, d > 0."""
    if n.man == 0:
        return _ZERO
    t = prec + d.man.bit_length() - n.man.bit_length() + 4
    if t < 0:
        t = 0
    q = ((n.man << t) + d.man - 1) // d.man
    return Dyadic(q, n.exp - d.exp - t)


# ---------------------------------------------------------------------------
# complex balls


class Ball:
    """Complex ball: exact dyadic center (re, im) and dyadic radius >= 0.

    Addition and multiplication round the center to the working precision
    and absorb the rounding error into the radius, so containment of the
    true value is preserved under every operation.  Real inputs stay real:
    an exactly-zero imaginary part never picks up spurious error.
    """

    __slots__ = ("re", "im", "rad")

    def __init__(self, re: Dyadic, im: Dyadic, rad: Dyadic):
        self.re = re
        self.im = im
        self.rad = rad

    @staticmethod
    def from_int(c: int) -> "Ball":
        return Ball(Dyadic(c), _ZERO, _ZERO)

    @staticmethod
    def real_point(x: Dyadic) -> "Ball":
        return Ball(x, _ZERO, _ZERO)

    def round(self, w: int) -> "Ball":
        re = self.re.floor_to(w)
        im = self.im.floor_to(w)
        err = (self.re - re) + (self.im - im) + self.rad
        return Ball(re, im, err.ceil_to(32))

    # -- magnitude helpers

    def center_abs2(self) -> Dyadic:
        return self.re * self.re + self.im * self.im

    def center_mag_up(self) -> Dyadic:
        if self.im.man == 0:
            return abs(self.re)
        return _sqrt_up(self.center_abs2())

    def mag_upper(self) -> Dyadic:
        return (self.center_mag_up() + self.rad).ceil_to(32)

    def mag_lower(self) -> Dyadic:
        if self.im.man == 0:
            lo = abs(self.re) - self.rad
        else:
            lo = _sqrt_down(self.center_abs2()) - self.rad
        return lo if lo.sign() > 0 else _ZERO

    def contains_zero(self) -> bool:
        return self.center_abs2() <= self.rad * self.rad

    def is_real_line(self) -> bool:
        return self.im.man == 0

    # -- arithmetic

    def add(self, other: "Ball", w: int) -> "Ball":
        return Ball(
            self.re + other.re, self.im + other.im, self.rad + other.rad
        ).round(w)

    def add_int(self, c: int, w: int) -> "Ball":
        return Ball(self.re + Dyadic(c), self.im, self.rad).round(w)

    def sub(self, other: "Ball", w: int) -> "Ball":
        return Ball(
            self.re - other.re, self.im - other.im, self.rad + other.rad
        ).round(w)

    def neg(self) -> "Ball":
        return Ball(-self.re, -self.im, self.rad)

    def mul(self, other: "Ball", w: int) -> "Ball":
        a, b = self, other
        re = a.re * b.re - a.im * b.im
        im = a.re * b.im + a.im * b.re
        rad = _ZERO
        if b.rad.man or a.rad.man:
            rad = (
                a.center_mag_up() * b.rad
                + b.center_mag_up() * a.rad
                + a.rad * b.rad
            )
        return Ball(re, im, rad).round(w)

    def div(self, other: "Ball", w: int):
        """Certified quotient, or None when the divisor ball meets zero."""
        b = other
        ylo = b.mag_lower()
        if ylo.man == 0:
            return None
        den = b.center_abs2()
        nre = self.re * b.re + self.im * b.im
        nim = self.im * b.re - self.re * b.im
        qre, ere = _div_floor(nre, den, w)
        if nim.man == 0:
            qim, eim = _ZERO, _ZERO
        else:
            qim, eim = _div_floor(nim, den, w)
        cb_lo = _sqrt_down(den) if b.im.man else abs(b.re)
        num_rad = self.rad * b.mag_upper() + self.center_mag_up() * b.rad
        rad = ere + eim
        if num_rad.man:
            rad = rad + _div_up(num_rad, ylo * cb_lo)
        return Ball(qre, qim, rad.ceil_to(32))

    def abs2_ball(self, w: int) -> "Ball":
        """Real ball containing |z|**2 for z in this ball."""
        c = self.center_abs2()
        r = self.rad
        rad = _ZERO
        if r.man:
            rad = (abs(self.re) + abs(self.im) + r) * r * Dyadic(2)
        return Ball(c, _ZERO, rad).round(w)

    def __repr__(self):
        return "Ball(%s, %s, r=%s)" % (self.re, self.im, self.rad)


def _ball_horner(coeffs: Sequence[int], z: Ball, w: int) -> Ball:
    acc = Ball.from_int(coeffs[-1])
    for c in reversed(coeffs[:-1]):
        acc = acc.mul(z, w).add_int(c, w)
    return acc


def _ball_diff_status(a: Ball, b: Ball):
    """'distinct' if the balls certify a != b, 'overlap' otherwise,
    plus the magnitude upper bound of the difference."""
    d = Ball(a.re - b.re, a.im - b.im, a.rad + b.rad)
    lo = d.mag_lower()
    return ("distinct" if lo.man else "overlap"), d.mag_upper()


def pi_ball(kappa: int) -> Ball:
    """Real ball containing pi with radius below 2**-kappa.

    Machin's formula pi = 16 atan(1/5) - 4 atan(1/239) with every series
    term floored at scale 2**w; one ulp of floor error per term plus one
    for the alternating tail gives the radius.
    """
    w = max(kappa, 0) + 16
    while True:
        total = 0
        ulps = 0
        for coef, q in ((16, 5), (-4, 239)):
            q2 = q * q
            power = q
            k = 0
            acc = 0
            while True:
                term = (1 << w) // ((2 * k + 1) * power)
                if term == 0:
                    break
                acc += -term if k & 1 else term
                power *= q2
                k += 1
            total += coef * acc
            ulps += abs(coef) * (k + 2)
        rad = Dyadic(ulps, -w)
        if rad.mag_exp() <= -kappa:
            return Ball(Dyadic(total, -w), _ZERO, rad)
        w *= 2


# ---------------------------------------------------------------------------
# explicit bound set


@dataclass(frozen=True)
class BoundSet:
    """Explicit dyadic bounds derived from the degree and coefficient size
    of an integer polynomial: every root magnitude lies in
    [root_magnitude_lo, root_magnitude_hi], distinct roots differ by at
    least root_separation, |P'| at a root is at least
    derivative_lower_bound, a nonzero value Q(root) is at least
    value_lower_bound in magnitude, and for a root magnitude m that is not
    (up to sign) itself a root, |P(m) * P(-m)| is at least
    modulus_product_lower_bound."""

    degree: int
    height2: int
    root_magnitude_hi: Dyadic
    root_magnitude_lo: Dyadic
    root_separation: Dyadic
    derivative_lower_bound: Dyadic
    modulus_product_lower_bound: Dyadic
    value_lower_bound: Dyadic | None = None


def _height2(p: UPoly) -> int:
    """Smallest h with max |coefficient| <= 2**h."""
    m = p.max_abs_coeff()
    return _ceil_log2(m) if m > 1 else 0


def _sep_exp(d: int, h: int) -> int:
    if d <= 1:
        return 0
    ld = d.bit_length()
    half_log = (_ceil_log2(d + 1) + 1) // 2 + 1
    return -(((d + 2) * ld + 1) // 2) - (d - 1) * (h + half_log)


def _deriv_exp(d: int, h: int) -> int:
    if d <= 1:
        return 0
    ld = d.bit_length()
    half_log = ((d - 1) * (d + 1).bit_length() + 1) // 2
    return -2 * d * h + 2 * h - 2 * (d - 1) * ld - half_log


def _value_exp(d: int, h: int, q: UPoly) -> int:
    dq = q.degree()
    hq = _height2(q)
    half_log = ((d + 1).bit_length() + 1) // 2
    return -(d - 1) * ((dq + 1).bit_length() + hq) - dq * (h + half_log)


def _modsep_exp(d: int, h: int) -> int:
    b1 = (d + 1).bit_length()
    fact = sum(k.bit_length() for k in range(2, 2 * d + 1))
    return 2 * (2 * h + b1) * (1 - d * d) - d * (h * d + 2 * fact) - d * b1


def bounds(P: UPoly, Q: UPoly | None = None) -> BoundSet:
    """Explicit bound set for the roots of P (and values of Q at them)."""
    if P.is_zero or P.degree() == 0:
        raise ValueError("bounds require a non-constant polynomial")
    d = P.degree()
    h = _height2(P)
    vlb = None
    if Q is not None and not Q.is_zero:
        vlb = _pow2(_value_exp(d, h, Q))
    return BoundSet(
        degree=d,
        height2=h,
        root_magnitude_hi=Dyadic((1 << h) + 1),
        root_magnitude_lo=_pow2(-(h + 1)),
        root_separation=_pow2(_sep_exp(d, h)),
        derivative_lower_bound=_pow2(_deriv_exp(d, h)),
        modulus_product_lower_bound=_pow2(_modsep_exp(d, h)),
        value_lower_bound=vlb,
    )


# ---------------------------------------------------------------------------
# real root isolation (sign-variation bisection, exact integer arithmetic)


def _variations(coeffs: Iterable[int]) -> int:
    sgn = 0
    v = 0
    for c in coeffs:
        if c:
            s = 1 if c > 0 else -1
            if sgn and s != sgn:
                v += 1
            sgn = s
    return v


def _translate1(coeffs: Sequence[int]) -> list:
    c = list(coeffs)
    d = len(c) - 1
    for i in range(d):
        for j in range(d - 1, i - 1, -1):
            c[j] += c[j + 1]
    return c


def _open_unit_test(coeffs: Sequence[int]) -> int:
    """Sign-variation bound on the number of roots in the open interval
    (0, 1); 0 and 1 are exact answers."""
    return _variations(_translate1(list(reversed(coeffs))))


def _half_left(coeffs: Sequence[int]) -> list:
    d = len(coeffs) - 1
    return [a << (d - i) for i, a in enumerate(coeffs)]


def _deflate_at_1(coeffs: Sequence[int]) -> list:
    d = len(coeffs) - 1
    b = [0] * d
    acc = coeffs[d]
    for j in range(d - 1, -1, -1):
        b[j] = acc
        acc = coeffs[j] + acc
    if acc != 0:
        raise AssertionError("deflation at an exact root must be exact")
    return b


def _vca_positive(coeffs: Sequence[int], depth_cap: int):
    """Isolate the positive real roots of a square-free integer polynomial.

    Returns (intervals, exact_points): open dyadic intervals (lo, hi) each
    holding exactly one root, and exact dyadic roots discovered at
    subdivision midpoints.
    """
    if all(c >= 0 for c in coeffs) or all(c <= 0 for c in coeffs):
        return [], []
    m = max(abs(c) for c in coeffs)
    L = _ceil_log2(m) + 2
    start = [a << (L * i) for i, a in enumerate(coeffs)]
    intervals = []
    exacts = []
    stack = [(0, 0, start)]
    while stack:
        c, k, q = stack.pop()
        if k > depth_cap:
            raise RuntimeError("real-root subdivision exceeded its depth cap")
        v = _open_unit_test(q)
        if v == 0:
            continue
        if v == 1:
            intervals.append((Dyadic(c, L - k), Dyadic(c + 1, L - k)))
            continue
        ql = _half_left(q)
        qr = _translate1(ql)
        if qr[0] == 0:
            exacts.append(Dyadic(2 * c + 1, L - k - 1))
            qr = qr[1:]
            ql = _deflate_at_1(ql)
        if len(ql) > 1:
            stack.append((2 * c, k + 1, ql))
        if len(qr) > 1:
            stack.append((2 * c + 1, k + 1, qr))
    return intervals, exacts


def _sturm_real_count(P: UPoly) -> int:
    """Exact number of distinct real roots via a signed remainder chain."""
    a = [mpq(int(c)) for c in P.coeffs]
    b = [mpq(int((i + 1) * c)) for i, c in enumerate(P.coeffs[1:])]
    chain = [a]
    while b:
        chain.append(b)
        if len(b) == 1:
            break
        r = list(a)
        while len(r) >= len(b):
            if r[-1] == 0:
                r.pop()
                continue
            f = r[-1] / b[-1]
            off = len(r) - len(b)
            for i in range(len(b)):
                r[off + i] -= f * b[i]
            r.pop()
        while r and r[-1] == 0:
            r.pop()
        a, b = b, [-x for x in r]

    def vars_at(sign_of_inf: int) -> int:
        seq = []
        for poly in chain:
            lc = poly[-1]
            s = 1 if lc > 0 else -1
            if sign_of_inf < 0 and (len(poly) - 1) % 2 == 1:
                s = -s
            seq.append(s)
        v = 0
        for x, y in zip(seq, seq[1:]):
            if x != y:
                v += 1
        return v

    return vars_at(-1) - vars_at(1)


def _sign_at_dyadic(coeffs: Sequence[int], x: Dyadic) -> int:
    acc = _ZERO
    for c in reversed(coeffs):
        acc = acc * x + Dyadic(c)
    return acc.sign()


# ---------------------------------------------------------------------------
# complex root isolation (subdivision with scaled coefficient tests,
# contraction refinement)


def _taylor_shift_scaled(coeffs, cre: Dyadic, cim: Dyadic, R: Dyadic, w: int):
    """Ball coefficients of P(c + R*x), exact shift then rounding."""
    n = len(coeffs)
    b = [(Dyadic(a), _ZERO) for a in coeffs]
    for k in range(n - 1):
        for j in range(n - 2, k - 1, -1):
            re, im = b[j]
            re1, im1 = b[j + 1]
            b[j] = (re + re1 * cre - im1 * cim, im + re1 * cim + im1 * cre)
    out = []
    scale = _ONE
    for j in range(n):
        re, im = b[j]
        out.append(Ball(re * scale, im * scale, _ZERO).round(w))
        scale = scale * R
    return out


def _graeffe_balls(q: Sequence[Ball], w: int) -> list:
    d = len(q) - 1
    out = []
    for m_idx in range(d + 1):
        acc = None
        lo_i = max(0, 2 * m_idx - d)
        hi_i = min(d, 2 * m_idx)
        for i in range(lo_i, hi_i + 1):
            t = q[i].mul(q[2 * m_idx - i], w)
            if i & 1:
                t = t.neg()
            acc = t if acc is None else acc.add(t, w)
        out.append(acc)
    return out


def _disk_count(coeffs, cre: Dyadic, cim: Dyadic, R: Dyadic, w: int = 64,
                max_sq: int = 8):
    """Certified number of roots in the closed disk (c, R), or None.

    The dominant-coefficient test on the scaled, shifted polynomial
    certifies an exact count when one coefficient's modulus exceeds the
    sum of all others; repeated root-squaring sharpens the test when roots
    are not well separated from the disk boundary.
    """
    q = _taylor_shift_scaled(coeffs, cre, cim, R, w)
    for _ in range(max_sq + 1):
        his = [b.mag_upper() for b in q]
        los = [b.mag_lower() for b in q]
        total = _ZERO
        for hv in his:
            total = total + hv
        for k in range(len(q)):
            if los[k].man and los[k] + his[k] > total:
                return k
        q = _graeffe_balls(q, w)
    return None


def _krawczyk(coeffs, dcoeffs, cre: Dyadic, cim: Dyadic, r: Dyadic, w: int):
    """Contraction test: if it passes, the disk (c, r) contains exactly one
    root, and the returned smaller disk still contains it."""
    cpt = Ball(cre, cim, _ZERO)
    pc = _ball_horner(coeffs, cpt, w)
    dpc = _ball_horner(dcoeffs, cpt, w)
    q = pc.div(dpc, w)
    if q is None:
        return None
    disk = Ball(cre, cim, r)
    dpd = _ball_horner(dcoeffs, disk, w)
    ratio = dpd.div(dpc, w)
    if ratio is None:
        return None
    one = Ball.from_int(1)
    e = one.sub(ratio, w)
    beta = e.mag_upper()
    k_re = cre - q.re
    k_im = cim - q.im
    k_rad = (q.rad + beta * r).ceil_to(32)
    off = _sqrt_up(q.re * q.re + q.im * q.im)
    if off + k_rad < r:
        return k_re, k_im, k_rad
    return None


def _contract(coeffs, dcoeffs, cre, cim, rad, kappa):
    """Shrink a certified isolating disk to radius < 2**-kappa.

    The root is pinned down by exclusion: the disk's bounding box is
    subdivided, children certified root-free (or certified outside the
    disk) are dropped, so the tracked root provably stays inside the
    surviving boxes and the search cannot wander into another root's
    basin.  Every round the contraction test is tried on a disk around
    the survivors; once it passes it takes over and roughly squares the
    radius per step.
    """
    if rad.man == 0 or rad.mag_exp() <= -kappa:
        return cre, cim, rad
    d = len(coeffs) - 1
    h = _ceil_log2(max(abs(c) for c in coeffs))
    sep_e = _sep_exp(d, h)
    w = max(64, 2 * kappa + 32)
    w_cap = 8 * kappa + 16 * d * max(h, 1) + 4096
    disk = None
    stall = 0
    es = rad.mag_exp() + 1
    boxes = [(cre - rad, cim - rad)]
    rounds = max(64, es + 8 - sep_e) + kappa + 16
    for _ in range(rounds):
        if disk is not None:
            c_re, c_im, r_cur = disk
            if r_cur.man == 0 or r_cur.mag_exp() <= -kappa:
                return disk
            accepted = None
            for r_try in (r_cur, Dyadic(r_cur.man, r_cur.exp + 1)):
                out = _krawczyk(coeffs, dcoeffs, c_re, c_im, r_try, w)
                if out is not None and (out[2].man == 0
                                        or out[2] + out[2] < r_cur):
                    if accepted is None or out[2] < accepted[2]:
                        accepted = out
            if accepted is not None:
                disk = accepted
                stall = 0
                if accepted[2].man:
                    w = max(w, -2 * accepted[2].mag_exp() + 64)
                continue
            stall += 1
            w = min(2 * w, w_cap)
            if stall >= 3:
                # precision alone is not closing the certificate; fall
                # back to exclusion geometry on the current disk, which
                # still certifiably holds the root
                cre, cim, rad = disk
                es = rad.mag_exp() + 1
                boxes = [(cre - rad, cim - rad)]
                disk = None
                stall = 0
            continue
        side = _pow2(es)
        min_x = min(b[0] for b in boxes)
        max_x = max(b[0] for b in boxes) + side
        min_y = min(b[1] for b in boxes)
        max_y = max(b[1] for b in boxes) + side
        m_re = Dyadic((min_x + max_x).man, (min_x + max_x).exp - 1)
        m_im = Dyadic((min_y + max_y).man, (min_y + max_y).exp - 1)
        half_w = Dyadic((max_x - min_x).man, (max_x - min_x).exp - 1)
        half_h = Dyadic((max_y - min_y).man, (max_y - min_y).exp - 1)
        rho = _sqrt_up(half_w * half_w + half_h * half_h)
        # the survivors hold the root; below a quarter of the separation
        # bound their hull is itself a certified isolating region
        if rho.man == 0 or (rho.mag_exp() <= -kappa
                            and rho.mag_exp() <= sep_e - 2):
            return m_re, m_im, rho
        re = rho.mag_exp()
        for e_try in (re, re + 1, re + 2):
            hit = _krawczyk(coeffs, dcoeffs, m_re, m_im, _pow2(e_try), w)
            if hit is not None:
                disk = hit
                break
        if disk is not None:
            continue
        if len(boxes) <= 4:
            w = min(2 * w, w_cap)
        half = _pow2(es - 1)
        quarter = _pow2(es - 2)
        r_box = Dyadic(3, es - 3)
        nxt = []
        for (x0, y0) in boxes:
            for dx in (0, 1):
                for dy in (0, 1):
                    cx0 = x0 + half if dx else x0
                    cy0 = y0 + half if dy else y0
                    ctr_re = cx0 + quarter
                    ctr_im = cy0 + quarter
                    gap_lo = _sqrt_down(
                        (ctr_re - cre) * (ctr_re - cre)
                        + (ctr_im - cim) * (ctr_im - cim)
                    )
                    if gap_lo > rad + r_box:
                        continue
                    quick = _ball_horner(coeffs,
                                         Ball(ctr_re, ctr_im, r_box), 64)
                    if quick.mag_lower().man:
                        continue
                    if _disk_count(coeffs, ctr_re, ctr_im, r_box) == 0:
                        continue
                    nxt.append((cx0, cy0))
        if not nxt:
            raise RuntimeError("exclusion refinement lost the tracked root")
        if len(nxt) > 256:
            raise RuntimeError("exclusion refinement failed to localize")
        boxes = nxt
        es -= 1
    raise RuntimeError("disk refinement exceeded its round cap")


def _isolate_complex_upper(P: UPoly, real_regions, depth_cap: int):
    """Isolating disks for the roots strictly above the real axis.

    Boxes touching the axis are tested with an axis-symmetric disk: a
    certified count there equal to the number of already-isolated real
    roots inside means the box holds nothing new.  Boxes strictly above
    the axis are kept once a containing disk certifies exactly one root.
    """
    coeffs = [int(c) for c in P.coeffs]
    dcoeffs = [int(c) for c in P.derivative().coeffs]
    d = P.degree()
    n_pairs = (d - len(real_regions)) // 2
    if n_pairs == 0:
        return []
    m = max(abs(c) for c in coeffs)
    L = _ceil_log2(m) + 2
    reals = [(c, r) for (c, r) in real_regions]
    found = []
    stack = [(-1, 0, L), (0, 0, L)]
    guard = 0
    while stack:
        guard += 1
        if guard > 200000:
            raise RuntimeError("complex subdivision exceeded its work cap")
        i, j, se = stack.pop()
        if L - se > depth_cap:
            raise RuntimeError("complex subdivision exceeded its depth cap")
        half = _pow2(se - 1)
        x0 = Dyadic(i, se)
        y0 = Dyadic(j, se)
        ctr_re = x0 + half
        if j == 0:
            r_disk = Dyadic(9, se - 3)
            quick = _ball_horner(coeffs, Ball(ctr_re, _ZERO, r_disk), 64)
            if quick.mag_lower().man:
                continue
            cnt = _disk_count(coeffs, ctr_re, _ZERO, r_disk)
            if cnt is None:
                cnt = _disk_count(coeffs, ctr_re, _ZERO, Dyadic(5, se - 2))
                if cnt is not None:
                    r_disk = Dyadic(5, se - 2)
            if cnt is not None:
                inside = 0
                clean = True
                for (rc, rr) in reals:
                    gap = abs(rc - ctr_re)
                    if gap + rr <= r_disk:
                        inside += 1
                    elif gap - rr < r_disk:
                        clean = False
                        break
                if clean and cnt == inside:
                    continue
        else:
            ctr_im = y0 + half
            r_disk = Dyadic(3, se - 2)
            quick = _ball_horner(coeffs, Ball(ctr_re, ctr_im, r_disk), 64)
            if quick.mag_lower().man:
                continue
            cnt = _disk_count(coeffs, ctr_re, ctr_im, r_disk)
            if cnt is None:
                r2 = Dyadic(7, se - 3)
                cnt = _disk_count(coeffs, ctr_re, ctr_im, r2)
                if cnt is not None:
                    r_disk = r2
            if cnt == 0:
                continue
            if cnt == 1:
                found.append((ctr_re, ctr_im, r_disk))
                continue
        for di in (0, 1):
            for dj in (0, 1):
                stack.append((2 * i + di, 2 * j + dj, se - 1))

    # Deduplicate disks that captured the same root from adjacent boxes:
    # once every radius is far below the worst-case root separation, two
    # disks overlap exactly when they hold the same root.
    h = _ceil_log2(max(abs(c) for c in coeffs))
    kb = 4 - _sep_exp(d, h)
    kept = []
    for disk in found:
        disk = _contract(coeffs, dcoeffs, *disk, kappa=kb)
        dup = False
        for other in kept:
            dre = disk[0] - other[0]
            dim = disk[1] - other[1]
            rsum = disk[2] + other[2]
            if not dre * dre + dim * dim > rsum * rsum:
                dup = True
                break
        if not dup:
            kept.append(disk)
    if len(kept) != n_pairs:
        raise RuntimeError(
            "complex root count mismatch: found %d conjugate pairs, "
            "expected %d" % (len(kept), n_pairs)
        )
    return kept


# ---------------------------------------------------------------------------
# isolated roots and numerical representations


@dataclass(frozen=True)
class IsolatedRoot:
    """One certified root region: a real interval (center +/- radius on the
    axis) or a complex disk, holding exactly one root of the associated
    polynomial; radius zero marks an exact dyadic root."""

    kind: str
    center_re: Dyadic
    center_im: Dyadic
    radius: Dyadic
    index: int

    def ball(self) -> Ball:
        return Ball(self.center_re, self.center_im, self.radius)

    def approx(self) -> complex:
        return complex(float(self.center_re), float(self.center_im))

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "center_re": self.center_re.to_json(),
            "center_im": self.center_im.to_json(),
            "radius": self.radius.to_json(),
        }

    @staticmethod
    def from_json(data, index: int = 0) -> "IsolatedRoot":
        return IsolatedRoot(
            kind=data["kind"],
            center_re=Dyadic.from_json(data["center_re"]),
            center_im=Dyadic.from_json(data["center_im"]),
            radius=Dyadic.from_json(data["radius"]),
            index=index,
        )


def _radius_below(r: Dyadic, kappa: int) -> bool:
    return r.man == 0 or r.mag_exp() <= -kappa


def refine(root: IsolatedRoot, P: UPoly, kappa: int) -> IsolatedRoot:
    """Same root, radius below 2**-kappa; a request weaker than the current
    radius returns the root unchanged."""
    if _radius_below(root.radius, kappa):
        return root
    coeffs = [int(c) for c in P.coeffs]
    dcoeffs = [int(c) for c in P.derivative().coeffs]
    if root.kind == "real":
        cre, rad = _refine_real(coeffs, dcoeffs, root.center_re,
                                root.radius, kappa)
        return IsolatedRoot("real", cre, _ZERO, rad, root.index)
    cre, cim, rad = _contract(coeffs, dcoeffs, root.center_re,
                              root.center_im, root.radius, kappa)
    return IsolatedRoot("complex", cre, cim, rad, root.index)


def _bracket_interior(coeffs, lo: Dyadic, hi: Dyadic):
    """Endpoint signs for an interval isolating one interior root.

    An endpoint may sit exactly on a different root of the polynomial
    (adjacent isolating intervals share dyadic grid points), so a zero
    sign there walks inward until both probes straddle the interior
    root.  Returns (lo, hi, s_lo, s_hi, exact): when exact is not None
    the interior root itself was hit and is returned exactly.
    """
    s_lo = _sign_at_dyadic(coeffs, lo)
    s_hi = _sign_at_dyadic(coeffs, hi)
    if s_lo and s_hi:
        return lo, hi, s_lo, s_hi, None
    d = len(coeffs) - 1
    h = _ceil_log2(max(abs(c) for c in coeffs if c))
    width = hi - lo
    cap = max(64, width.mag_exp() - _sep_exp(d, h) + 8)
    for k in range(2, cap):
        delta = Dyadic(width.man, width.exp - k)
        lo2 = lo + delta if s_lo == 0 else lo
        hi2 = hi - delta if s_hi == 0 else hi
        t_lo = _sign_at_dyadic(coeffs, lo2)
        if t_lo == 0:
            return lo, hi, 0, 0, lo2
        t_hi = _sign_at_dyadic(coeffs, hi2)
        if t_hi == 0:
            return lo, hi, 0, 0, hi2
        if t_lo != t_hi:
            return lo2, hi2, t_lo, t_hi, None
    raise RuntimeError("failed to bracket the interior root")


def _refine_real(coeffs, dcoeffs, center: Dyadic, radius: Dyadic, kappa: int):
    lo = center - radius
    hi = center + radius
    lo, hi, s_lo, s_hi, exact = _bracket_interior(coeffs, lo, hi)
    if exact is not None:
        return exact, _ZERO
    steps = 0
    while True:
        width = hi - lo
        if width.man == 0 or width.mag_exp() <= -kappa:
            c = Dyadic((lo + hi).man, (lo + hi).exp - 1)
            r = Dyadic(width.man, width.exp - 1)
            return c, r
        if steps % 4 == 3:
            # contraction acceleration: once the interval is inside the
            # quadratic basin this converges in a handful of passes
            c = Dyadic((lo + hi).man, (lo + hi).exp - 1)
            r = Dyadic(width.man, width.exp - 1)
            w = max(64, -2 * r.mag_exp() + 64)
            fails = 0
            passes = 0
            moved = False
            while fails < 3 and passes < 4 * kappa + 64:
                passes += 1
                if r.man == 0 or r.mag_exp() <= -kappa:
                    return c, r
                out = _krawczyk(coeffs, dcoeffs, c, _ZERO, r, w)
                if out is not None and out[1].man == 0:
                    c, r = out[0], out[2]
                    moved = True
                    if r.man:
                        w = max(w, -2 * r.mag_exp() + 64)
                    continue
                if not moved:
                    break
                fails += 1
                w *= 2
            if moved:
                if r.man == 0 or r.mag_exp() <= -kappa:
                    return c, r
                lo, hi, s_lo, s_hi, exact = _bracket_interior(
                    coeffs, c - r, c + r)
                if exact is not None:
                    return exact, _ZERO
        mid = Dyadic((lo + hi).man, (lo + hi).exp - 1)
        s = _sign_at_dyadic(coeffs, mid)
        if s == 0:
            return mid, _ZERO
        if s == s_lo:
            lo = mid
        else:
            hi = mid
        steps += 1


def isolate_roots(P: UPoly, kappa: int = 64) -> list:
    """Certified isolating regions for every complex root of a square-free
    integer polynomial, radii below 2**-kappa, real roots certified real.

    The real roots come from exact sign-variation bisection and are
    cross-checked against an independent signed-remainder count; the
    non-real roots come from subdivision of the upper half plane (conjugates
    are mirrored), and the total must account for the full degree.
    """
    if P.is_zero or P.degree() == 0:
        raise ValueError("cannot isolate the roots of a constant")
    if not is_squarefree(P):
        raise NotSquareFree("polynomial has repeated roots")
    Pp = P.primitive()
    coeffs = [int(c) for c in Pp.coeffs]
    h = _height2(Pp)
    depth_cap = (h + 4) - _sep_exp(Pp.degree(), h) + 64

    real_regions = []
    if coeffs[0] == 0:
        real_regions.append((_ZERO, _ZERO))
        coeffs = coeffs[1:]
    work = UPoly(coeffs)
    if work.degree() >= 1:
        pos_iv, pos_exact = _vca_positive(coeffs, depth_cap)
        neg_coeffs = [(-c if i & 1 else c) for i, c in enumerate(coeffs)]
        neg_iv, neg_exact = _vca_positive(neg_coeffs, depth_cap)
        for (a, b) in pos_iv:
            real_regions.append(
                (Dyadic((a + b).man, (a + b).exp - 1),
                 Dyadic((b - a).man, (b - a).exp - 1))
            )
        for x in pos_exact:
            real_regions.append((x, _ZERO))
        for (a, b) in neg_iv:
            real_regions.append(
                (-Dyadic((a + b).man, (a + b).exp - 1),
                 Dyadic((b - a).man, (b - a).exp - 1))
            )
        for x in neg_exact:
            real_regions.append((-x, _ZERO))

    expected = _sturm_real_count(Pp)
    if expected != len(real_regions):
        raise RuntimeError(
            "real root isolation (%d) disagrees with the signed-remainder "
            "count (%d)" % (len(real_regions), expected)
        )

    dcoeffs = [int(c) for c in Pp.derivative().coeffs]
    p_coeffs = [int(c) for c in Pp.coeffs]
    refined_reals = []
    for (c, r) in real_regions:
        if r.man:
            c, r = _refine_real(p_coeffs, dcoeffs, c, r, max(kappa, 16))
        refined_reals.append((c, r))

    # the complex stage works on the zero-deflated polynomial, so its
    # account of real roots must leave the origin out
    nonzero_reals = [(c, r) for (c, r) in refined_reals
                     if c.man != 0 or r.man != 0]
    disks = _isolate_complex_upper(work, nonzero_reals,
                                   depth_cap) if work.degree() else []

    roots = []
    for (c, r) in refined_reals:
        roots.append(["real", c, _ZERO, r])
    for (cre, cim, rad) in disks:
        cre, cim, rad = _contract(p_coeffs, dcoeffs, cre, cim, rad,
                                  max(kappa, 16))
        roots.append(["complex", cre, cim, rad])
        roots.append(["complex", cre, -cim, rad])

    if len(roots) != Pp.degree():
        raise RuntimeError("root count does not match the degree")

    # Make the closed regions pairwise disjoint and keep complex disks off
    # the real axis, refining wherever regions still touch.
    for _ in range(128):
        clean = True
        for rt in roots:
            if rt[0] == "complex" and not abs(rt[2]) > rt[3]:
                k2 = max(kappa, 2 * -min(-1, rt[3].mag_exp()), 16) * 2
                rt[1], rt[2], rt[3] = _contract(p_coeffs, dcoeffs, rt[1],
                                                rt[2], rt[3], k2)
                clean = False
        for a_i in range(len(roots)):
            for b_i in range(a_i + 1, len(roots)):
                ra, rb = roots[a_i], roots[b_i]
                dre = ra[1] - rb[1]
                dim = ra[2] - rb[2]
                rsum = ra[3] + rb[3]
                if dre * dre + dim * dim > rsum * rsum:
                    continue
                clean = False
                for rt in (ra, rb):
                    k2 = max(kappa, 2 * -min(-1, rt[3].mag_exp()
                                             if rt[3].man else -kappa)) * 2
                    if rt[0] == "real":
                        rt[1], rt[3] = _refine_real(p_coeffs, dcoeffs,
                                                    rt[1], rt[3], k2)
                    else:
                        rt[1], rt[2], rt[3] = _contract(
                            p_coeffs, dcoeffs, rt[1], rt[2], rt[3], k2)
        if clean:
            break
    else:
        raise RuntimeError("failed to separate root regions")

    roots.sort(key=lambda rt: (rt[1].to_fraction(), rt[2].to_fraction()))
    return [
        IsolatedRoot(kind, cre, cim, rad, idx)
        for idx, (kind, cre, cim, rad) in enumerate(roots)
    ]


@dataclass(frozen=True)
class NumericalKroneckerRep:
    """A Kronecker representation together with certified isolating regions
    for every root of its minimal polynomial, all radii below
    2**-precision.  Snapshots are immutable: refinement returns a new one."""

    rep: object
    roots: tuple
    precision: int

    @classmethod
    def from_rep(cls, rep, kappa: int = 64) -> "NumericalKroneckerRep":
        roots = tuple(isolate_roots(rep.P, kappa))
        return cls(rep=rep, roots=roots, precision=kappa)

    def refined(self, kappa: int) -> "NumericalKroneckerRep":
        if kappa <= self.precision:
            return self
        roots = tuple(refine(r, self.rep.P, kappa) for r in self.roots)
        return NumericalKroneckerRep(self.rep, roots, kappa)

    def real_indices(self) -> list:
        return [r.index for r in self.roots if r.kind == "real"]

    def to_json(self) -> dict:
        return {
            "rep": self.rep.to_json(),
            "precision": self.precision,
            "roots": [r.to_json() for r in self.roots],
        }

    @classmethod
    def from_json(cls, data) -> "NumericalKroneckerRep":
        from .kronecker import KroneckerRep

        rep = KroneckerRep.from_json(data["rep"])
        roots = tuple(
            IsolatedRoot.from_json(r, i)
            for i, r in enumerate(data["roots"])
        )
        return cls(rep=rep, roots=roots, precision=int(data["precision"]))


def numeric_rep(rep, kappa: int = 64) -> NumericalKroneckerRep:
    return NumericalKroneckerRep.from_rep(rep, kappa)


# ---------------------------------------------------------------------------
# certified evaluation of parametrized values


def _eval_once(roots, q_coeffs, dp_coeffs, w: int):
    vals = []
    for rt in roots:
        num = _ball_horner(q_coeffs, rt.ball(), w)
        den = _ball_horner(dp_coeffs, rt.ball(), w)
        v = num.div(den, w)
        if v is None:
            return None
        vals.append(v)
    return vals


def _eval_to_radius(nrep: NumericalKroneckerRep, Q_q: UPoly, kappa: int):
    """Value balls of radius below 2**-kappa, plus the refined snapshot
    they were computed from (reusable by the caller)."""
    P = nrep.rep.P
    d = P.degree()
    h = _height2(P)
    hq = _height2(Q_q) if not Q_q.is_zero else 0
    if Q_q.is_zero:
        return [Ball(_ZERO, _ZERO, _ZERO) for _ in nrep.roots], nrep
    q_coeffs = [int(c) for c in Q_q.coeffs]
    dp_coeffs = [int(c) for c in P.derivative().coeffs]
    # Enough working bits per the evaluation error analysis: target bits,
    # the numerator height, the dynamic range of powers of the root, and
    # twice the derivative's worst-case smallness.
    w_cap = kappa + hq + d * (h + 4) + 2 * -_deriv_exp(d, h) + 64
    w = max(64, kappa + 32)
    cur = nrep
    while True:
        cur = cur.refined(max(w, cur.precision))
        vals = _eval_once(cur.roots, q_coeffs, dp_coeffs, w + 32)
        if vals is not None and all(
            _radius_below(v.rad, kappa) for v in vals
        ):
            return vals, cur
        w *= 2
        if w > 4 * w_cap:
            raise RuntimeError("certified evaluation failed to converge")


def eval_param(nrep: NumericalKroneckerRep, Q_q: UPoly, kappa: int) -> list:
    """Certified balls for Q_q(u)/P'(u) at every root, radii below
    2**-kappa, ordered like nrep.roots."""
    if Q_q.degree() >= nrep.rep.P.degree():
        raise ValueError("numerator degree must be below deg P")
    vals, _ = _eval_to_radius(nrep, Q_q, kappa)
    return vals


# ---------------------------------------------------------------------------
# exact grouping and sign decisions


def group_by_value(nrep: NumericalKroneckerRep, Q_q: UPoly) -> list:
    """Partition of root indices by exact equality of Q_q(u)/P'(u).

    Since every value is a root of the minimal polynomial of the
    parametrized value, two values closer than that polynomial's root
    separation bound are certified equal; the partition is exact and stays
    stable under any further refinement.
    """
    n = len(nrep.roots)
    if Q_q.is_zero:
        return [list(range(n))]
    phi = minimal_polynomial(nrep.rep, Q_q)
    if phi.degree() <= 1:
        return [list(range(n))]
    sep = bounds(phi).root_separation
    kappa = -sep.mag_exp() + 3
    vals, _ = _eval_to_radius(nrep, Q_q, kappa)
    classes = []
    for i in range(n):
        placed = False
        for cls in classes:
            status, hi = _ball_diff_status(vals[i], vals[cls[0]])
            if status == "overlap" and hi < sep:
                cls.append(i)
                placed = True
                break
        if not placed:
            classes.append([i])
    return classes


@dataclass(frozen=True)
class ValueReport:
    """Exact facts about one parametrized value: realness, sign, and
    membership in {0}, (0, inf), (-inf, 1), (0, 1); sign and memberships
    are None for values that are not real."""

    index: int
    is_real: bool
    sign: str | None
    is_zero: bool
    is_positive: bool | None
    less_than_one: bool | None
    in_unit_interval: bool | None


def _signed_numerator_sign(nrep, num: UPoly, root_index: int, v_exp: int):
    """Exact sign of num(u_i) for a real root u_i: ball refinement with the
    value lower bound forcing zero when the ball stays that small."""
    if num.is_zero:
        return 0
    P = nrep.rep.P
    coeffs = [int(c) for c in num.coeffs]
    kappa = 16
    cap = -v_exp + _height2(num) + P.degree() * (_height2(P) + 4) + 64
    cur = nrep
    while True:
        cur = cur.refined(max(kappa, cur.precision))
        rt = cur.roots[root_index]
        ball = _ball_horner(coeffs, rt.ball(), kappa + 32)
        if ball.mag_lower().man:
            return ball.re.sign()
        if ball.mag_upper() < _pow2(v_exp):
            return 0
        kappa *= 2
        if kappa > 4 * cap:
            raise RuntimeError("sign decision failed to converge")


def _phi_root_sign_and_memberships(phi: UPoly, phi_roots, matched_idx: int):
    """Exact sign and 0/1 comparisons for one real root of phi."""
    rt = phi_roots[matched_idx]
    coeffs = [int(c) for c in phi.coeffs]
    dcoeffs = [int(c) for c in phi.derivative().coeffs]
    c, r = rt.center_re, rt.radius
    phi_at_0 = coeffs[0] == 0
    phi_at_1 = sum(coeffs) == 0
    kappa = max(16, -r.mag_exp() if r.man else 16)
    for _ in range(64):
        if r.man == 0:
            val = c
            s = val.sign()
            lt1 = val < _ONE
            break
        lo, hi = c - r, c + r
        zero_out = lo.sign() > 0 or hi.sign() < 0
        one_out = lo > _ONE or hi < _ONE
        zero_in_reach = not zero_out
        one_in_reach = not one_out
        if zero_out and one_out:
            s = 1 if lo.sign() > 0 else -1
            lt1 = hi < _ONE
            break
        if zero_in_reach and phi_at_0:
            # the interval can only still touch 0 because it IS the zero
            # root once it is below the separation bound
            sepb = bounds(phi).root_separation
            if r + r < sepb:
                s = 0
                lt1 = True
                break
        if one_in_reach and phi_at_1:
            sepb = bounds(phi).root_separation
            if r + r < sepb and zero_out:
                s = lo.sign() if lo.sign() else 1
                lt1 = False  # the value equals 1
                break
        kappa *= 2
        c, r = _refine_real(coeffs, dcoeffs, c, r, kappa)
    else:
        raise RuntimeError("membership decision failed to converge")
    is_zero = s == 0
    positive = s > 0
    in_unit = positive and lt1
    return s, is_zero, positive, lt1, in_unit


def sign_at_roots(nrep: NumericalKroneckerRep, Q_q: UPoly) -> list:
    """Exact realness, sign and interval membership of Q_q(u)/P'(u) at every
    root of P.

    At real roots the sign comes from the numerator and derivative signs,
    with zero forced by the explicit value lower bound.  At non-real roots
    the value is matched against the isolated roots of its own minimal
    polynomial, which settles realness and, when real, the comparisons
    with 0 and 1.
    """
    P = nrep.rep.P
    dP = P.derivative()
    n = len(nrep.roots)
    reports: dict = {}
    if Q_q.is_zero:
        return [
            ValueReport(i, True, "0", True, False, True, False)
            for i in range(n)
        ]

    h = _height2(P)
    d = P.degree()
    num_lt1 = Q_q - dP
    v_exp_q = _value_exp(d, h, Q_q)
    v_exp_l = _value_exp(d, h, num_lt1) if not num_lt1.is_zero else 0

    real_idx = [r.index for r in nrep.roots if r.kind == "real"]
    complex_idx = [r.index for r in nrep.roots if r.kind != "real"]

    for i in real_idx:
        s_num = _signed_numerator_sign(nrep, Q_q, i, v_exp_q)
        s_den = _signed_numerator_sign(nrep, dP, i, _deriv_exp(d, h))
        s = s_num * s_den
        if num_lt1.is_zero:
            s_m1 = 0
        else:
            s_m1 = _signed_numerator_sign(nrep, num_lt1, i, v_exp_l) * s_den
        sign_ch = "0" if s == 0 else ("+" if s > 0 else "-")
        lt1 = s_m1 < 0
        reports[i] = ValueReport(
            index=i,
            is_real=True,
            sign=sign_ch,
            is_zero=s == 0,
            is_positive=s > 0,
            less_than_one=lt1,
            in_unit_interval=s > 0 and lt1,
        )

    if complex_idx:
        phi = minimal_polynomial(nrep.rep, Q_q)
        if phi.degree() == 0:
            raise RuntimeError("minimal polynomial of a value is constant")
        sep = bounds(phi).root_separation
        kappa = -sep.mag_exp() + 3
        phi_roots = isolate_roots(phi, kappa)
        vals, _ = _eval_to_radius(nrep, Q_q, kappa)
        for i in complex_idx:
            match = None
            for pr in phi_roots:
                status, hi = _ball_diff_status(vals[i], pr.ball())
                if status == "overlap" and hi < sep:
                    match = pr
                    break
            if match is None:
                raise RuntimeError("value failed to match a root of its "
                                   "minimal polynomial")
            if match.kind != "real":
                reports[i] = ValueReport(i, False, None, False,
                                         None, None, None)
            else:
                s, is_zero, pos, lt1, in_unit = _phi_root_sign_and_memberships(
                    phi, phi_roots, phi_roots.index(match)
                )
                sign_ch = "0" if s == 0 else ("+" if s > 0 else "-")
                reports[i] = ValueReport(i, True, sign_ch, is_zero,
                                         pos, lt1, in_unit)
    return [reports[i] for i in range(n)]


# ---------------------------------------------------------------------------
# modulus grouping


def _same_modulus(nrep, i: int, target_sq: Ball, Q_j: UPoly,
                  g_full: UPoly, sep_g: Dyadic, lb: Dyadic):
    """Certified |z_j(u_i)| == target modulus.

    g_full has the squares of the roots of the coordinate polynomial as
    its roots, so the squared modulus in question either is a root of
    g_full or g_full is at least lb there; the target's squared modulus is
    a root, and distinct roots of g_full differ by at least sep_g."""
    g_coeffs = [int(c) for c in g_full.coeffs]
    kappa = 24
    cap = 8 * (-lb.mag_exp() - sep_g.mag_exp() + 256)
    cur = nrep
    while kappa < cap:
        vals, cur = _eval_to_radius(cur, Q_j, kappa)
        x = vals[i].abs2_ball(kappa + 32)
        status, hi = _ball_diff_status(x, target_sq)
        if status == "distinct":
            return False
        gx = _ball_horner(g_coeffs, x, kappa + 32)
        if gx.mag_lower().man:
            # |value| is provably not a root modulus, and the target is
            return False
        if gx.mag_upper() < lb:
            # forced: |value|^2 is a root of g_full; compare against the
            # target root using the separation bound
            if hi < sep_g:
                return True
            if x.rad + target_sq.rad < sep_g:
                # both below half separation yet not overlapping
                return False
        kappa *= 2
    raise RuntimeError("modulus comparison failed to converge")


def group_by_modulus(nrep: NumericalKroneckerRep, target_root: IsolatedRoot,
                     coord_minpolys: Sequence[UPoly]) -> set:
    """Indices of the roots whose coordinate-wise moduli all equal the
    (real, positive) coordinates of the target root.

    coord_minpolys[j] must vanish at every j-th coordinate value, the
    target's included; the j-th coordinate is rep variable j in rep.vars
    order.  Raises HypothesisViolated if the target's coordinate modulus is
    provably not a root of its polynomial.
    """
    if target_root.kind != "real":
        raise ValueError("the torus target must be a real root")
    rep = nrep.rep
    names = list(rep.vars)[: len(coord_minpolys)]
    out = set(range(len(nrep.roots)))
    cur = nrep
    for j, phi in enumerate(coord_minpolys):
        phi = squarefree_part(phi)
        Q_j = rep.Q[names[j]]
        g_full = graeffe(phi)
        g_red = squarefree_part(g_full)
        lb = bounds(phi).modulus_product_lower_bound
        sep_g = bounds(g_red).root_separation if g_red.degree() > 1 \
            else Dyadic(1)
        kappa_t = max(48, -sep_g.mag_exp() + _height2(phi) + 8)
        vals, cur = _eval_to_radius(cur, Q_j, kappa_t)
        tval = vals[target_root.index]
        target_sq = tval.abs2_ball(kappa_t + 32)
        g_coeffs = [int(c) for c in g_full.coeffs]
        gt = _ball_horner(g_coeffs, target_sq, kappa_t + 32)
        if gt.mag_lower().man:
            raise HypothesisViolated(
                "target coordinate %s is provably not a root of its "
                "minimal polynomial" % names[j]
            )
        keep = set()
        for i in sorted(out):
            if i == target_root.index:
                keep.add(i)
                continue
            if _same_modulus(cur, i, target_sq, Q_j, g_full, sep_g, lb):
                keep.add(i)
        out = keep
        if out == {target_root.index}:
            break
    return out
