"""Dominant diagonal asymptotics of rational generating functions.

For F = G/H with H(0) != 0 the diagonal coefficients grow like

    f_{k,...,k} = (2*pi*k)^((1-n)/2) * sum_u A(u) sqrt(B(u)) C(u)^k * (1 + O(1/k))

where u runs over a set U of minimal critical points, encoded as roots of
one square-free integer polynomial P, and A, B, C are integer rational
functions of u.  This module finds the critical points through a Kronecker
representation, selects the minimal ones (two algorithms: one assuming
nonnegative series coefficients, one splitting into real and imaginary
parts and paying a larger system for it), and assembles certified ball
enclosures for the exponential growth and the leading constant.

Every inequality or equality used along the way is decided exactly, by
refining certified root enclosures against explicit separation and value
bounds; no decision rests on floating point.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Mapping

from .kronecker import (
    KroneckerRep,
    PositiveDimensional,
    _fresh,
    build_critical_system,
    build_extended_system,
    build_noncombinatorial_system,
    extend_rep,
    kronecker_solve,
    minimal_polynomial,
    reduce_to_factor,
)
from .numkron import (
    Ball,
    Dyadic,
    HypothesisViolated,
    _ball_diff_status,
    _div_floor,
    _div_up,
    _eval_to_radius,
    _sqrt_down,
    _sqrt_up,
    bounds,
    group_by_modulus,
    group_by_value,
    numeric_rep,
    pi_ball,
    sign_at_roots,
)
from .polycore import MPoly, PolyError, RatFun, UPoly, mpoly_gcd, upoly_gcd
from . import oracle

__all__ = [
    "AcsvFailure",
    "RunOptions",
    "CriticalData",
    "AsymptoticResult",
    "hessian_det_poly",
    "minimal_combinatorial",
    "minimal_noncombinatorial",
    "assemble_asymptotics",
    "run_acsv",
]

_ZERO = Dyadic(0)


class AcsvFailure(PolyError):
    """A named condition that stops the pipeline with a diagnosis.

    code is a stable machine-readable tag; detail explains the situation
    in plain language.  The pipeline never turns one of these into a
    numeric answer.
    """

    def __init__(self, code: str, detail: str):
        self.code = code
        self.detail = detail
        super().__init__(f"{code}: {detail}")

    def to_json(self) -> dict:
        return {"code": self.code, "detail": self.detail}


class _NeedMorePrecision(Exception):
    """Internal: a ball was too wide to decide; retry with more bits."""


@dataclass(frozen=True)
class RunOptions:
    """Knobs for run_acsv.

    combinatorial selects the minimality algorithm: True trusts that the
    series coefficients are eventually nonnegative (checked heuristically
    on the first heuristic_terms coefficients, with a warning on failure);
    the default False runs the slower algorithm that needs no sign
    assumption.  linear_form, when given, maps variable names to integer
    coefficients of the separating form tried first.  precision_out is
    the requested radius exponent of the output balls (radius below
    2**-precision_out).
    """

    combinatorial: bool = False
    linear_form: Mapping[str, int] | None = None
    seed: int = 0
    precision_out: int = 53
    heuristic_terms: int = 200


@dataclass(frozen=True)
class CriticalData:
    """Outcome of minimal-point selection.

    minimal_u holds indices into the canonically ordered roots of
    crit_rep.P; exactly one of extended_rep and noncomb_rep is set,
    recording which auxiliary system certified minimality.
    """

    crit_rep: KroneckerRep
    minimal_u: tuple
    extended_rep: KroneckerRep | None = None
    noncomb_rep: KroneckerRep | None = None
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class AsymptoticResult:
    """Certified dominant asymptotics of a diagonal.

    A, B, C are (numerator, denominator) pairs of integer polynomials in
    u, exact at every root of P listed in U.  leading_constant encloses
    (2*pi)^((1-n)/2) * sum_u A(u) sqrt(B(u)) and growth encloses |C(u)|,
    which is the same for every u in U.  contributions holds, per root of
    U and in the same order, balls for A(u) sqrt(B(u)) and for C(u), so
    oscillating dominant terms can be reproduced exactly as computed.
    """

    A: tuple
    B: tuple
    C: tuple
    P: UPoly
    U: tuple
    n: int
    leading_constant: Ball
    growth: Ball
    contributions: tuple
    critical: CriticalData

    def growth_float(self) -> float:
        return float(self.growth.re)

    def leading_constant_float(self) -> float:
        return float(self.leading_constant.re)

    def predicted_term(self, k: int) -> float:
        """Midpoint prediction of f_{k,...,k} keeping every contribution,
        so conjugate pairs produce their genuine oscillation."""
        if k < 1:
            raise ValueError("k must be positive")
        total = 0j
        for amp, cval in self.contributions:
            a = complex(float(amp.re), float(amp.im))
            c = complex(float(cval.re), float(cval.im))
            total += a * c**k
        return (total * (2 * math.pi * k) ** ((1 - self.n) / 2)).real

    def to_json(self) -> dict:
        return {
            "P": self.P.to_json(),
            "A": {"num": self.A[0].to_json(), "den": self.A[1].to_json()},
            "B": {"num": self.B[0].to_json(), "den": self.B[1].to_json()},
            "C": {"num": self.C[0].to_json(), "den": self.C[1].to_json()},
            "U": [r.to_json() for r in self.U],
            "n": self.n,
            "growth": _ball_json(self.growth),
            "leading_constant": _ball_json(self.leading_constant),
            "failure": None,
        }


def _ball_json(b: Ball) -> dict:
    return {
        "center_re": b.re.to_json(),
        "center_im": b.im.to_json(),
        "radius": b.rad.to_json(),
    }


# ---------------------------------------------------------------------------
# the direction Hessian determinant


def hessian_det_poly(h: MPoly) -> MPoly:
    """Determinant controlling the square-root factor of the expansion.

    The singular set near a critical point is parametrized by the first
    n-1 coordinates; the determinant of the second-order behaviour of the
    resulting phase, cleared of denominators, is a polynomial in the
    original variables and the multiplier variable of
    build_critical_system.  B(u) equals lam^(n-1) divided by its value.
    """
    zv = h.vars
    n = len(zv)
    if n < 2:
        raise ValueError("need at least two variables")
    lam = _fresh("lam", zv)
    allv = zv + (lam,)
    lam_p = MPoly.var(lam, allv)

    def scaled_second(i: int, j: int) -> MPoly:
        p = h.partial(zv[i]).partial(zv[j])
        return (MPoly.var(zv[i], zv) * MPoly.var(zv[j], zv) * p).with_vars(
            allv
        )

    last = n - 1
    corner = scaled_second(last, last)
    mixed = [scaled_second(i, last) for i in range(last)]
    rows = []
    for i in range(last):
        row = []
        for j in range(last):
            if i == j:
                e = scaled_second(i, i) + corner + 2 * lam_p - 2 * mixed[i]
            else:
                e = scaled_second(i, j) + corner + lam_p - mixed[i] - mixed[j]
            row.append(e)
        rows.append(row)
    return _matrix_det(rows)


def _matrix_det(rows: list) -> MPoly:
    k = len(rows)
    if k == 1:
        return rows[0][0]
    det = None
    for j in range(k):
        if rows[0][j].is_zero:
            continue
        minor = [[r[c] for c in range(k) if c != j] for r in rows[1:]]
        term = rows[0][j] * _matrix_det(minor)
        if j % 2:
            term = -term
        det = term if det is None else det + term
    return det if det is not None else MPoly.const(0, rows[0][0].vars)


# ---------------------------------------------------------------------------
# shared decision helpers


def _refine_partition(classes: list, partition: list) -> list:
    """Intersect a partition of some indices with a partition of all."""
    cell = {}
    for ci, cls in enumerate(partition):
        for i in cls:
            cell[i] = ci
    out = []
    for cls in classes:
        by: dict = {}
        for i in cls:
            by.setdefault(cell[i], []).append(i)
        out.extend(sorted(by.values()))
    return out


def _coordinate_minpolys(rep: KroneckerRep, names) -> list:
    return [minimal_polynomial(rep, rep.Q[v]) for v in names]


def _separation_kappa(phi: UPoly) -> tuple:
    if phi.degree() <= 1:
        sep = Dyadic(1)
    else:
        sep = bounds(phi).root_separation
    return sep, -sep.mag_exp() + 8


def _match_point(src_n, src_idx: int, src_qs, dst_n, dst_qs, phis) -> tuple:
    """Index of the unique dst root whose coordinates equal the point
    parametrized at src root src_idx.

    src_qs[j] is either one numerator polynomial (a plain value) or a
    (real, imaginary) pair to be combined; both the source value and every
    dst value are roots of phis[j], so overlap below that polynomial's
    root separation certifies equality and disjointness certifies
    inequality.  Returns (index, refined src, refined dst).
    """
    candidates = None
    for j, phi in enumerate(phis):
        sep, kappa = _separation_kappa(phi)
        q = src_qs[j]
        if isinstance(q, tuple):
            va, src_n = _eval_to_radius(src_n, q[0], kappa + 1)
            vb, src_n = _eval_to_radius(src_n, q[1], kappa + 1)
            re_part, im_part = va[src_idx], vb[src_idx]
            sval = Ball(re_part.re, im_part.re, re_part.rad + im_part.rad)
        else:
            vs, src_n = _eval_to_radius(src_n, q, kappa)
            sval = vs[src_idx]
        dvals, dst_n = _eval_to_radius(dst_n, dst_qs[j], kappa)
        here = set()
        for i, dv in enumerate(dvals):
            status, hi = _ball_diff_status(sval, dv)
            if status == "overlap" and hi < sep:
                here.add(i)
        candidates = here if candidates is None else (candidates & here)
        if not candidates:
            break
    if candidates is None or len(candidates) != 1:
        raise RuntimeError(
            "coordinate matching found %d candidate roots instead of one"
            % (0 if not candidates else len(candidates))
        )
    return candidates.pop(), src_n, dst_n


def _project_numerator(g: MPoly, zv) -> MPoly:
    """Rebuild g over exactly the variables zv, dropping unused ones."""
    if g.vars == tuple(zv):
        return g
    out = MPoly.const(0, zv)
    for exps, coef in g.terms.items():
        mono = MPoly.const(coef, zv)
        for v, e in zip(g.vars, exps):
            if e:
                mono = mono * MPoly.var(v, zv) ** e
        out = out + mono
    return out


def _approx_point(nx, rep: KroneckerRep, names, idx: int) -> str:
    parts = []
    for v in names:
        vals, nx = _eval_to_radius(nx, rep.Q[v], 40)
        b = vals[idx]
        if b.im.man == 0:
            parts.append("%.6g" % float(b.re))
        else:
            parts.append("%.6g%+.6gi" % (float(b.re), float(b.im)))
    return "(" + ", ".join(parts) + ")"


# ---------------------------------------------------------------------------
# minimal-point selection, combinatorial case


def minimal_combinatorial(
    h: MPoly, crit: KroneckerRep, ext: KroneckerRep
) -> CriticalData:
    """Minimal critical points when the series has nonnegative coefficients.

    There is then a minimal critical point with positive real coordinates,
    and a positive critical point is minimal exactly when no point of the
    singular set lies strictly between it and the origin on its ray; the
    extended representation carries, for each critical point z, every
    scalar t with H(t*z) = 0, so the test reads the t values off its
    roots.  The full answer is the torus class of the positive minimal
    point inside the critical representation.

    Raises AcsvFailure with code NoPositiveCandidate, MultipleCandidates
    or LambdaZero.
    """
    zv = h.vars
    n = len(zv)
    lam_name = crit.vars[n]
    t_name = ext.vars[n + 1]
    enx = numeric_rep(ext)
    keep = set(range(len(enx.roots)))
    for v in zv:
        reports = sign_at_roots(enx, ext.Q[v])
        keep = {i for i in keep if reports[i].is_positive}
        if not keep:
            break
    if not keep:
        raise AcsvFailure(
            "NoPositiveCandidate",
            "no solution of the extended critical system has all "
            "coordinates real and positive",
        )
    classes = [sorted(keep)]
    for v in zv:
        classes = _refine_partition(classes, group_by_value(enx, ext.Q[v]))
    t_reports = sign_at_roots(enx, ext.Q[t_name])
    survivors = [
        cls
        for cls in classes
        if not any(t_reports[i].in_unit_interval for i in cls)
    ]
    if not survivors:
        raise AcsvFailure(
            "NoPositiveCandidate",
            "every positive critical point has a singular point strictly "
            "between itself and the origin",
        )
    if len(survivors) > 1:
        pts = "; ".join(
            _approx_point(enx, ext, zv, cls[0]) for cls in survivors
        )
        raise AcsvFailure(
            "MultipleCandidates",
            "several positive critical points pass the segment test: "
            + pts,
        )
    member = survivors[0][0]
    if sign_at_roots(enx, ext.Q[lam_name])[member].is_zero:
        raise AcsvFailure(
            "LambdaZero",
            "the critical-point multiplier vanishes at the minimal point, "
            "so the expansion formulas break down",
        )
    cnx = numeric_rep(crit)
    phis = _coordinate_minpolys(crit, zv)
    target, enx, cnx = _match_point(
        enx, member, [ext.Q[v] for v in zv], cnx, [crit.Q[v] for v in zv],
        phis,
    )
    torus = group_by_modulus(cnx, cnx.roots[target], phis)
    diag = {
        "extended_degree": ext.degree,
        "positive_roots": len(keep),
        "positive_points": len(classes),
        "minimal_point_index": target,
        "torus_points": len(torus),
    }
    return CriticalData(
        crit_rep=crit,
        minimal_u=tuple(sorted(torus)),
        extended_rep=ext,
        diagnostics=diag,
    )


# ---------------------------------------------------------------------------
# minimal-point selection, general case


def minimal_noncombinatorial(
    h: MPoly, crit: KroneckerRep, gen: KroneckerRep
) -> CriticalData:
    """Minimal critical points with no sign assumption on the series.

    gen must represent the real/imaginary witness system of
    build_noncombinatorial_system: its real solutions pair a critical
    point a+ib with a point of the singular set whose coordinate moduli
    are those of a+ib scaled by sqrt(t).  A critical point is discarded
    when any witness has t strictly inside (0, 1); the survivors must be
    nonzero in every coordinate, carry a nonzero multiplier, and lie on a
    single common torus.

    Raises AcsvFailure with code Empty, ZeroCoordinate, LambdaZero or
    MixedTori.
    """
    zv = h.vars
    n = len(zv)
    gv = gen.vars
    a_names, b_names = gv[:n], gv[n: 2 * n]
    lamre_name, lamim_name = gv[4 * n], gv[4 * n + 1]
    t_name = gv[4 * n + 2]
    gnx = numeric_rep(gen)
    real_idx = sorted(gnx.real_indices())
    if not real_idx:
        raise AcsvFailure(
            "Empty",
            "the witness system has no real solutions, so no critical "
            "point can be certified minimal",
        )
    classes = [real_idx]
    for v in list(a_names) + list(b_names):
        classes = _refine_partition(classes, group_by_value(gnx, gen.Q[v]))
    a_reports = [sign_at_roots(gnx, gen.Q[v]) for v in a_names]
    b_reports = [sign_at_roots(gnx, gen.Q[v]) for v in b_names]
    for cls in classes:
        m = cls[0]
        for j in range(n):
            if a_reports[j][m].is_zero and b_reports[j][m].is_zero:
                raise AcsvFailure(
                    "ZeroCoordinate",
                    "a critical point has coordinate %s equal to zero, "
                    "which the minimality test cannot handle" % zv[j],
                )
    t_reports = sign_at_roots(gnx, gen.Q[t_name])
    survivors = [
        cls
        for cls in classes
        if not any(t_reports[i].in_unit_interval for i in cls)
    ]
    if not survivors:
        raise AcsvFailure(
            "Empty",
            "every critical point has a witness strictly closer to the "
            "origin in coordinate moduli; no minimal critical point "
            "exists",
        )
    lamre_reports = sign_at_roots(gnx, gen.Q[lamre_name])
    lamim_reports = sign_at_roots(gnx, gen.Q[lamim_name])
    for cls in survivors:
        m = cls[0]
        if lamre_reports[m].is_zero and lamim_reports[m].is_zero:
            raise AcsvFailure(
                "LambdaZero",
                "the critical-point multiplier vanishes at a minimal "
                "point, so the expansion formulas break down",
            )
    taken = set(gen.Q)
    mod_names = []
    mod_values = {}
    for v, av, bv in zip(zv, a_names, b_names):
        nm = _fresh("sq" + v, taken)
        taken.add(nm)
        mod_names.append(nm)
        ap, bp = MPoly.var(av), MPoly.var(bv)
        mod_values[nm] = ap * ap + bp * bp
    gext = extend_rep(gen, mod_values)
    gexn = numeric_rep(gext)
    torus_classes = [sorted(cls[0] for cls in survivors)]
    for nm in mod_names:
        torus_classes = _refine_partition(
            torus_classes, group_by_value(gexn, gext.Q[nm])
        )
    if len(torus_classes) > 1:
        raise AcsvFailure(
            "MixedTori",
            "the minimal critical points lie on %d distinct tori, so no "
            "single exponential scale dominates" % len(torus_classes),
        )
    cnx = numeric_rep(crit)
    phis = _coordinate_minpolys(crit, zv)
    matched = set()
    for cls in survivors:
        qs = [(gen.Q[a_names[j]], gen.Q[b_names[j]]) for j in range(n)]
        target, gnx, cnx = _match_point(
            gnx, cls[0], qs, cnx, [crit.Q[v] for v in zv], phis
        )
        matched.add(target)
    if len(matched) != len(survivors):
        raise RuntimeError(
            "two distinct minimal points matched the same critical root"
        )
    diag = {
        "witness_degree": gen.degree,
        "real_witnesses": len(real_idx),
        "critical_points_tested": len(classes),
        "minimal_points": len(survivors),
    }
    return CriticalData(
        crit_rep=crit,
        minimal_u=tuple(sorted(matched)),
        noncomb_rep=gen,
        diagnostics=diag,
    )


# ---------------------------------------------------------------------------
# certified square roots

# _sqrt_up and _sqrt_down from numkron carry a fixed ~32 significant bits,
# enough for decisions but not for output enclosures whose radius must
# drop below a requested 2**-kappa; these variants take the precision.


def _sqrt_down_w(x: Dyadic, w: int) -> Dyadic:
    if x.man <= 0:
        return _ZERO
    man, exp = x.man, x.exp
    pad = max(2 * w + 2 - man.bit_length(), 0)
    pad += (exp - pad) & 1
    man <<= pad
    exp -= pad
    return Dyadic(math.isqrt(man), exp >> 1)


def _sqrt_up_w(x: Dyadic, w: int) -> Dyadic:
    if x.man <= 0:
        return _ZERO
    man, exp = x.man, x.exp
    pad = max(2 * w + 2 - man.bit_length(), 0)
    pad += (exp - pad) & 1
    man <<= pad
    exp -= pad
    r = math.isqrt(man)
    if r * r < man:
        r += 1
    return Dyadic(r, exp >> 1)


def _half(d: Dyadic) -> Dyadic:
    return Dyadic(d.man, d.exp - 1)


def _div_down(n: Dyadic, d: Dyadic, w: int) -> Dyadic:
    return _div_floor(n, d, w)[0]


def _interval_ball(lo: Dyadic, hi: Dyadic, imaginary: bool = False) -> Ball:
    center = _half(lo + hi)
    rad = _half(hi - lo)
    if imaginary:
        return Ball(_ZERO, center, rad)
    return Ball(center, _ZERO, rad)


def _real_sqrt_signed(b: Ball, w: int):
    """Square root of a real ball: real for positive values, imaginary
    (principal branch) for negative ones, None while the sign is open."""
    lo = b.re - b.rad
    hi = b.re + b.rad
    if lo.sign() > 0:
        return _interval_ball(_sqrt_down_w(lo, w), _sqrt_up_w(hi, w))
    if hi.sign() < 0:
        return _interval_ball(
            _sqrt_down_w(-hi, w), _sqrt_up_w(-lo, w), imaginary=True
        )
    return None


def _principal_sqrt_ball(z: Ball, w: int):
    """Principal square root of a complex ball that avoids the closed
    negative real axis; None when the ball still meets it (refine and
    retry).  The center is enclosed through the half-angle formulas and
    the rest of the ball through the derivative bound 1/(2 sqrt|z|)."""
    lo_mag = z.mag_lower()
    if lo_mag.man == 0:
        return None
    im_lo = z.im - z.rad
    im_hi = z.im + z.rad
    if im_lo.sign() <= 0 <= im_hi.sign() and (z.re - z.rad).sign() <= 0:
        return None
    x, y = z.re, z.im
    m2 = x * x + y * y
    sx_lo = _half(_sqrt_down_w(m2, w) + x)
    sx_hi = _half(_sqrt_up_w(m2, w) + x)
    if sx_lo.sign() <= 0:
        return None
    g_lo, g_hi = _sqrt_down_w(sx_lo, w), _sqrt_up_w(sx_hi, w)
    if y.man == 0:
        d_lo = d_hi = _ZERO
    elif y.sign() > 0:
        d_lo = _div_down(_half(y), g_hi, w)
        d_hi = _div_up(_half(y), g_lo, w)
    else:
        d_lo = -_div_up(_half(-y), g_lo, w)
        d_hi = -_div_down(_half(-y), g_hi, w)
    rad = _half(g_hi - g_lo) + _half(d_hi - d_lo)
    if z.rad.man:
        rad = rad + _div_up(z.rad, Dyadic(2) * _sqrt_down(lo_mag))
    return Ball(_half(g_lo + g_hi), _half(d_lo + d_hi), rad.ceil_to(32))


def _ball_pow(b: Ball, k: int, w: int) -> Ball:
    out = Ball.from_int(1)
    for _ in range(k):
        out = out.mul(b, w)
    return out


def _mag_ball(b: Ball, w: int) -> Ball:
    """Real ball containing |z| over z in b, tight to ~w bits."""
    if b.im.man == 0:
        lo = abs(b.re) - b.rad
        hi = abs(b.re) + b.rad
        if lo.sign() < 0:
            lo = _ZERO
        return _interval_ball(lo, hi)
    a2 = b.abs2_ball(w)
    lo2 = a2.re - a2.rad
    hi2 = a2.re + a2.rad
    lo = _sqrt_down_w(lo2, w) if lo2.sign() > 0 else _ZERO
    return _interval_ball(lo, _sqrt_up_w(hi2, w))


def _rad_ok(b: Ball, kappa: int) -> bool:
    return b.rad.man == 0 or b.rad.mag_exp() <= -kappa


# ---------------------------------------------------------------------------
# assembling the expansion


def assemble_asymptotics(
    g: MPoly, h: MPoly, crit_data: CriticalData, kappa_out: int = 53
) -> AsymptoticResult:
    """Expansion data at the minimal critical points of crit_data.

    Extends the critical representation with the direction Hessian
    determinant, the coordinate product and the negated numerator, reads
    A, B, C off the new columns, and tightens ball enclosures until the
    growth and the leading constant have radius below 2**-kappa_out.
    Conjugate pairs in U share one square-root branch choice, the
    principal one, so their contributions stay conjugate and the sum
    stays real.

    Raises AcsvFailure with code DegenerateHessian, NumeratorVanishes or
    LambdaZero.
    """
    zv = h.vars
    n = len(zv)
    if n < 2:
        raise ValueError("need at least two variables")
    rep = crit_data.crit_rep
    u_idx = sorted(crit_data.minimal_u)
    if not u_idx:
        raise ValueError("crit_data lists no minimal points")
    lam_name = rep.vars[n]
    hess = hessian_det_poly(h)
    if hess.vars[-1] != lam_name:
        hess = hess.rename_vars({hess.vars[-1]: lam_name})
    tprod = MPoly.const(1, zv)
    for v in zv:
        tprod = tprod * MPoly.var(v, zv)
    gneg = -_project_numerator(g, zv)
    taken = set(rep.Q)
    h_name = _fresh("hess", taken)
    taken.add(h_name)
    t_name = _fresh("tprod", taken)
    taken.add(t_name)
    g_name = _fresh("gnum", taken)
    ext2 = extend_rep(rep, {h_name: hess, t_name: tprod, g_name: gneg})
    nx = numeric_rep(ext2)
    q_lam, q_h = ext2.Q[lam_name], ext2.Q[h_name]
    q_t, q_g = ext2.Q[t_name], ext2.Q[g_name]

    lam_reports = sign_at_roots(nx, q_lam)
    if any(lam_reports[i].is_zero for i in u_idx):
        raise AcsvFailure(
            "LambdaZero",
            "the critical-point multiplier vanishes at a minimal point, "
            "so the expansion formulas break down",
        )
    hess_reports = sign_at_roots(nx, q_h)
    if any(hess_reports[i].is_zero for i in u_idx):
        raise AcsvFailure(
            "DegenerateHessian",
            "the direction Hessian determinant vanishes at a minimal "
            "critical point, so the saddle-point expansion does not "
            "apply",
        )
    g_reports = sign_at_roots(nx, q_g)
    if all(g_reports[i].is_zero for i in u_idx):
        raise AcsvFailure(
            "NumeratorVanishes",
            "the numerator vanishes at every minimal critical point; the "
            "dominant term is zero and a deeper expansion would be "
            "needed",
        )
    t_reports = sign_at_roots(nx, q_t)
    if any(t_reports[i].is_zero for i in u_idx):
        raise RuntimeError("coordinate product vanished at a minimal point")

    dp = ext2.P.derivative()
    a_pair = _normalize_pair(q_g, q_lam)
    b_pair = _normalize_pair(q_lam ** (n - 1), q_h * dp ** (n - 2))
    c_pair = _normalize_pair(dp, q_t)
    p_out = ext2.P.primitive()
    if p_out.lc() < 0:
        p_out = -p_out

    sep_p, pair_kappa = _separation_kappa(p_out)
    nx = nx.refined(pair_kappa)
    conj_of = _conjugate_pairing(nx, u_idx, sep_p)

    kappa = max(kappa_out + 32, pair_kappa)
    kappa_cap = max(1 << 13, 64 * kappa)
    while True:
        try:
            growth, lead, contribs, nx = _evaluate_expansion(
                nx, u_idx, conj_of, q_g, q_lam, q_h, q_t, n, kappa
            )
        except _NeedMorePrecision:
            if 2 * kappa > kappa_cap:
                raise HypothesisViolated(
                    "ball refinement hit its precision cap before every "
                    "square-root branch could be resolved; a value may "
                    "lie exactly on the negative real axis"
                )
            kappa *= 2
            continue
        if _rad_ok(growth, kappa_out) and _rad_ok(lead, kappa_out):
            break
        kappa *= 2

    return AsymptoticResult(
        A=a_pair,
        B=b_pair,
        C=c_pair,
        P=p_out,
        U=tuple(nx.roots[i] for i in u_idx),
        n=n,
        leading_constant=lead,
        growth=growth,
        contributions=contribs,
        critical=crit_data,
    )


def _normalize_pair(num: UPoly, den: UPoly) -> tuple:
    if den.is_zero:
        raise ValueError("zero denominator in an output pair")
    g = math.gcd(num.content(), den.content())
    if g > 1:
        num = UPoly([c // g for c in num.coeffs])
        den = UPoly([c // g for c in den.coeffs])
    if den.lc() < 0:
        num, den = -num, -den
    return (num, den)


def _conjugate_pairing(nx, u_idx: list, sep: Dyadic) -> dict:
    """Map each minimal root to its conjugate inside u_idx (itself when
    real).  Conjugating a root of an integer polynomial gives another
    root, so overlap below the root separation identifies the partner."""
    out = {}
    for i in u_idx:
        r = nx.roots[i]
        if r.kind == "real":
            out[i] = i
            continue
        mirrored = Ball(r.center_re, -r.center_im, r.radius)
        match = None
        for j in u_idx:
            s = nx.roots[j]
            if s.kind == "real":
                continue
            status, hi = _ball_diff_status(mirrored, s.ball())
            if status == "overlap" and hi < sep:
                match = j
                break
        if match is None:
            raise HypothesisViolated(
                "the set of minimal critical points is not closed under "
                "conjugation"
            )
        out[i] = match
    return out


def _evaluate_expansion(nx, u_idx, conj_of, q_g, q_lam, q_h, q_t, n, kappa):
    w = kappa + 64
    vg, nx = _eval_to_radius(nx, q_g, kappa)
    vl, nx = _eval_to_radius(nx, q_lam, kappa)
    vh, nx = _eval_to_radius(nx, q_h, kappa)
    vt, nx = _eval_to_radius(nx, q_t, kappa)
    one = Ball.from_int(1)

    growth = None
    cvals = {}
    for i in u_idx:
        c_i = one.div(vt[i], w)
        if c_i is None:
            raise _NeedMorePrecision
        cvals[i] = c_i
        mag = _mag_ball(c_i, w)
        if growth is None:
            growth = mag
        else:
            status, _ = _ball_diff_status(growth, mag)
            if status == "distinct":
                raise RuntimeError(
                    "minimal points produced provably different growth "
                    "moduli"
                )
            if mag.rad < growth.rad:
                growth = mag

    amps = {}
    for i in u_idx:
        if i in amps:
            continue
        a_i = vg[i].div(vl[i], w)
        if a_i is None:
            raise _NeedMorePrecision
        b_i = _ball_pow(vl[i], n - 1, w).div(vh[i], w)
        if b_i is None:
            raise _NeedMorePrecision
        j = conj_of[i]
        if j == i:
            root_b = _real_sqrt_signed(b_i, w)
            if root_b is None:
                raise _NeedMorePrecision
            amps[i] = a_i.mul(root_b, w)
        else:
            root_b = _principal_sqrt_ball(b_i, w)
            if root_b is None:
                raise _NeedMorePrecision
            amp = a_i.mul(root_b, w)
            amps[i] = amp
            amps[j] = Ball(amp.re, -amp.im, amp.rad)

    total = None
    for i in u_idx:
        total = amps[i] if total is None else total.add(amps[i], w)
    factor = _two_pi_factor(n, w)
    if factor is None:
        raise _NeedMorePrecision
    lead = total.mul(factor, w)
    contribs = tuple((amps[i], cvals[i]) for i in u_idx)
    return growth, lead, contribs, nx


def _two_pi_factor(n: int, w: int):
    """(2*pi)^((1-n)/2) as a real ball, or None at too little precision."""
    pib = pi_ball(w)
    two_pi = Ball(
        Dyadic(pib.re.man, pib.re.exp + 1),
        _ZERO,
        Dyadic(pib.rad.man, pib.rad.exp + 1),
    )
    power = n - 1
    if power % 2 == 0:
        base = _ball_pow(two_pi, power // 2, w)
    else:
        full = _ball_pow(two_pi, power, w)
        lo = full.re - full.rad
        if lo.sign() <= 0:
            return None
        base = _interval_ball(*_real_interval_sqrt(lo, full.re + full.rad))
    return Ball.from_int(1).div(base, w)


# ---------------------------------------------------------------------------
# the full pipeline


def run_acsv(g: MPoly, h: MPoly, options: RunOptions | None = None):
    """Dominant diagonal asymptotics of G/H, or a structured failure.

    Returns an AsymptoticResult on success and an AcsvFailure value (not
    raised) when a named condition stops the pipeline; genuine usage
    errors (univariate input, numerator variables outside the
    denominator's) raise ValueError.
    """
    if options is None:
        options = RunOptions()
    zv = h.vars
    if len(zv) < 2 or h.is_constant():
        raise ValueError(
            "the pipeline needs at least two variables; univariate "
            "asymptotics follow from partial fractions instead"
        )
    stray = [v for v in g.vars if g.degree_in(v) > 0 and v not in zv]
    if stray:
        raise ValueError(
            "numerator uses variables %s that the denominator lacks"
            % ", ".join(sorted(stray))
        )
    g = _project_numerator(g, zv)
    try:
        if h.constant_term() == 0:
            raise AcsvFailure(
                "OriginSingular",
                "the denominator vanishes at the origin, so the power "
                "series of G/H is not defined",
            )
        if g.is_zero:
            raise AcsvFailure(
                "NumeratorVanishes", "the numerator is identically zero"
            )
        common = mpoly_gcd(g, h)
        if not common.is_constant():
            raise AcsvFailure(
                "NotCoprime",
                "numerator and denominator share the factor %s; reduce "
                "the fraction first" % common,
            )
        if options.combinatorial and not oracle.heuristic_nonnegative(
            RatFun(g, h), options.heuristic_terms
        ):
            warnings.warn(
                "a negative series coefficient appears among the first "
                "%d; the combinatorial assumption looks wrong and the "
                "minimality certificate may not apply"
                % options.heuristic_terms,
                stacklevel=2,
            )
        hint = dict(options.linear_form) if options.linear_form else None
        if options.combinatorial:
            data = _combinatorial_pipeline(h, hint, options.seed)
        else:
            data = _noncombinatorial_pipeline(h, hint, options.seed)
        return assemble_asymptotics(
            g, h, data, kappa_out=options.precision_out
        )
    except AcsvFailure as fail:
        return fail
    except PositiveDimensional as exc:
        return AcsvFailure(
            "NotFinite",
            "a critical-point system has infinitely many solutions: %s"
            % exc,
        )


def _combinatorial_pipeline(h: MPoly, hint, seed: int) -> CriticalData:
    crit_sys = build_critical_system(h)
    ext_sys = build_extended_system(h)
    t_name = ext_sys.vars[-1]
    if hint is not None:
        unknown = set(hint) - set(ext_sys.vars)
        if unknown:
            raise ValueError(
                "linear form uses unknown variables: %s" % sorted(unknown)
            )
    if hint is not None and all(v in crit_sys.vars for v in hint):
        crit = kronecker_solve(crit_sys, u_hint=hint, seed=seed)
        ext_hint = dict(hint)
        ext_hint[t_name] = 1
        ext = kronecker_solve(
            ext_sys, u_hint=ext_hint, seed=seed, require_vars=(t_name,)
        )
    else:
        ext = kronecker_solve(
            ext_sys, u_hint=hint, seed=seed, require_vars=(t_name,)
        )
        crit = _restrict_to_unit_dilation(ext, t_name)
    return minimal_combinatorial(h, crit, ext)


def _noncombinatorial_pipeline(h: MPoly, hint, seed: int) -> CriticalData:
    crit_sys = build_critical_system(h)
    crit_hint = (
        hint if hint and all(v in crit_sys.vars for v in hint) else None
    )
    crit = kronecker_solve(crit_sys, u_hint=crit_hint, seed=seed)
    gen = kronecker_solve(build_noncombinatorial_system(h), seed=seed)
    return minimal_noncombinatorial(h, crit, gen)


def _restrict_to_unit_dilation(ext: KroneckerRep, t_name: str):
    """Critical representation carved out of the extended one: keep the
    roots whose dilation value equals one (t = Q_t/P' means P' - Q_t
    vanishes exactly there)."""
    keep = upoly_gcd(ext.P, ext.P.derivative() - ext.Q[t_name])
    if keep.degree() < 1:
        raise AcsvFailure(
            "NoPositiveCandidate", "the critical system has no solutions"
        )
    return reduce_to_factor(ext, keep)
