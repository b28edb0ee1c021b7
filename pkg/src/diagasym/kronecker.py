"""Polynomial systems for diagonal asymptotics and their exact solution data.

Three builders produce the square systems the pipeline needs: the critical
system (denominator plus one Euler-derivative equation per variable), the
extended system (critical system plus the denominator with every variable
scaled by a fresh parameter), and the real/imaginary split system used when
the positivity shortcut is unavailable.

kronecker_solve turns such a system with finitely many solutions into a
Kronecker representation: a square-free P in Z[u] together with one integer
polynomial Q_v per variable so that the solutions are exactly
z_v = Q_v(u)/P'(u) as u runs over the roots of P.  The solver runs Buchberger
plus quotient-algebra linear algebra modulo word-sized primes, assembles the
rational coefficients by Chinese remaindering with rational reconstruction,
and certifies the assembled data exactly over Z before returning it: P is
proved square-free, every system polynomial vanishes at the parametrized
points modulo P, and the chosen linear form reproduces u.

The remaining operations stay inside Z[u]: parametrize_value expresses any
polynomial in the system variables in the same Q/P' form, minimal_polynomial
computes an integer polynomial vanishing exactly on those values (a resultant,
done by modular evaluation-interpolation with a rigorous prime count),
reduce_to_factor restricts a representation to a factor of P, and
bound_C/bound_H evaluate the degree/height bounds used to size computations.
"""

from __future__ import annotations

import math
import random
from typing import Iterable, Mapping, Sequence

from gmpy2 import lcm as _ilcm, mpq

from . import _modpoly as modp
from ._groebner import NotZeroDimensional, SystemSolver
from .polycore import (
    MPoly,
    PolyError,
    SingularOrigin,
    UPoly,
    int_from_json,
    int_to_json,
    is_squarefree,
    real_imag_split,
    squarefree_part,
)

_PRIME_START = 33554393  # largest prime below 2^25; keeps int64 matvecs safe


class SolveError(PolyError):
    """Base class for failures while building a Kronecker representation."""


class PositiveDimensional(SolveError):
    """The solution set is not finite."""


class SeparationFailure(SolveError):
    """No tried linear form took distinct values on all solutions."""


class NotAFactor(SolveError):
    """The given polynomial does not divide P."""


class VerificationError(SolveError):
    """The assembled representation failed its exact certification."""


# ---------------------------------------------------------------------------
# systems


class PolySystem:
    """A polynomial system with an ordered variable list and optional blocks.

    block_structure maps block names to tuples of variable names; the blocks
    partition vars in order.  The degree/height helpers feed bound_C/bound_H.
    """

    __slots__ = ("vars", "polys", "block_structure")

    def __init__(self, vars, polys, block_structure=None):
        self.vars = tuple(vars)
        self.polys = tuple(p.with_vars(self.vars) for p in polys)
        if block_structure is not None:
            block_structure = dict(block_structure)
            flat = tuple(v for blk in block_structure.values() for v in blk)
            if flat != self.vars:
                raise ValueError("blocks must partition the variables in order")
        self.block_structure = block_structure

    @property
    def is_square(self) -> bool:
        return len(self.polys) == len(self.vars)

    def blocks(self) -> dict:
        if self.block_structure is not None:
            return self.block_structure
        return {"all": self.vars}

    def degree_matrix(self) -> list[tuple[int, ...]]:
        """Per polynomial, the total degree in each block's variables."""
        blocks = list(self.blocks().values())
        positions = [
            tuple(self.vars.index(v) for v in blk) for blk in blocks
        ]
        rows = []
        for p in self.polys:
            row = []
            for pos in positions:
                d = 0
                for e in p.terms:
                    d = max(d, sum(e[i] for i in pos))
                row.append(d)
            rows.append(tuple(row))
        return rows

    def eta_vector(self) -> list[int]:
        """Per polynomial, height in bits plus the block-degree log terms."""
        blocks = list(self.blocks().values())
        dmat = self.degree_matrix()
        out = []
        for p, row in zip(self.polys, dmat):
            eta = float(p.height())
            for blk, d in zip(blocks, row):
                eta += math.log2(1 + len(blk)) * d
            out.append(math.ceil(eta))
        return out

    def __repr__(self):
        return f"PolySystem({len(self.polys)} polys in {', '.join(self.vars)})"


def _fresh(base: str, taken) -> str:
    name = base
    while name in taken:
        name += "_"
    return name


def _check_denominator(h: MPoly) -> None:
    if h.constant_term() == 0:
        raise SingularOrigin("denominator vanishes at the origin")
    if h.is_constant():
        raise ValueError("denominator has no variables")


def build_critical_system(h: MPoly) -> PolySystem:
    """The denominator together with z_j * dH/dz_j - lam for every variable."""
    _check_denominator(h)
    zv = h.vars
    lam = _fresh("lam", zv)
    lam_poly = MPoly.var(lam)
    polys = [h]
    for v in zv:
        polys.append(MPoly.var(v) * h.partial(v) - lam_poly)
    return PolySystem(
        zv + (lam,), polys, block_structure={"z": zv, "lam": (lam,)}
    )


def build_extended_system(h: MPoly) -> PolySystem:
    """Critical system plus the denominator with every variable scaled by t."""
    crit = build_critical_system(h)
    t = _fresh("t", crit.vars)
    blocks = dict(crit.block_structure)
    blocks["t"] = (t,)
    return PolySystem(
        crit.vars + (t,), list(crit.polys) + [h.dilate(t)], blocks
    )


def build_noncombinatorial_system(h: MPoly) -> PolySystem:
    """Real/imaginary split system tying a critical point to a torus point.

    Variables: (a, b) the critical point's real and imaginary parts, (x, y)
    a second point on the singular set, two multipliers for the split
    critical equations, the squared-modulus ratio t between the points, and
    a tangency multiplier for the last equation block.  4n+4 equations in
    4n+4 variables.
    """
    _check_denominator(h)
    zv = h.vars
    n = len(zv)
    taken = set(zv)

    def prefixed(prefix):
        while any(prefix + v in taken for v in zv):
            prefix += "_"
        names = tuple(prefix + v for v in zv)
        taken.update(names)
        return names

    a_names = prefixed("a")
    b_names = prefixed("b")
    x_names = prefixed("x")
    y_names = prefixed("y")
    lam_re = _fresh("lamre", taken)
    taken.add(lam_re)
    lam_im = _fresh("lamim", taken)
    taken.add(lam_im)
    t = _fresh("t", taken)
    taken.add(t)
    nu = _fresh("nu", taken)

    hre, him = real_imag_split(h, x_names, y_names)
    to_ab = dict(zip(x_names + y_names, a_names + b_names))
    lam_re_p = MPoly.var(lam_re)
    lam_im_p = MPoly.var(lam_im)
    t_p = MPoly.var(t)
    nu_p = MPoly.var(nu)

    polys = [hre.rename_vars(to_ab), him.rename_vars(to_ab)]
    for j in range(n):
        aj, bj = MPoly.var(a_names[j]), MPoly.var(b_names[j])
        dre_x = hre.partial(x_names[j]).rename_vars(to_ab)
        dre_y = hre.partial(y_names[j]).rename_vars(to_ab)
        polys.append(aj * dre_x + bj * dre_y - lam_re_p)
    for j in range(n):
        aj, bj = MPoly.var(a_names[j]), MPoly.var(b_names[j])
        dim_x = him.partial(x_names[j]).rename_vars(to_ab)
        dim_y = him.partial(y_names[j]).rename_vars(to_ab)
        polys.append(aj * dim_x + bj * dim_y - lam_im_p)
    polys.extend([hre, him])
    for j in range(n):
        aj, bj = MPoly.var(a_names[j]), MPoly.var(b_names[j])
        xj, yj = MPoly.var(x_names[j]), MPoly.var(y_names[j])
        polys.append(xj * xj + yj * yj - t_p * (aj * aj + bj * bj))
    for j in range(n):
        xj, yj = MPoly.var(x_names[j]), MPoly.var(y_names[j])
        polys.append(
            (yj - nu_p * xj) * hre.partial(x_names[j])
            - (xj + nu_p * yj) * hre.partial(y_names[j])
        )

    allvars = (
        a_names + b_names + x_names + y_names + (lam_re, lam_im, t, nu)
    )
    blocks = {
        "ab": a_names + b_names,
        "xy": x_names + y_names,
        "lamre": (lam_re,),
        "lamim": (lam_im,),
        "t": (t,),
        "nu": (nu,),
    }
    return PolySystem(allvars, polys, blocks)


# ---------------------------------------------------------------------------
# rational univariate arithmetic (coefficients as gmpy2.mpq, low-first lists)


def _q_trim(a: list) -> list:
    while a and not a[-1]:
        a.pop()
    return a


def _q_from_upoly(p: UPoly) -> list:
    return [mpq(c) for c in p.coeffs]


def _q_mul(a: list, b: list) -> list:
    if not a or not b:
        return []
    out = [mpq(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return _q_trim(out)


def _q_divmod(a: list, b: list) -> tuple[list, list]:
    if not b:
        raise ZeroDivisionError("division by the zero polynomial")
    r = list(a)
    q = [mpq(0)] * max(0, len(a) - len(b) + 1)
    inv = 1 / mpq(b[-1])
    for i in range(len(a) - len(b), -1, -1):
        c = r[i + len(b) - 1] * inv
        if c:
            q[i] = c
            for j, y in enumerate(b):
                if y:
                    r[i + j] -= c * y
    return _q_trim(q), _q_trim(r[: len(b) - 1])


def _q_mod(a: list, b: list) -> list:
    return _q_divmod(a, b)[1]


def _q_invmod(a: list, m: list) -> list:
    """Inverse of a modulo m over the rationals (extended Euclid)."""
    r0, r1 = list(m), _q_mod(a, m)
    s0, s1 = [], [mpq(1)]
    while r1:
        q, r2 = _q_divmod(r0, r1)
        qs1 = _q_mul(q, s1)
        s2 = [
            (s0[i] if i < len(s0) else mpq(0))
            - (qs1[i] if i < len(qs1) else mpq(0))
            for i in range(max(len(s0), len(qs1)))
        ]
        r0, r1 = r1, r2
        s0, s1 = s1, _q_trim(s2)
    if len(r0) != 1:
        raise ZeroDivisionError("element is not invertible modulo m")
    inv = 1 / r0[0]
    return _q_trim([inv * c for c in s0])


def _q_to_upoly_scaled(polys: Iterable[list]) -> tuple[list[UPoly], int]:
    """Clear a common denominator: returns (integer polys, the multiplier)."""
    polys = [list(p) for p in polys]
    den = 1
    for p in polys:
        for c in p:
            den = _ilcm(den, c.denominator)
    den = int(den)
    out = [UPoly([int(c * den) for c in p]) for p in polys]
    return out, den


# ---------------------------------------------------------------------------
# the representation


class KroneckerRep:
    """Solutions of a system as z_v = Q_v(u)/P'(u) at the roots of P.

    P is a square-free integer polynomial (it may carry an integer content so
    that every Q_v stays integral); Q maps each variable name to an integer
    polynomial of degree below deg P; u_form holds the integer coefficients
    of the separating linear form u = sum(u_form[v] * z_v).
    """

    __slots__ = ("u_form", "P", "Q")

    def __init__(self, u_form: Mapping[str, int], P: UPoly, Q: Mapping[str, UPoly]):
        self.u_form = dict(u_form)
        self.P = P
        self.Q = dict(Q)

    @property
    def vars(self) -> tuple[str, ...]:
        return tuple(self.Q.keys())

    @property
    def degree(self) -> int:
        return self.P.degree()

    def __eq__(self, other):
        if not isinstance(other, KroneckerRep):
            return NotImplemented
        return (
            self.u_form == other.u_form
            and self.P == other.P
            and self.Q == other.Q
        )

    def __repr__(self):
        return (
            f"KroneckerRep(deg P = {self.P.degree()}, "
            f"vars = {', '.join(self.Q)})"
        )

    def to_json(self) -> dict:
        return {
            "u_form": {v: int_to_json(c) for v, c in self.u_form.items()},
            "P": self.P.to_json(),
            "Q": {v: q.to_json() for v, q in self.Q.items()},
        }

    @staticmethod
    def from_json(data: dict) -> "KroneckerRep":
        return KroneckerRep(
            {v: int_from_json(c) for v, c in data["u_form"].items()},
            UPoly.from_json(data["P"]),
            {v: UPoly.from_json(q) for v, q in data["Q"].items()},
        )

    def verify(self, system: PolySystem, seed: int = 0) -> None:
        """Certify this representation against the system; raises on failure."""
        _verify_rep(self, system, seed)


# ---------------------------------------------------------------------------
# solving


def _as_weights(form, allvars) -> tuple[int, ...]:
    if isinstance(form, Mapping):
        unknown = set(form) - set(allvars)
        if unknown:
            raise ValueError(f"linear form uses unknown variables {sorted(unknown)}")
        return tuple(int(form.get(v, 0)) for v in allvars)
    form = tuple(int(c) for c in form)
    if len(form) != len(allvars):
        raise ValueError("linear form length does not match the variable count")
    return form


def _candidate_forms(allvars, u_hint, require_vars, rng, deg_bound):
    """Separating-form ladder: hint, cheap structured forms, random draws."""
    n = len(allvars)
    req = [allvars.index(v) for v in require_vars]

    def with_required(w):
        w = list(w)
        for i in req:
            if w[i] == 0:
                w[i] = 1
        return tuple(w)

    if u_hint is not None:
        yield _as_weights(u_hint, allvars)
    if req:
        yield with_required([0] * n)
    for i in range(n):
        yield with_required([int(j == i) for j in range(n)])
    for i in range(n):
        for j in range(i + 1, min(n, i + 3)):
            w = [0] * n
            w[i], w[j] = 1, -1
            yield with_required(w)
    # random retries per the documented policy, coefficient bound from the
    # degree bound (capped so coordinate heights stay manageable)
    bound = min(max(8, 2 * deg_bound * deg_bound), 1 << 31)
    for _ in range(5):
        yield with_required([rng.randint(-bound, bound) for _ in range(n)])


def _system_terms(system: PolySystem):
    return [sorted(p.terms.items()) for p in system.polys]


def _deg_bound(system: PolySystem) -> int:
    try:
        return max(1, bound_C(system.degree_matrix(), [len(b) for b in system.blocks().values()]))
    except (ValueError, OverflowError):
        return max(1, math.prod(max(1, p.degree()) for p in system.polys))


class _PrimeRunner:
    """Yields per-prime solvers, skipping primes with broken structure."""

    def __init__(self, terms, nvars):
        self.terms = terms
        self.nvars = nvars
        self.stream = modp.prime_stream(_PRIME_START)
        self.not_zero_dim = 0
        self.bad = 0

    def next_solver(self):
        while True:
            q = next(self.stream)
            try:
                return q, SystemSolver(self.terms, self.nvars, q)
            except NotZeroDimensional:
                self.not_zero_dim += 1
                if self.not_zero_dim >= 4:
                    raise PositiveDimensional(
                        "no finite solution count: the ideal has no pure "
                        "power of some variable among its leading terms"
                    )


def kronecker_solve(
    system: PolySystem,
    u_hint=None,
    *,
    seed: int = 0,
    require_vars: Sequence[str] = (),
    verify: bool = True,
    max_primes: int = 512,
) -> KroneckerRep:
    """Kronecker representation of a square system with finitely many roots.

    u_hint, when given, is tried first as the separating linear form (a dict
    var -> int or a coefficient sequence over system.vars).  require_vars
    forces the listed variables to appear in every tried form (needed when a
    block of variables is constant on the fibers the form must separate).
    """
    if not system.is_square:
        raise ValueError("the solver requires as many polynomials as variables")
    allvars = system.vars
    terms = _system_terms(system)
    rng = random.Random(seed)
    runner = _PrimeRunner(terms, len(allvars))

    # reference structure by majority over three primes
    trio = [runner.next_solver() for _ in range(3)]
    sigs = [s.signature() for _, s in trio]
    ref_sig = next((s for s in sigs if sigs.count(s) >= 2), None)
    if ref_sig is None:
        trio.extend(runner.next_solver() for _ in range(2))
        sigs = [s.signature() for _, s in trio]
        ref_sig = next((s for s in sigs if sigs.count(s) >= 2), None)
        if ref_sig is None:
            raise VerificationError("modular structure never stabilized")
    keep = [(q, s) for (q, s) in trio if s.signature() == ref_sig]
    dim = keep[0][1].dim

    if dim == 0:
        rep = KroneckerRep({}, UPoly([1]), {v: UPoly([]) for v in allvars})
        return rep

    # pick a separating form on the reference solver
    q0, s0 = keep[0]
    chosen = None
    best = None  # (deg, weights) with maximal minimal-polynomial degree
    for w in _candidate_forms(
        allvars, u_hint, require_vars, rng, _deg_bound(system)
    ):
        minpoly, coords = s0.parametrize(w)
        d = len(minpoly) - 1
        if best is None or d > best[0]:
            best = (d, w)
        if d == dim and coords is not None:
            chosen = w
            break
    if chosen is None:
        # maximal-degree form with coordinates recovered through traces
        # (the quotient algebra is not reduced, or coordinates fall outside
        # the cyclic subspace); certification below keeps this honest
        chosen = best[1]
        rep = _solve_by_traces(
            system, chosen, keep, runner, ref_sig, max_primes
        )
        if verify:
            _verify_rep(rep, system, seed)
        return rep

    data = []  # (prime, minpoly ints, coords rows)
    for q, s in keep:
        mp_q, coords_q = s.parametrize(chosen)
        if len(mp_q) - 1 == dim and coords_q is not None:
            data.append((q, [int(c) for c in mp_q], [[int(c) for c in row] for row in coords_q]))

    residues = None
    modulus = 1
    prev = None
    used = 0
    pending = list(data)
    while used < max_primes:
        if pending:
            q, mp_q, coords_q = pending.pop(0)
        else:
            q, s = runner.next_solver()
            if s.signature() != ref_sig:
                runner.bad += 1
                if runner.bad > 16:
                    raise VerificationError("too many structurally bad primes")
                continue
            mp_full, coords_full = s.parametrize(chosen)
            if len(mp_full) - 1 != dim or coords_full is None:
                runner.bad += 1
                if runner.bad > 16:
                    raise VerificationError("too many degenerate primes")
                continue
            mp_q = [int(c) for c in mp_full]
            coords_q = [[int(c) for c in row] for row in coords_full]
        used += 1
        flat = mp_q + [c for row in coords_q for c in row]
        if residues is None:
            residues = flat
            modulus = q
        else:
            residues = [
                modp.crt(r, modulus, c, q) for r, c in zip(residues, flat)
            ]
            modulus *= q
        recon = _reconstruct_all(residues, modulus)
        if recon is not None:
            if recon == prev:
                rep = _build_rep(allvars, chosen, recon, dim)
                if rep is not None:
                    if verify:
                        try:
                            _verify_rep(rep, system, seed)
                        except VerificationError:
                            prev = None
                            continue
                    return rep
            prev = recon
    raise VerificationError(
        "rational reconstruction did not stabilize within the prime budget"
    )


def _reconstruct_all(residues: list[int], modulus: int):
    out = []
    for r in residues:
        rec = modp.ratrecon(r, modulus)
        if rec is None:
            return None
        out.append(rec)
    return tuple(out)


def _build_rep(allvars, weights, recon, dim):
    """Assemble the integer representation from reconstructed rationals."""
    vals = [mpq(n, d) for n, d in recon]
    mp_q = vals[: dim + 1]
    coords = [
        vals[dim + 1 + i * dim : dim + 1 + (i + 1) * dim]
        for i in range(len(allvars))
    ]
    den = 1
    for c in mp_q:
        den = _ilcm(den, c.denominator)
    p_int = UPoly([int(c * den) for c in mp_q]).primitive()
    p_use = squarefree_part(p_int)
    pq = _q_from_upoly(p_use)
    dpq = _q_from_upoly(p_use.derivative())
    q_polys = []
    for row in coords:
        q_polys.append(_q_mod(_q_mul(_q_trim(list(row)), dpq), pq))
    q_ints, scale = _q_to_upoly_scaled(q_polys)
    p_final = UPoly([scale * c for c in p_use.coeffs])
    u_form = {v: w for v, w in zip(allvars, weights) if w}
    return KroneckerRep(u_form, p_final, dict(zip(allvars, q_ints)))


def _solve_by_traces(system, weights, keep, runner, ref_sig, max_primes):
    """Parametrize through weighted power sums when the algebra is not cyclic.

    For each prime: with M the multiplication matrix of the form and N_v that
    of the variable v, the sums trace(N_v M^k) interpolate, against the
    square-free minimal polynomial S of the form, a polynomial whose value at
    a root equals (local multiplicity) * v * S'.  Dividing by the same sum
    taken with v = 1 cancels the multiplicity, leaving the standard Q_v.
    """
    import numpy as np

    from ._groebner import krylov_minpoly

    allvars = system.vars
    residues = None
    modulus = 1
    prev = None
    used = 0
    deg_ref = None
    pending = list(keep)
    while used < max_primes:
        if pending:
            q, s = pending.pop(0)
        else:
            q, s = runner.next_solver()
            if s.signature() != ref_sig:
                runner.bad += 1
                if runner.bad > 16:
                    raise VerificationError("too many structurally bad primes")
                continue
        algebra = s.algebra
        dimension = algebra.dim
        if dimension > 600:
            raise SeparationFailure(
                "no separating form found and the quotient is too large for "
                "the trace fallback"
            )
        mp_q, _ = krylov_minpoly(algebra, weights)
        sf = _mod_squarefree([int(c) for c in mp_q], q)
        if deg_ref is None:
            deg_ref = len(sf) - 1
        if len(sf) - 1 != deg_ref:
            runner.bad += 1
            continue
        delta = len(sf) - 1
        M = algebra.mult_matrix(weights)
        power = np.identity(dimension, dtype=np.int64)
        traces = []  # rows: [trace(N_v M^k) for each v] plus trace(M^k)
        var_mats = [
            algebra.mult_matrix(tuple(int(i == j) for j in range(len(allvars))))
            for i in range(len(allvars))
        ]
        for _k in range(delta):
            # trace(N @ power) as an elementwise sum, reduced early so the
            # int64 accumulation cannot overflow
            row = [
                int(((nv * power.T) % q).sum() % q) for nv in var_mats
            ]
            row.append(int(np.trace(power) % q))
            traces.append(row)
            power = (M @ power) % q
        news = []
        for col in range(len(allvars) + 1):
            sums = [traces[k][col] for k in range(delta)]
            news.append(_newton_to_numerator(sums, sf, q))
        n_one = news[-1]
        inv_n_one = _mod_poly_inv(n_one, sf, q)
        dsf = modp.trim(
            [(k * c) % q for k, c in enumerate(sf)][1:]
        )
        flat = list(sf)
        for col in range(len(allvars)):
            qv = modp.pmod(
                modp.pmul(modp.pmul(news[col], inv_n_one, q), dsf, q), sf, q
            )
            qv = qv + [0] * (delta - len(qv))
            flat.extend(qv)
        used += 1
        if residues is None:
            residues = flat
            modulus = q
        else:
            if len(flat) != len(residues):
                runner.bad += 1
                continue
            residues = [
                modp.crt(r, modulus, c, q) for r, c in zip(residues, flat)
            ]
            modulus *= q
        recon = _reconstruct_all(residues, modulus)
        if recon is not None:
            if recon == prev:
                rep = _build_rep_from_q(allvars, weights, recon, deg_ref)
                if rep is not None:
                    return rep
            prev = recon
    raise VerificationError(
        "trace-based reconstruction did not stabilize within the prime budget"
    )


def _build_rep_from_q(allvars, weights, recon, delta):
    """Assemble the rep from trace data: a monic S and values-times-S' rows.

    The integer P is gamma * S for gamma = lc of the cleared-denominator
    primitive form, so every row picks up the same gamma to stay in the
    Q/P' convention before the final common rescale to integrality.
    """
    vals = [mpq(n, d) for n, d in recon]
    s_q = vals[: delta + 1]
    den = 1
    for c in s_q:
        den = _ilcm(den, c.denominator)
    p_int = UPoly([int(c * den) for c in s_q]).primitive()
    pq = _q_from_upoly(p_int)
    gamma = [mpq(p_int.lc())]
    q_polys = []
    for i in range(len(allvars)):
        row = _q_trim(
            list(vals[delta + 1 + i * delta : delta + 1 + (i + 1) * delta])
        )
        q_polys.append(_q_mod(_q_mul(row, gamma), pq))
    q_ints, scale = _q_to_upoly_scaled(q_polys)
    p_final = UPoly([scale * c for c in p_int.coeffs])
    u_form = {v: w for v, w in zip(allvars, weights) if w}
    return KroneckerRep(u_form, p_final, dict(zip(allvars, q_ints)))


def _mod_squarefree(poly: list[int], q: int) -> list[int]:
    d = modp.trim([(k * c) % q for k, c in enumerate(poly)][1:])
    g = modp.pgcd(poly, d, q)
    sf, _ = modp.pdivmod(poly, g, q)
    return sf


def _mod_poly_inv(a: list[int], m: list[int], q: int) -> list[int]:
    """Inverse of a modulo (m, q) by the extended Euclidean algorithm."""
    r0, r1 = list(m), modp.pmod(a, m, q)
    s0, s1 = [], [1]
    while r1:
        quo, r2 = modp.pdivmod(r0, r1, q)
        s2 = modp.psub(s0, modp.pmul(quo, s1, q), q)
        r0, r1 = r1, r2
        s0, s1 = s1, s2
    if len(r0) != 1:
        raise ZeroDivisionError("element is not invertible in the quotient")
    inv = pow(r0[0], q - 2, q)
    return modp.pscale(s0, inv, q)


def _newton_to_numerator(sums: list[int], sf: list[int], q: int) -> list[int]:
    """From power sums s_k = sum w_i r_i^k to sum_i w_i prod_{j!=i}(T - r_j).

    Uses N(T) = sum_k s_k * H_k(T) where H_k is the quotient of sf by T^{k+1}
    (the polynomial part of sf(T)/T^{k+1}).
    """
    delta = len(sf) - 1
    out = [0] * delta
    for k, s in enumerate(sums):
        if not s:
            continue
        # polynomial part of sf / T^{k+1}: coefficients sf[k+1..]
        for i, c in enumerate(sf[k + 1 :]):
            out[i] = (out[i] + s * c) % q
    return modp.trim(out)


# ---------------------------------------------------------------------------
# certification


def _verify_rep(rep: KroneckerRep, system: PolySystem, seed: int = 0) -> None:
    p = rep.P
    d = p.degree()
    if d <= 0:
        if d < 0:
            raise VerificationError("P is the zero polynomial")
        return  # no roots, nothing to certify
    p_prim = p.primitive()
    _certify_squarefree(p_prim)
    dp = p.derivative()
    for v in rep.vars:
        if rep.Q[v].degree() >= d:
            raise VerificationError(f"deg Q_{v} is not below deg P")
    # the linear form reproduces u at every root
    uform_poly = UPoly([0])
    for v, w in rep.u_form.items():
        uform_poly = uform_poly + UPoly([w]) * rep.Q[v]
    residual = uform_poly - dp.shift_exp(1)
    if not _divisible(residual, p_prim):
        raise VerificationError("the linear form does not reproduce u")
    # every system polynomial vanishes at the parametrized points
    height = max(
        [p.height()] + [rep.Q[v].height() for v in rep.vars]
    )
    exact = d <= 64 and height <= 4096
    if exact:
        for f in system.polys:
            if not _divisible(_residual_exact(f, rep, dp), p_prim):
                raise VerificationError(
                    "a system polynomial does not vanish on the solutions"
                )
    else:
        _residuals_modular(system, rep, seed)


def _certify_squarefree(p_prim: UPoly) -> None:
    lead = p_prim.lc()
    stream = modp.prime_stream(_PRIME_START)
    for _ in range(25):
        q = next(stream)
        if lead % q == 0:
            continue
        pq = modp.reduce_coeffs(p_prim.coeffs, q)
        dq = modp.trim([(k * c) % q for k, c in enumerate(pq)][1:])
        if len(modp.pgcd(pq, dq, q)) == 1:
            return
    raise VerificationError("square-freeness of P could not be certified")


def _divisible(f: UPoly, p: UPoly) -> bool:
    if f.is_zero:
        return True
    if f.degree() < p.degree():
        return False
    return f.pseudo_rem(p).is_zero


def _residual_exact(f: MPoly, rep: KroneckerRep, dp: UPoly) -> UPoly:
    """sum over terms of c * prod Q_v^e * (P')^(deg f - |e|), in Z[u]."""
    degf = f.degree()
    total = UPoly([0])
    dp_pows = _power_table(dp, degf)
    q_pows = {v: _power_table(rep.Q[v], f.degree_in(v)) for v in f.vars}
    for e, c in f.terms.items():
        term = UPoly([c])
        used = 0
        for v, x in zip(f.vars, e):
            if x:
                term = term * q_pows[v][x]
                used += x
        term = term * dp_pows[degf - used]
        total = total + term
    return total


def _power_table(p: UPoly, upto: int) -> list[UPoly]:
    out = [UPoly([1])]
    for _ in range(upto):
        out.append(out[-1] * p)
    return out


def _residuals_modular(system: PolySystem, rep: KroneckerRep, seed: int) -> None:
    """Residual checks modulo several primes chosen by the given seed.

    A vanishing residual modulo every chosen prime certifies divisibility
    only up to the (astronomically unlikely) event that all primes divide a
    nonzero residual; the tolerated risk is documented at the package level.
    """
    rng = random.Random(seed ^ 0x9E3779B9)
    stream = modp.prime_stream(_PRIME_START)
    pool = [next(stream) for _ in range(64)]
    primes = rng.sample(pool, 12)
    lead = rep.P.lc()
    checked = 0
    for q in primes:
        if lead % q == 0:
            continue
        pq = modp.reduce_coeffs(rep.P.coeffs, q)
        dpq = modp.trim([(k * c) % q for k, c in enumerate(pq)][1:])
        q_mod = {
            v: modp.pmod(modp.reduce_coeffs(rep.Q[v].coeffs, q), pq, q)
            for v in rep.vars
        }
        for f in system.polys:
            degf = f.degree()
            dp_pows = _mod_power_table(dpq, degf, pq, q)
            qv_pows = {
                v: _mod_power_table(q_mod[v], f.degree_in(v), pq, q)
                for v in f.vars
            }
            total: list[int] = []
            for e, c in f.terms.items():
                term = [c % q]
                used = 0
                for v, x in zip(f.vars, e):
                    if x:
                        term = modp.pmod(
                            modp.pmul(term, qv_pows[v][x], q), pq, q
                        )
                        used += x
                term = modp.pmod(
                    modp.pmul(term, dp_pows[degf - used], q), pq, q
                )
                total = modp.padd(total, term, q)
            if modp.trim(total):
                raise VerificationError(
                    "a system polynomial does not vanish on the solutions"
                )
        checked += 1
        if checked >= 8:
            return
    if checked < 8:
        raise VerificationError("not enough usable primes for residual checks")


def _mod_power_table(base: list[int], upto: int, pq: list[int], q: int):
    out = [[1]]
    for _ in range(upto):
        out.append(modp.pmod(modp.pmul(out[-1], base, q), pq, q))
    return out


# ---------------------------------------------------------------------------
# derived values


def _value_num_den(rep: KroneckerRep, value: MPoly):
    """The value as (numerator list over Q) modulo P, in the Q/P' form."""
    pq = _q_from_upoly(rep.P)
    dpq = _q_mod(_q_from_upoly(rep.P.derivative()), pq)
    inv_dp = _q_invmod(dpq, pq)
    missing = [v for v in value.vars if v not in rep.Q and value.degree_in(v) > 0]
    if missing:
        raise ValueError(f"value uses variables outside the representation: {missing}")
    acc: list = []
    for e, c in value.terms.items():
        term = [mpq(c)]
        used = 0
        for v, x in zip(value.vars, e):
            if x:
                qv = _q_from_upoly(rep.Q[v])
                for _ in range(x):
                    term = _q_mod(_q_mul(term, qv), pq)
                used += x
        if used == 0:
            term = _q_mul(term, dpq)
        else:
            for _ in range(used - 1):
                term = _q_mod(_q_mul(term, inv_dp), pq)
        add = _q_mod(term, pq)
        n = max(len(acc), len(add))
        acc = [
            (acc[i] if i < len(acc) else mpq(0))
            + (add[i] if i < len(add) else mpq(0))
            for i in range(n)
        ]
        acc = _q_trim(acc)
    return _q_mod(acc, pq)


def parametrize_value(rep: KroneckerRep, q: MPoly) -> UPoly:
    """Integer polynomial Q_q with value(root u) = Q_q(u)/P'(u).

    The computation runs in Q[u]/(P); the result is integral whenever the
    value is polynomial in the coordinates of an integral representation
    produced by kronecker_solve.  A non-integral outcome raises ValueError;
    extend_rep rescales the whole representation instead of failing.
    """
    if rep.P.degree() == 0:
        return UPoly([])
    coeffs = _value_num_den(rep, q)
    if any(c.denominator != 1 for c in coeffs):
        raise ValueError(
            "value parametrization is not integral for this representation; "
            "use extend_rep to rescale"
        )
    return UPoly([int(c) for c in coeffs])


def extend_rep(rep: KroneckerRep, values: Mapping[str, MPoly]) -> KroneckerRep:
    """New representation carrying extra named values, rescaled if needed."""
    collide = set(values) & set(rep.Q)
    if collide:
        raise ValueError(f"value names already present: {sorted(collide)}")
    if rep.P.degree() == 0:
        new_q = dict(rep.Q)
        new_q.update({name: UPoly([]) for name in values})
        return KroneckerRep(rep.u_form, rep.P, new_q)
    new_cols = {name: _value_num_den(rep, v) for name, v in values.items()}
    den = 1
    for col in new_cols.values():
        for c in col:
            den = _ilcm(den, c.denominator)
    den = int(den)
    p_new = UPoly([den * c for c in rep.P.coeffs])
    q_new = {v: UPoly([den * c for c in q.coeffs]) for v, q in rep.Q.items()}
    for name, col in new_cols.items():
        q_new[name] = UPoly([int(c * den) for c in col])
    return KroneckerRep(rep.u_form, p_new, q_new)


def minimal_polynomial(rep: KroneckerRep, q_poly: UPoly) -> UPoly:
    """Square-free primitive integer polynomial vanishing on Q_q/P' values.

    Computes the resultant of P'(u)T - Q_q(u) and P(u) with respect to u by
    evaluation-interpolation modulo enough word-sized primes; the prime count
    comes from a Hadamard bound on the resultant's coefficients, so the
    lifted integer polynomial is exact.
    """
    p = rep.P
    d = p.degree()
    if d == 0:
        return UPoly([1])
    if q_poly.degree() >= d:
        raise ValueError("deg Q_q must be below deg P")
    dp = p.derivative()
    h_a = max(dp.height(), q_poly.height(), 1)
    h_p = max(p.height(), 1)
    eta = (
        d * (h_a + 1)
        + (d - 1) * h_p
        + math.lgamma(2 * d) / math.log(2)
        + 16
    )
    stream = modp.prime_stream(_PRIME_START)
    residues: list[int] | None = None
    modulus = 1
    lead_p = p.lc()
    while modulus.bit_length() <= eta + 1:
        q = next(stream)
        if lead_p % q == 0:
            continue
        pq = modp.reduce_coeffs(p.coeffs, q)
        dpq = modp.reduce_coeffs(dp.coeffs, q)
        qq = modp.reduce_coeffs(q_poly.coeffs, q)
        xs: list[int] = []
        ys: list[int] = []
        tau = 0
        while len(xs) < d + 1:
            a = modp.psub(modp.pscale(dpq, tau, q), qq, q)
            if len(a) == d:  # degree in u must not drop for this sample
                xs.append(tau)
                ys.append(modp.presultant(a, pq, q))
            tau += 1
        coeffs_q = modp.pinterp(xs, ys, q)
        coeffs_q = coeffs_q + [0] * (d + 1 - len(coeffs_q))
        if residues is None:
            residues = coeffs_q
            modulus = q
        else:
            residues = [
                modp.crt(r, modulus, c, q) for r, c in zip(residues, coeffs_q)
            ]
            modulus *= q
    assert residues is not None
    half = modulus // 2
    lifted = [r - modulus if r > half else r for r in residues]
    result = UPoly(lifted)
    if result.is_zero:
        raise VerificationError("resultant vanished identically")
    return squarefree_part(result)


def reduce_to_factor(rep: KroneckerRep, factor: UPoly) -> KroneckerRep:
    """Restrict the representation to the roots of a square-free factor of P."""
    factor = factor.primitive()
    if factor.degree() < 1:
        raise NotAFactor("factor must have positive degree")
    if not is_squarefree(factor):
        raise ValueError("factor must be square-free")
    p_prim = rep.P.primitive()
    if not _divisible(p_prim, factor):
        raise NotAFactor("the given polynomial does not divide P")
    fq = _q_from_upoly(factor)
    dfq = _q_from_upoly(factor.derivative())
    dpq = _q_mod(_q_from_upoly(rep.P.derivative()), fq)
    inv_dp = _q_invmod(dpq, fq)
    ratio = _q_mod(_q_mul(dfq, inv_dp), fq)
    cols = {
        v: _q_mod(_q_mul(_q_from_upoly(qv), ratio), fq)
        for v, qv in rep.Q.items()
    }
    q_ints, scale = _q_to_upoly_scaled(cols.values())
    p_final = UPoly([scale * c for c in factor.coeffs])
    return KroneckerRep(
        dict(rep.u_form), p_final, dict(zip(cols.keys(), q_ints))
    )


# ---------------------------------------------------------------------------
# degree and height bounds


def bound_C(d_matrix: Sequence[Sequence[int]], n_blocks: Sequence[int]) -> int:
    """Sum of coefficients of prod_j (sum_i d_ji * x_i) truncated by n_blocks.

    Bounds the number of solutions (hence deg P) of a square system whose
    j-th polynomial has degree d_ji in the i-th block of n_i variables.
    """
    caps = tuple(int(n) for n in n_blocks)
    acc = {(0,) * len(caps): 1}
    for row in d_matrix:
        if len(row) != len(caps):
            raise ValueError("degree row length does not match block count")
        nxt: dict = {}
        for e, c in acc.items():
            for i, dd in enumerate(row):
                if not dd or e[i] + 1 > caps[i]:
                    continue
                ne = e[:i] + (e[i] + 1,) + e[i + 1 :]
                nxt[ne] = nxt.get(ne, 0) + c * int(dd)
        acc = nxt
        if not acc:
            return 0
    return sum(acc.values())


def bound_H(
    eta: Sequence[int],
    d_matrix: Sequence[Sequence[int]],
    n_blocks: Sequence[int],
) -> int:
    """Height analogue of bound_C: adds one height slot, truncated at degree 1."""
    if len(eta) != len(d_matrix):
        raise ValueError("need one height entry per polynomial")
    rows = [tuple(row) + (int(h),) for row, h in zip(d_matrix, eta)]
    caps = tuple(int(n) for n in n_blocks) + (1,)
    return bound_C(rows, caps)
