"""Zero-dimensional system solving: Buchberger plus quotient-ring linear algebra.

This is the engine behind the Kronecker representation builder.  It computes a
reduced Groebner basis in graded reverse lexicographic order, the monomial
basis of the quotient ring, normal-form tables for the border monomials, and
then extracts, for a chosen linear form u, the minimal polynomial of u
together with every coordinate written as a polynomial in u (Krylov iteration
on the multiplication matrix).

Two coefficient modes share the code: exact rationals (p=None, used for small
systems and certification) and a word-sized prime field (the fast path,
combined with Chinese remaindering by the caller).  Monomials are packed into
Python integers so that plain integer comparison is exactly grevlex.
"""

from __future__ import annotations

from heapq import heapify, heappush, heappop

import numpy as np
from gmpy2 import gcd, lcm, mpq

_W = 16
_VALMAX = (1 << (_W - 1)) - 1


class NotZeroDimensional(Exception):
    """The ideal is not zero-dimensional over the given field."""


class Packing:
    """Monomial/integer key codec for a fixed number of variables.

    Keys compare in grevlex: the total degree occupies the top bits, below it
    each exponent sits complemented (VALMAX - e) in a 16-bit field with the
    variable of highest index most significant, so that larger key means
    larger monomial.  The spare top bit of every field is a guard used by the
    carry-free divisibility test.
    """

    __slots__ = ("n", "guards", "offset", "varmask", "one", "varkeys")

    def __init__(self, n: int):
        self.n = n
        guards = 0
        offset = 0
        for i in range(n):
            guards |= (1 << (_W - 1)) << (_W * i)
            offset |= _VALMAX << (_W * i)
        self.guards = guards
        self.offset = offset
        self.varmask = (1 << (_W * n)) - 1
        self.one = self.pack((0,) * n)
        self.varkeys = tuple(
            self.pack(tuple(int(j == i) for j in range(n))) for i in range(n)
        )

    def pack(self, exps) -> int:
        deg = sum(exps)
        if deg > _VALMAX:
            raise OverflowError("monomial degree too large to pack")
        key = deg
        for e in reversed(exps):
            key = (key << _W) | (_VALMAX - e)
        return key

    def unpack(self, key: int) -> tuple[int, ...]:
        return tuple(
            _VALMAX - ((key >> (_W * i)) & _VALMAX) for i in range(self.n)
        )

    def mul(self, ka: int, kb: int) -> int:
        return ka + kb - self.offset

    def divides(self, ka: int, kb: int) -> bool:
        """Does monomial(ka) divide monomial(kb)?"""
        a = (ka & self.varmask) | self.guards
        return (a - (kb & self.varmask)) & self.guards == self.guards

    def lcm(self, ka: int, kb: int) -> int:
        ea, eb = self.unpack(ka), self.unpack(kb)
        return self.pack(tuple(max(x, y) for x, y in zip(ea, eb)))

    def deg(self, key: int) -> int:
        return key >> (_W * self.n)

    def exponent(self, key: int, i: int) -> int:
        return _VALMAX - ((key >> (_W * i)) & _VALMAX)

    def support_mask(self, key: int) -> int:
        m = 0
        for i in range(self.n):
            if ((key >> (_W * i)) & _VALMAX) != _VALMAX:
                m |= 1 << i
        return m

    def coprime(self, ka: int, kb: int) -> bool:
        return self.support_mask(ka) & self.support_mask(kb) == 0


def make_poly(terms, pk: Packing, p):
    """Build (keys desc, coeffs) from (exponent tuple, integer coeff) pairs."""
    acc: dict[int, int] = {}
    for exps, c in terms:
        k = pk.pack(exps)
        acc[k] = acc.get(k, 0) + c
    if p is None:
        items = [(k, c) for k, c in acc.items() if c]
    else:
        items = [(k, c % p) for k, c in acc.items() if c % p]
    items.sort(reverse=True)
    return [k for k, _ in items], [c for _, c in items]


def _normalize(keys, coeffs, p):
    """Monic mod p; primitive with positive lead over the integers."""
    lc = coeffs[0]
    if p is None:
        g = 0
        for c in coeffs:
            g = gcd(g, c)
        if lc < 0:
            g = -g
        if g != 1:
            coeffs = [int(c // g) for c in coeffs]
        else:
            coeffs = [int(c) for c in coeffs]
    else:
        if lc != 1:
            inv = pow(lc, p - 2, p)
            coeffs = [(c * inv) % p for c in coeffs]
    return keys, coeffs


def _find_reducer(k, reducers, pk: Packing):
    kvar = k & pk.varmask
    notk = ((1 << pk.n) - 1) & ~pk.support_mask(k)
    guards = pk.guards
    for red in reducers:
        if red[1] & notk:
            continue
        if (red[0] - kvar) & guards == guards:
            return red
    return None


def normal_form(keys, coeffs, reducers, pk: Packing, p):
    """Full normal form against reducers: a list of
    (guarded lead varpart, support mask, lead key, keys, coeffs) tuples.

    Mod p the reducers are monic and the result is the plain normal form.
    Over the integers the reducers are primitive; the accumulator runs over
    the rationals and the result is cleared of denominators and made
    primitive at the end.
    """
    if not keys:
        return [], []
    acc = dict(zip(keys, coeffs))
    heap = [-k for k in keys]
    heapify(heap)
    out: dict[int, object] = {}
    out_k: list[int] = []
    out_c: list = []
    while heap:
        k = -heappop(heap)
        c = acc.pop(k, None)
        if not c:
            continue
        hit = _find_reducer(k, reducers, pk)
        if hit is None:
            if p is None:
                out[k] = c
            else:
                out_k.append(k)
                out_c.append(c)
            continue
        q = k - hit[2]
        rk = hit[3]
        rc = hit[4]
        if p is None:
            ratio = mpq(c, rc[0])
            for i in range(1, len(rk)):
                nk = rk[i] + q
                prev = acc.get(nk)
                if prev is None:
                    acc[nk] = -ratio * rc[i]
                    heappush(heap, -nk)
                else:
                    acc[nk] = prev - ratio * rc[i]
        else:
            for i in range(1, len(rk)):
                nk = rk[i] + q
                prev = acc.get(nk)
                if prev is None:
                    acc[nk] = (-c * rc[i]) % p
                    heappush(heap, -nk)
                else:
                    acc[nk] = (prev - c * rc[i]) % p
    if p is None:
        items = sorted(((k, c) for k, c in out.items() if c), reverse=True)
        if not items:
            return [], []
        den = 1
        for _, c in items:
            den = lcm(den, c.denominator)
        out_k = [k for k, _ in items]
        out_c = [int(c * den) for _, c in items]
        out_k, out_c = _normalize(out_k, out_c, None)
    return out_k, out_c


def _reducer_tuple(keys, coeffs, pk: Packing):
    lm = keys[0]
    return (
        (lm & pk.varmask) | pk.guards,
        pk.support_mask(lm),
        lm,
        keys,
        coeffs,
    )


def _spoly(f, g, pk: Packing, p):
    """S-polynomial of two reducer tuples (monic mod p, primitive over Z)."""
    big = pk.lcm(f[2], g[2])
    qf = big - f[2]
    qg = big - g[2]
    acc: dict[int, object] = {}
    if p is None:
        lf, lg = f[4][0], g[4][0]
        gg = gcd(lf, lg)
        mf, mg = lg // gg, lf // gg
    else:
        mf = mg = 1
    for k, c in zip(f[3], f[4]):
        acc[k + qf] = mf * c
    for k, c in zip(g[3], g[4]):
        nk = k + qg
        prev = acc.get(nk)
        acc[nk] = -mg * c if prev is None else prev - mg * c
    if p is None:
        items = [(k, c) for k, c in acc.items() if c]
    else:
        items = [(k, c % p) for k, c in acc.items() if c % p]
    items.sort(reverse=True)
    return [k for k, _ in items], [c for _, c in items]


def groebner(polys, pk: Packing, p):
    """Reduced monic grevlex Groebner basis.

    polys: list of (keys, coeffs) pairs from make_poly.  Returns a list of
    monic reducer tuples sorted by increasing leading monomial.
    """
    reducers: list = []        # all installed elements, for reduction
    alive: list[bool] = []     # forms new pairs while True
    pairheap: list[tuple[int, int, int]] = []
    pair_lcm: dict[tuple[int, int], int] = {}
    dead: set[tuple[int, int]] = set()

    def install(keys, coeffs):
        keys, coeffs = _normalize(keys, coeffs, p)
        h = _reducer_tuple(keys, coeffs, pk)
        t = len(reducers)
        cand = [i for i in range(t) if alive[i]]
        lcms = {i: pk.lcm(reducers[i][2], h[2]) for i in cand}
        # Gebauer-Moller: drop an lcm value properly divided by another value
        values = set(lcms.values())
        kept = {
            v
            for v in values
            if not any(w != v and pk.divides(w, v) for w in values)
        }
        survivors = []
        for v in kept:
            group = [i for i in cand if lcms[i] == v]
            if any(pk.coprime(reducers[i][2], h[2]) for i in group):
                continue  # product criterion kills the whole class
            survivors.append(min(group))
        # prune queued old pairs whose lcm the new lead divides strictly
        for (i, j), big in pair_lcm.items():
            if (i, j) in dead:
                continue
            if (
                pk.divides(h[2], big)
                and pk.lcm(reducers[i][2], h[2]) != big
                and pk.lcm(reducers[j][2], h[2]) != big
            ):
                dead.add((i, j))
        reducers.append(h)
        alive.append(True)
        for i in survivors:
            pair_lcm[(i, t)] = lcms[i]
            heappush(pairheap, (lcms[i], i, t))
        for i in range(t):
            if alive[i] and pk.divides(h[2], reducers[i][2]):
                alive[i] = False

    for keys, coeffs in sorted(
        (kc for kc in polys if kc[0]), key=lambda kc: kc[0][0]
    ):
        r_k, r_c = normal_form(keys, coeffs, reducers, pk, p)
        if r_k:
            install(r_k, r_c)

    while pairheap:
        _, i, j = heappop(pairheap)
        if (i, j) in dead:
            continue
        s_k, s_c = _spoly(reducers[i], reducers[j], pk, p)
        r_k, r_c = normal_form(s_k, s_c, reducers, pk, p)
        if r_k:
            install(r_k, r_c)

    # minimal basis, then reduce the tails
    minimal: list = []
    for red in sorted(reducers, key=lambda r: r[2]):
        if not any(pk.divides(m[2], red[2]) for m in minimal):
            minimal.append(red)
    reduced: list = []
    for red in minimal:
        others = [m for m in minimal if m is not red]
        r_k, r_c = normal_form(red[3], red[4], others, pk, p)
        r_k, r_c = _normalize(r_k, r_c, p)
        reduced.append(_reducer_tuple(r_k, r_c, pk))
    reduced.sort(key=lambda r: r[2])
    return reduced


def quotient_basis(gb, pk: Packing, limit: int = 1 << 17):
    """Monomial basis (keys ascending) of the quotient by a zero-dim ideal.

    Raises NotZeroDimensional when some variable has no pure power among the
    leading monomials.  An ideal containing a constant yields the empty basis.
    """
    lms = [g[2] for g in gb]
    if any(lm == pk.one for lm in lms):
        return []
    for i in range(pk.n):
        if not any(pk.support_mask(lm) == (1 << i) for lm in lms):
            raise NotZeroDimensional(
                f"no pure power of variable {i} leads the basis"
            )
    basis: list[int] = []
    seen = {pk.one}
    stack = [pk.one]
    while stack:
        m = stack.pop()
        basis.append(m)
        if len(basis) > limit:
            raise NotZeroDimensional("quotient basis exceeds the size limit")
        for vk in pk.varkeys:
            nm = pk.mul(m, vk)
            if nm in seen:
                continue
            seen.add(nm)
            if any(pk.divides(lm, nm) for lm in lms):
                continue
            stack.append(nm)
    basis.sort()
    return basis


def border_tables(gb, basis, pk: Packing, p):
    """Normal-form vectors for every monomial in basis plus its border.

    Returns (index, tables): index maps basis keys to positions, tables maps
    every key in basis and border to its normal-form vector over the basis
    (numpy int64 arrays mod p, or rational lists in exact mode).  Relies on
    the basis coming from a reduced Groebner basis, whose tails lie under the
    staircase.
    """
    dim = len(basis)
    index = {k: i for i, k in enumerate(basis)}
    lmdict = {g[2]: g for g in gb}
    tables: dict[int, object] = {}
    modp = p is not None

    def zeros():
        return np.zeros(dim, dtype=np.int64) if modp else [mpq(0)] * dim

    for k in basis:
        v = zeros()
        v[index[k]] = 1 if modp else mpq(1)
        tables[k] = v
    border = set()
    for b in basis:
        for vk in pk.varkeys:
            m = pk.mul(b, vk)
            if m not in index:
                border.add(m)
    for m in sorted(border):
        g = lmdict.get(m)
        if g is not None:
            v = zeros()
            lc = g[4][0]
            for tk, tc in zip(g[3][1:], g[4][1:]):
                v[index[tk]] = (-tc) % p if modp else mpq(-tc, lc)
            tables[m] = v
            continue
        placed = False
        for i, vk in enumerate(pk.varkeys):
            if pk.exponent(m, i) == 0:
                continue
            qkey = m - vk + pk.offset
            if qkey in index:
                continue  # splitting off this variable would be circular
            wq = tables.get(qkey)
            if wq is None:
                continue
            v = zeros()
            if modp:
                for t in np.nonzero(wq)[0]:
                    v = (v + int(wq[t]) * tables[pk.mul(vk, basis[t])]) % p
            else:
                for t, c in enumerate(wq):
                    if c:
                        w = tables[pk.mul(vk, basis[t])]
                        v = [a + c * b for a, b in zip(v, w)]
            tables[m] = v
            placed = True
            break
        if not placed:
            raise RuntimeError("border closure failed to find a processed divisor")
    return index, tables


class QuotientAlgebra:
    """The quotient ring of a zero-dimensional ideal, set up for linear algebra."""

    def __init__(self, gb, pk: Packing, p):
        self.gb = gb
        self.pk = pk
        self.p = p
        self.basis = quotient_basis(gb, pk)
        self.dim = len(self.basis)
        if self.dim:
            self.index, self.tables = border_tables(gb, self.basis, pk, p)
        else:
            self.index, self.tables = {}, {}

    def signature(self):
        """Cross-prime structure check: lead exponents plus basis exponents."""
        lms = tuple(sorted(self.pk.unpack(g[2]) for g in self.gb))
        bas = tuple(self.pk.unpack(b) for b in self.basis)
        return lms, bas

    def coordinate_vector(self, i: int):
        """Normal form of the i-th variable over the monomial basis."""
        return self.tables[self.pk.varkeys[i]]

    def mult_matrix(self, weights):
        """Multiplication by sum(weights[i] * var_i) on the quotient.

        Mod p: numpy int64 matrix (columns indexed by source basis element).
        Exact: column-major list of rational lists.
        """
        pk, p = self.pk, self.p
        if p is not None:
            M = np.zeros((self.dim, self.dim), dtype=np.int64)
            for t, b in enumerate(self.basis):
                col = np.zeros(self.dim, dtype=np.int64)
                for i, w in enumerate(weights):
                    if w:
                        col = (col + (w % p) * self.tables[pk.mul(pk.varkeys[i], b)]) % p
                M[:, t] = col
            return M
        cols = []
        for b in self.basis:
            col = [mpq(0)] * self.dim
            for i, w in enumerate(weights):
                if w:
                    vec = self.tables[pk.mul(pk.varkeys[i], b)]
                    col = [a + w * c for a, c in zip(col, vec)]
            cols.append(col)
        return cols


def krylov_minpoly(algebra: QuotientAlgebra, weights):
    """Minimal polynomial of u = sum(weights[i] var_i) plus a coordinate solver.

    Returns (minpoly, solve): minpoly is monic, coefficients low-first
    (rationals in exact mode, ints mod p otherwise) for u acting on the
    cyclic subspace generated by 1; solve(vec) expresses a quotient element
    as a polynomial in u of degree < deg(minpoly), or returns None when vec
    lies outside the cyclic subspace.
    """
    p = algebra.p
    dim = algebra.dim
    M = algebra.mult_matrix(weights)
    modp = p is not None

    if modp:
        def matvec(v):
            return (M @ v) % p
    else:
        def matvec(v):
            out = [mpq(0)] * dim
            for j, c in enumerate(v):
                if c:
                    col = M[j]
                    out = [a + c * b for a, b in zip(out, col)]
            return out

    pivots: list[int] = []
    rows: list = []
    exprs: list[list] = []

    def reduce_against(r, x):
        for pos, row, ex in zip(pivots, rows, exprs):
            c = r[pos]
            if c:
                if modp:
                    r = (r - int(c) * row) % p
                    x = [(a - int(c) * b) % p for a, b in zip(x, ex)]
                else:
                    r = [a - c * b for a, b in zip(r, row)]
                    x = [a - c * b for a, b in zip(x, ex)]
        return r, x

    start = algebra.index[algebra.pk.one]
    if modp:
        w = np.zeros(dim, dtype=np.int64)
        w[start] = 1
    else:
        w = [mpq(0)] * dim
        w[start] = mpq(1)
    ws = [w]
    minpoly = None
    for step in range(dim + 1):
        x = [0] * (dim + 2)
        x[step] = 1
        if not modp:
            x = [mpq(c) for c in x]
        r, x = reduce_against(ws[step], x)
        if (not r.any()) if modp else (not any(r)):
            minpoly = x[: step + 1]
            break
        if modp:
            pos = int(np.nonzero(r)[0][0])
            inv = pow(int(r[pos]), p - 2, p)
            r = (r * inv) % p
            x = [(inv * a) % p for a in x]
        else:
            pos = next(i for i, c in enumerate(r) if c)
            inv = mpq(1) / r[pos]
            r = [inv * a for a in r]
            x = [inv * a for a in x]
        pivots.append(pos)
        rows.append(r)
        exprs.append(x)
        if step < dim:
            ws.append(matvec(ws[step]))
    assert minpoly is not None  # dim+1 vectors in dim dimensions must tie

    deg = len(minpoly) - 1

    def solve(vec):
        coeffs = [0] * (dim + 2)
        if not modp:
            coeffs = [mpq(c) for c in coeffs]
        r = vec
        for pos, row, ex in zip(pivots, rows, exprs):
            c = r[pos]
            if c:
                if modp:
                    r = (r - int(c) * row) % p
                    coeffs = [(a + int(c) * b) % p for a, b in zip(coeffs, ex)]
                else:
                    r = [a - c * b for a, b in zip(r, row)]
                    coeffs = [a + c * b for a, b in zip(coeffs, ex)]
        nonzero = r.any() if modp else any(r)
        if nonzero:
            return None
        return coeffs[:deg] if deg else [coeffs[0]]

    return minpoly, solve


class SystemSolver:
    """One field-level run over a polynomial system given as exponent terms.

    terms_list: per polynomial, a list of (exponent tuple, int coeff) pairs.
    p: a word-sized prime for the modular path or None for exact rationals.
    """

    def __init__(self, terms_list, nvars: int, p):
        self.p = p
        self.pk = Packing(nvars)
        polys = [make_poly(t, self.pk, p) for t in terms_list]
        self.gb = groebner(polys, self.pk, p)
        self.algebra = QuotientAlgebra(self.gb, self.pk, p)
        self.dim = self.algebra.dim

    def signature(self):
        return self.algebra.signature()

    def parametrize(self, weights):
        """Minimal polynomial of the linear form, plus per-variable vectors
        c_v with var_v = c_v(u) on the quotient.

        Returns (minpoly, coords); coords is None when the form fails to
        separate (minimal polynomial degree below the quotient dimension, or
        some coordinate outside the cyclic subspace).
        """
        minpoly, solve = krylov_minpoly(self.algebra, weights)
        if len(minpoly) - 1 < self.dim:
            return minpoly, None
        coords = []
        for i in range(self.pk.n):
            sol = solve(self.algebra.coordinate_vector(i))
            if sol is None:
                return minpoly, None
            coords.append(sol)
        return minpoly, coords
