"""Univariate polynomial arithmetic modulo a prime, plus CRT helpers.

Coefficients are low-degree-first lists of Python ints in [0, q).  These
routines back the modular fast paths elsewhere in the package: resultants by
evaluation and interpolation, residual certificates for Kronecker
representations, root sampling for probabilistic identity checks, and
rational reconstruction from Chinese remainder images.
"""

from __future__ import annotations

import gmpy2


def prev_prime(x: int) -> int:
    """Largest prime strictly below x."""
    x -= 1
    while not gmpy2.is_prime(x):
        x -= 1
    return x


def prime_stream(start_below: int):
    """Yield primes descending from just below start_below."""
    p = start_below
    while True:
        p = prev_prime(p)
        yield p


def trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def reduce_coeffs(a, q: int) -> list[int]:
    return trim([c % q for c in a])


def padd(a, b, q: int) -> list[int]:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = (out[i] + c) % q
    return trim(out)


def psub(a, b, q: int) -> list[int]:
    out = list(a) + [0] * (len(b) - len(a))
    for i, c in enumerate(b):
        out[i] = (out[i] - c) % q
    return trim(out)


def pscale(a, c: int, q: int) -> list[int]:
    c %= q
    if c == 0:
        return []
    return [(x * c) % q for x in a]


def pmul(a, b, q: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
    return trim([c % q for c in out])


def pdivmod(a, b, q: int) -> tuple[list[int], list[int]]:
    """Quotient and remainder of a by b (b nonzero) over GF(q)."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = [c % q for c in a]
    db, da = len(b) - 1, len(a) - 1
    if da < db:
        return [], trim(r)
    inv = pow(b[-1], q - 2, q)
    quo = [0] * (da - db + 1)
    for i in range(da - db, -1, -1):
        c = (r[i + db] * inv) % q
        if c:
            quo[i] = c
            for j, cb in enumerate(b):
                r[i + j] = (r[i + j] - c * cb) % q
    return trim(quo), trim(r)


def pmod(a, b, q: int) -> list[int]:
    return pdivmod(a, b, q)[1]


def pgcd(a, b, q: int) -> list[int]:
    a = reduce_coeffs(a, q)
    b = reduce_coeffs(b, q)
    while b:
        a, b = b, pmod(a, b, q)
    if a:
        inv = pow(a[-1], q - 2, q)
        a = [(c * inv) % q for c in a]
    return a


def presultant(a, b, q: int) -> int:
    """Resultant of a and b over GF(q)."""
    a = reduce_coeffs(a, q)
    b = reduce_coeffs(b, q)
    if not a or not b:
        return 0
    res = 1
    while True:
        da, db = len(a) - 1, len(b) - 1
        if db == 0:
            return (res * pow(b[0], da, q)) % q
        r = pmod(a, b, q)
        dr = len(r) - 1
        if (da * db) % 2:
            res = q - res
        res = (res * pow(b[-1], da - dr if r else da, q)) % q
        if not r:
            # b has positive degree and divides a: a common root exists.
            return 0
        a, b = b, r


def peval(a, x: int, q: int) -> int:
    acc = 0
    for c in reversed(a):
        acc = (acc * x + c) % q
    return acc


def pinterp(xs, ys, q: int) -> list[int]:
    """Lagrange interpolation through (xs[i], ys[i]) over GF(q)."""
    k = len(xs)
    poly = []
    base = [1]
    for x in xs:
        base = pmul(base, [(-x) % q, 1], q)
    for i in range(k):
        quo, rem = pdivmod(base, [(-xs[i]) % q, 1], q)
        if rem:
            raise ValueError("interpolation nodes must be distinct")
        denom = peval(quo, xs[i], q)
        poly = padd(poly, pscale(quo, ys[i] * pow(denom, q - 2, q), q), q)
    return poly


def ppowmod(base, e: int, mod, q: int) -> list[int]:
    """base^e modulo the polynomial mod, over GF(q)."""
    result = [1]
    base = pmod(base, mod, q)
    while e:
        if e & 1:
            result = pmod(pmul(result, base, q), mod, q)
        base = pmod(pmul(base, base, q), mod, q)
        e >>= 1
    return result


def proot(f, q: int, rng) -> int | None:
    """A root of f in GF(q), or None when f has no root there."""
    f = reduce_coeffs(f, q)
    if not f:
        raise ValueError("zero polynomial")
    # restrict to the product of linear factors
    xq = ppowmod([0, 1], q, f, q)
    lin = pgcd(psub(xq, [0, 1], q), f, q)
    if len(lin) - 1 <= 0:
        return None
    while len(lin) - 1 > 1:
        if lin[0] == 0:
            return 0
        shift = rng.randrange(q)
        # gcd with (x+shift)^((q-1)/2) - 1 splits the roots in half on average
        g = ppowmod([shift, 1], (q - 1) // 2, lin, q)
        g = pgcd(psub(g, [1], q), lin, q)
        if 0 < len(g) - 1 < len(lin) - 1:
            lin = g if (len(g) - 1) <= (len(lin) - 1) // 2 + 1 else pdivmod(lin, g, q)[0]
    return (-lin[0] * pow(lin[1], q - 2, q)) % q


def crt(r1: int, m1: int, r2: int, m2: int) -> int:
    """Integer in [0, m1*m2) congruent to r1 mod m1 and r2 mod m2."""
    inv = pow(m1 % m2, -1, m2)
    t = ((r2 - r1) * inv) % m2
    return r1 + m1 * t


def ratrecon(r: int, m: int) -> tuple[int, int] | None:
    """Rational reconstruction of r mod m.

    Returns (num, den) with r*den = num mod m, |num| <= B, 0 < den <= B for
    B = floor(sqrt(m/2)), den coprime to m; None when no such pair exists.
    """
    bound = gmpy2.isqrt(m // 2)
    r %= m
    s0, t0 = m, 0
    s1, t1 = r, 1
    while s1 > bound:
        qq = s0 // s1
        s0, s1 = s1, s0 - qq * s1
        t0, t1 = t1, t0 - qq * t1
    if t1 == 0:
        return None
    num, den = s1, t1
    if den < 0:
        num, den = -num, -den
    if num > bound or den > bound or gmpy2.gcd(den, m) != 1:
        return None
    if gmpy2.gcd(num, den) != 1:
        g = gmpy2.gcd(num, den)
        num, den = num // g, den // g
    return int(num), int(den)
