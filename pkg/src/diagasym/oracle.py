"""Diagonal coefficient series of rational functions, computed exactly.

The engine asserts asymptotic statements about f_{k,...,k}; this module
produces the actual numbers to compare against.  Coefficients come from the
lattice convolution recurrence

    h_0 * f_i = g_i - sum_{0 != j <= i} h_j * f_{i-j}

run over the box [0..K]^n, which is exact and independent of everything the
asymptotic side does.  A few classical sequences with known closed forms are
registered by name so large indices stay reachable where the box would not
fit in memory.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .polycore import RatFun

# refuse boxes that would not fit comfortably in memory
_MAX_BOX = 20_000_000


@dataclass
class DiagonalSeries:
    """Exact diagonal coefficients f_{0..K} of an n-variable rational function."""

    nvars: int
    terms: list  # ints, or Fractions when the constant term of H is not +-1

    @property
    def K(self) -> int:
        return len(self.terms) - 1

    def __getitem__(self, k: int):
        return self.terms[k]

    def __len__(self):
        return len(self.terms)


def diagonal_terms(F: RatFun, K: int) -> DiagonalSeries:
    """Taylor-expand F over [0..K]^n and read off the diagonal, exactly."""
    if K < 0:
        raise ValueError("K must be nonnegative")
    n = len(F.vars)
    if n < 1:
        raise ValueError("need at least one variable")
    size = (K + 1) ** n
    if size > _MAX_BOX:
        raise ValueError(
            f"box [0..{K}]^{n} has {size} points; too large for the dense recurrence"
        )
    h0 = F.den.constant_term()
    gterms = dict(F.num.terms)
    hterms = [(e, c) for e, c in F.den.terms.items() if any(e)]

    # flat mixed-radix layout, last variable fastest
    strides = [0] * n
    s = 1
    for i in range(n - 1, -1, -1):
        strides[i] = s
        s *= K + 1
    offsets = [(e, sum(x * st for x, st in zip(e, strides)), c) for e, c in hterms]

    intpath = h0 in (1, -1)
    f = [0] * size
    flat = 0
    for idx in itertools.product(range(K + 1), repeat=n):
        rhs = gterms.get(idx, 0)
        for e, off, c in offsets:
            ok = True
            for x, y in zip(e, idx):
                if x > y:
                    ok = False
                    break
            if ok:
                rhs -= c * f[flat - off]
        if intpath:
            f[flat] = rhs if h0 == 1 else -rhs
        else:
            f[flat] = Fraction(rhs, h0)
        flat += 1

    diag_stride = sum(strides)
    out = [f[k * diag_stride] for k in range(K + 1)]
    out = [int(v) if isinstance(v, Fraction) and v.denominator == 1 else v for v in out]
    return DiagonalSeries(nvars=n, terms=out)


def heuristic_nonnegative(F: RatFun, count: int = 200) -> bool:
    """Do the first `count` power-series coefficients of F all look nonnegative?

    Checks every lattice coefficient in the triangle of total degree < m where
    m^n ~ count, plus the diagonal box up to that bound.  A heuristic only:
    used to warn, never to decide correctness.
    """
    n = len(F.vars)
    K = 1
    while (K + 2) ** n <= count:
        K += 1
    h0 = F.den.constant_term()
    gterms = dict(F.num.terms)
    hterms = [(e, c) for e, c in F.den.terms.items() if any(e)]
    box: dict = {}
    for idx in itertools.product(range(K + 1), repeat=n):
        rhs = gterms.get(idx, 0)
        for e, c in hterms:
            if all(x <= y for x, y in zip(e, idx)):
                rhs -= c * box[tuple(y - x for x, y in zip(e, idx))]
        box[idx] = Fraction(rhs, h0)
        if box[idx] < 0:
            return False
    return True


# ---------------------------------------------------------------------------
# closed forms
#
# Each entry maps k to the exact diagonal coefficient of the fixture it is
# named for.  These are independent of the recurrence above (pure binomial
# sums) and double as test oracles for it.


def _central_binomial(k: int) -> int:
    return math.comb(2 * k, k)


def _apery_zeta3(k: int) -> int:
    return sum(math.comb(k, i) ** 2 * math.comb(k + i, i) ** 2 for i in range(k + 1))


def _apery_zeta2(k: int) -> int:
    return sum(math.comb(k, i) ** 2 * math.comb(k + i, i) for i in range(k + 1))


def _signed_factorial_cube(k: int) -> int:
    if k % 2:
        return 0
    m = k // 2
    sign = -1 if m % 2 else 1
    return sign * math.factorial(3 * m) // math.factorial(m) ** 3


CLOSED_FORMS = {
    "central_binomial": _central_binomial,
    "apery_zeta3": _apery_zeta3,
    "apery_zeta2": _apery_zeta2,
    "signed_factorial_cube": _signed_factorial_cube,
}


def closed_form_terms(name: str, K: int) -> DiagonalSeries:
    fn = CLOSED_FORMS[name]
    return DiagonalSeries(nvars=0, terms=[fn(k) for k in range(K + 1)])


# ---------------------------------------------------------------------------
# comparison against a predicted dominant term


def predicted_value(result, k: int) -> float:
    """Midpoint prediction constant * growth^k * k^((1-n)/2) as a float."""
    if k <= 0:
        raise ValueError("prediction needs k >= 1")
    c = result.leading_constant_float()
    g = result.growth_float()
    return c * (g**k) * float(k) ** ((1 - result.n) / 2.0)


def check_asymptotics(series: DiagonalSeries, result, ks=None) -> list:
    """Rows (k, actual, predicted, ratio) with ratio = predicted / actual.

    Entries with a zero actual coefficient get ratio None.
    """
    if ks is None:
        ks = range(1, series.K + 1)
    rows = []
    for k in ks:
        actual = series[k]
        pred = predicted_value(result, k)
        if actual == 0:
            rows.append((k, actual, pred, None))
        else:
            rows.append((k, actual, pred, pred / float(actual)))
    return rows


def comparison_csv(rows) -> str:
    lines = ["k,actual,predicted,ratio"]
    for k, actual, pred, ratio in rows:
        r = "" if ratio is None else repr(ratio)
        lines.append(f"{k},{actual},{pred!r},{r}")
    return "\n".join(lines) + "\n"


def comparison_json(rows) -> list:
    return [
        {"k": k, "actual": str(actual), "predicted": pred, "ratio": ratio}
        for k, actual, pred, ratio in rows
    ]
