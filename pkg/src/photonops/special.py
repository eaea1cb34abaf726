"""Special-function kernels used by the closed-form expressions.

Everything here is a pure function of its arguments.  Factorial ratios are
formed in log space, and hypergeometric Pochhammer products are updated
incrementally from one term to the next.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from .errors import NonConvergence, SingularParameter

MAX_TERMS = 10**7
_TERM_RTOL = 1e-16
_QUIET_TERMS = 3


def log_factorial(n: int) -> float:
    """Return ln(n!)."""
    if n < 0:
        raise ValueError(f"log_factorial needs n >= 0, got {n}")
    if n < 2:
        return 0.0
    return math.lgamma(n + 1.0)


def log_factorial_table(nmax: int) -> np.ndarray:
    """ln(k!) for k = 0..nmax as a float array."""
    return gammaln(np.arange(nmax + 1, dtype=float) + 1.0)


def _is_nonpositive_int(v: float) -> bool:
    return float(v) <= 0 and float(v) == math.floor(v)


def _check_lower(upper: Sequence[float], lower: Sequence[float]) -> None:
    for b in lower:
        if not _is_nonpositive_int(b):
            continue
        # (b)_k first vanishes at k = 1 - b; fine only if some (a)_k vanishes no later
        if not any(_is_nonpositive_int(a) and a >= b for a in upper):
            raise SingularParameter(f"lower parameter {b} is a pole of the series")


def hypergeometric_series(upper: Sequence[float], lower: Sequence[float], x: float,
                          max_terms: int = MAX_TERMS) -> float:
    """Sum the generalized hypergeometric series pFq(upper; lower; x) for |x| < 1.

    Stops once three consecutive terms fall below 1e-16 of the running sum
    while the term ratio is contracting; terminating series stop exactly.
    """
    if not -1.0 < x < 1.0:
        raise ValueError(f"series argument must satisfy |x| < 1, got {x}")
    _check_lower(upper, lower)
    upper = [float(a) for a in upper]
    lower = [float(b) for b in lower]
    total = 1.0
    term = 1.0
    quiet = 0
    for k in range(max_terms):
        num = 1.0
        for a in upper:
            num *= a + k
        if num == 0.0:
            return total
        den = float(k + 1)
        for b in lower:
            den *= b + k
        ratio = num / den * x
        term *= ratio
        total += term
        if abs(term) <= _TERM_RTOL * abs(total) and abs(ratio) < 1.0:
            quiet += 1
            if quiet >= _QUIET_TERMS:
                return total
        else:
            quiet = 0
    raise NonConvergence(f"pFq series not converged after {max_terms} terms")


def gauss_2f1(a: float, b: float, c: float, x: float) -> float:
    """Gauss hypergeometric function 2F1(a, b; c; x) by direct summation."""
    return hypergeometric_series((a, b), (c,), x)


def hyper_3f2(a1: float, a2: float, a3: float, b1: float, b2: float, x: float) -> float:
    """3F2(a1, a2, a3; b1, b2; x) by direct summation."""
    return hypergeometric_series((a1, a2, a3), (b1, b2), x)


def assoc_laguerre(n: int, k: int, x):
    """Generalized Laguerre polynomial L_n^(k)(x) by forward recurrence.

    ``x`` may be a scalar or a numpy array.
    """
    if n < 0 or k < 0:
        raise ValueError("assoc_laguerre needs n, k >= 0")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev[()] if prev.ndim == 0 else prev
    cur = 1.0 + k - x
    for j in range(1, n):
        prev, cur = cur, ((2 * j + 1 + k - x) * cur - (j + k) * prev) / (j + 1)
    return cur[()] if cur.ndim == 0 else cur


def laguerre(n: int, x):
    """Laguerre polynomial L_n(x)."""
    return assoc_laguerre(n, 0, x)


def scaled_laguerre_sequence(nmax: int, z) -> np.ndarray:
    """exp(-z/2) * L_n(z) for n = 0..nmax, stacked along the first axis.

    For z >= 0 every entry is bounded by 1 in magnitude, which keeps the
    Fock-state Wigner sums free of overflow at large |beta|.
    """
    z = np.asarray(z, dtype=float)
    out = np.empty((nmax + 1,) + z.shape)
    out[0] = np.exp(-0.5 * z)
    if nmax >= 1:
        out[1] = (1.0 - z) * out[0]
    for j in range(1, nmax):
        out[j + 1] = ((2 * j + 1 - z) * out[j] - j * out[j - 1]) / (j + 1)
    return out


def hermite2(m: int, n: int, x, y):
    """Two-variable Hermite polynomial H_{m,n}(x, y).

    Generated by exp(-u v + u x + v y); built row by row from
    H_{0,j} = y**j and H_{i+1,j} = x H_{i,j} - j H_{i,j-1}.  Arguments may be
    complex scalars or broadcastable arrays.
    """
    if m < 0 or n < 0:
        raise ValueError("hermite2 needs m, n >= 0")
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    x, y = np.broadcast_arrays(x, y)
    row = [np.ones_like(y)]
    for _ in range(n):
        row.append(row[-1] * y)
    for _ in range(m):
        new = [x * row[0]]
        for j in range(1, n + 1):
            new.append(x * row[j] - j * row[j - 1])
        row = new
    out = row[n]
    return out[()] if out.ndim == 0 else out
