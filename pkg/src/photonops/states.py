"""Seed states (thermal, even coherent) and closed-form normalization constants."""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NonConvergence, NullState
from .fock import DensityMatrix, OpSequence, Order, PureState
from .special import MAX_TERMS, gauss_2f1, laguerre, log_factorial, log_factorial_table

# alternating sums that cancel below this fraction of their largest term are refused
_CANCELLATION_FLOOR = 1e-6


class Family(enum.Enum):
    THERMAL = "thermal"
    EVEN_COHERENT = "ecs"

    @classmethod
    def parse(cls, value: "Family | str") -> "Family":
        if isinstance(value, cls):
            return value
        v = str(value).lower().replace("-", "_")
        aliases = {"thermal": cls.THERMAL, "th": cls.THERMAL, "ecs": cls.EVEN_COHERENT,
                   "even_coherent": cls.EVEN_COHERENT, "evencoherent": cls.EVEN_COHERENT}
        if v not in aliases:
            raise ValueError(f"unknown family {value!r}; expected 'thermal' or 'ecs'")
        return aliases[v]


@dataclass(frozen=True)
class StateSpec:
    """Seed-state parameters: thermal mean photon number or ECS amplitude."""

    family: Family
    nbar: Optional[float] = None
    alpha: Optional[complex] = None

    def __post_init__(self):
        object.__setattr__(self, "family", Family.parse(self.family))
        if self.family is Family.THERMAL:
            if self.nbar is None or self.alpha is not None:
                raise ValueError("thermal seed takes nbar only")
            if not (self.nbar >= 0 and math.isfinite(self.nbar)):
                raise ValueError(f"nbar must be finite and >= 0, got {self.nbar}")
            object.__setattr__(self, "nbar", float(self.nbar))
        else:
            if self.alpha is None or self.nbar is not None:
                raise ValueError("even coherent seed takes alpha only")
            object.__setattr__(self, "alpha", complex(self.alpha))

    @classmethod
    def thermal(cls, nbar: float) -> "StateSpec":
        return cls(Family.THERMAL, nbar=nbar)

    @classmethod
    def even_coherent(cls, alpha: complex) -> "StateSpec":
        return cls(Family.EVEN_COHERENT, alpha=alpha)

    @property
    def x(self) -> float:
        """n̄/(1+n̄) for thermal seeds, |alpha|^2 for even coherent seeds."""
        if self.family is Family.THERMAL:
            return self.nbar / (1.0 + self.nbar)
        return abs(self.alpha) ** 2

    @property
    def has_coherences(self) -> bool:
        """True when the seed density has off-diagonal Fock elements."""
        return self.family is Family.EVEN_COHERENT and self.alpha != 0

    def log_weights(self, kmax: int) -> np.ndarray:
        """Exact log Fock populations of the untruncated seed, levels 0..kmax."""
        k = np.arange(kmax + 1)
        if self.family is Family.THERMAL:
            return _thermal_log_weights(self.nbar, k)
        return 2.0 * _ecs_log_abs_amplitudes(abs(self.alpha), k)

    def build(self, cutoff: int) -> DensityMatrix:
        if self.family is Family.THERMAL:
            return thermal(self.nbar, cutoff)
        return even_coherent(self.alpha, cutoff).density()

    def describe(self) -> dict:
        if self.family is Family.THERMAL:
            return {"family": "thermal", "nbar": self.nbar}
        return {"family": "ecs", "alpha_re": self.alpha.real, "alpha_im": self.alpha.imag}


def _thermal_log_weights(nbar: float, k: np.ndarray) -> np.ndarray:
    if nbar == 0.0:
        return np.where(k == 0, 0.0, -np.inf)
    return k * math.log(nbar / (1.0 + nbar)) - math.log1p(nbar)


def _ecs_log_abs_amplitudes(r: float, k: np.ndarray) -> np.ndarray:
    # log|c_k| for even k; -inf for odd k
    x = r * r
    out = np.full(k.shape, -np.inf)
    even = k % 2 == 0
    ke = k[even]
    lf = log_factorial_table(int(k.max()))
    log_norm = 0.5 * math.log(2.0 + 2.0 * math.exp(-2.0 * x))
    if r == 0.0:
        out[even] = np.where(ke == 0, 0.0, -np.inf)
        return out
    out[even] = math.log(2.0) - 0.5 * x + ke * math.log(r) - 0.5 * lf[ke] - log_norm
    return out


def thermal(nbar: float, cutoff: int) -> DensityMatrix:
    """Thermal state with mean photon number ``nbar`` on levels 0..cutoff."""
    if nbar < 0:
        raise ValueError("nbar must be >= 0")
    w = np.exp(_thermal_log_weights(nbar, np.arange(cutoff + 1)))
    return DensityMatrix(np.diag(w / w.sum()))


def even_coherent(alpha: complex, cutoff: int) -> PureState:
    """Even coherent state (|alpha> + |-alpha>) up to normalization, truncated."""
    alpha = complex(alpha)
    k = np.arange(cutoff + 1)
    mag = np.exp(_ecs_log_abs_amplitudes(abs(alpha), k))
    phase = np.exp(1j * cmath.phase(alpha) * k) if alpha != 0 else np.ones(cutoff + 1)
    c = mag * phase
    return PureState(c / np.linalg.norm(c))


def ecs_superposed_laguerre(k: int, x: float) -> float:
    """L_k(-x) + exp(-2x) L_k(x): diagonal plus overlap-weighted cross terms."""
    return float(laguerre(k, -x) + math.exp(-2.0 * x) * laguerre(k, x))


def ecs_sa_moment_sum(x: float, p: int, q: int) -> float:
    """<psi| a^p a^dag^q a^q a^dag^p |psi> for the normalized even coherent state.

    Antinormal expansion: a^p a^dag^q a^q a^dag^p = sum_m (-1)^m C(q,m)^2 m!
    a^(p+q-m) a^dag^(p+q-m), each term giving (p+q-m)! times a Laguerre
    polynomial in coherent-state expectation.  When that alternating sum
    cancels, the same value is taken from the sign-definite polynomial form.
    """
    terms = []
    for m in range(q + 1):
        coef = math.comb(q, m) ** 2 * math.factorial(m) * math.factorial(p + q - m)
        terms.append((-1) ** m * coef * ecs_superposed_laguerre(p + q - m, x))
    total = math.fsum(terms)
    if total <= _CANCELLATION_FLOOR * max(abs(t) for t in terms):
        return _ecs_even_part(ecs_moment_coefficients(p, q), x, 0)
    return total / (1.0 + math.exp(-2.0 * x))


def ecs_moment_coefficients(p: int, k: int) -> dict[int, int]:
    """Coefficients of <w| a^p a^dag^k a^k a^dag^p |z> / <w|z> as a polynomial in conj(w) z.

    From normal ordering a^k a^dag^p = sum_l l! C(k,l) C(p,l) a^dag^(p-l) a^(k-l)
    twice; all coefficients are nonnegative integers.
    """
    out: dict[int, int] = {}
    for l in range(min(k, p) + 1):
        cl = math.factorial(l) * math.comb(k, l) * math.comb(p, l)
        j = p + k - l
        for i in range(min(p, j) + 1):
            power = j - i
            out[power] = out.get(power, 0) + cl * math.factorial(i) * math.comb(p, i) * math.comb(j, i)
    return out


def _ecs_even_part(coeffs: dict[int, int], x: float, shift: int) -> float:
    # sum_j c_j x^(j+shift) (1 + (-1)^(j+shift) e^(-2x)) / (1 + e^(-2x)); odd powers use expm1
    even = 1.0 + math.exp(-2.0 * x)
    odd = -math.expm1(-2.0 * x)
    acc = math.fsum(c * x ** (j + shift) * (odd if (j + shift) % 2 else even) for j, c in coeffs.items())
    return acc / even


def ecs_as_moment_poly(p: int, k: int, u: float) -> float:
    """<w| a^p a^dag^k a^k a^dag^p |z> / <w|z> evaluated at u = conj(w) z."""
    return float(math.fsum(c * u**j for j, c in ecs_moment_coefficients(p, k).items()))


def ecs_as_moment_sum(x: float, p: int, q: int, k: int) -> float:
    """<psi| a^dag^q a^p a^dag^k a^k a^dag^p a^q |psi> for the normalized ECS."""
    return _ecs_even_part(ecs_moment_coefficients(p, k), x, q)


def _thermal_sa_raw_series(x: float, p: int, q: int) -> float:
    # sum_{n >= q-p} x^n ((n+p)!)^2 / (n! (n+p-q)!), summed relative to its first term
    n0 = q - p
    log_first = n0 * math.log(x) + 2 * log_factorial(q) - log_factorial(n0)
    total, term, quiet, n = 1.0, 1.0, 0, n0
    while True:
        ratio = x * (n + p + 1) ** 2 / ((n + 1) * (n + p - q + 1))
        term *= ratio
        total += term
        n += 1
        if term <= 1e-16 * total and ratio < 1.0:
            quiet += 1
            if quiet >= 3:
                break
        else:
            quiet = 0
        if n - n0 > MAX_TERMS:
            raise NonConvergence("normalization series did not converge")
    return math.exp(log_first) * total


def norm_closed(spec: StateSpec, seq: OpSequence) -> float:
    """Closed-form normalization constant of the transformed seed (1 / trace)."""
    p, q = seq.p, seq.q
    if spec.family is Family.THERMAL:
        nbar, x = spec.nbar, spec.x
        if seq.order is Order.ADD_THEN_SUBTRACT:
            if p >= q:
                f = gauss_2f1(1 + p, 1 + p, 1 + p - q, x)
                return math.exp(math.log1p(nbar) + log_factorial(p - q) - 2 * log_factorial(p)) / f
            if nbar == 0.0:
                raise NullState(f"{seq.label} annihilates the vacuum")
            return (1.0 + nbar) / _thermal_sa_raw_series(x, p, q)
        if q > 0 and nbar == 0.0:
            raise NullState(f"{seq.label} annihilates the vacuum")
        f = gauss_2f1(1 + q, 1 + p, 1, x)
        log_n = math.log1p(nbar) - q * math.log(x) if q else math.log1p(nbar)
        return math.exp(log_n - log_factorial(p) - log_factorial(q)) / f

    x = spec.x
    if seq.order is Order.ADD_THEN_SUBTRACT:
        return 1.0 / ecs_sa_moment_sum(x, p, q)
    e = math.exp(-2.0 * x)
    bracket = laguerre(p, -x) + (-1) ** q * e * laguerre(p, x)
    trace = x**q * math.factorial(p) * bracket / (1.0 + e)
    if trace < _CANCELLATION_FLOOR * x**q * math.factorial(p) * (abs(laguerre(p, -x)) + e * abs(laguerre(p, x))):
        trace = ecs_as_moment_sum(x, p, q, 0)
    if not trace > 1e-300:
        raise NullState(f"{seq.label} annihilates the even coherent state")
    return 1.0 / float(trace)
