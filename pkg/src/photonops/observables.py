"""Photon-number distributions, Wigner functions and Mandel Q.

Each quantity has two routes: a generic evaluator working on any
``DensityMatrix`` (the reference), and a closed-form evaluator that only
needs the seed parameters and the photon-operation recipe.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import CutoffInadequate, NonConvergence, NullState, UndefinedQ
from .fock import DEFAULT_TAIL_TOL, DensityMatrix, OpSequence, Order, choose_cutoff, moment, transform
from .special import MAX_TERMS, gauss_2f1, hermite2, hyper_3f2, log_factorial_table, scaled_laguerre_sequence
from .states import Family, StateSpec, ecs_as_moment_sum, ecs_sa_moment_sum, norm_closed

WIGNER_TAIL_TOL = 1e-12
TWO_OVER_PI = 2.0 / math.pi


# ---------------------------------------------------------------- photon numbers

def pnd(state: DensityMatrix) -> np.ndarray:
    """Photon-number distribution p(n) = rho(n, n), n = 0..cutoff."""
    return state.diagonal()


def _log_pnd_closed(spec: StateSpec, seq: OpSequence, n: np.ndarray, log_norm: float) -> np.ndarray:
    p, q = seq.p, seq.q
    n = np.asarray(n)
    k = n - p + q
    out = np.full(n.shape, -np.inf)
    ok = k >= 0
    if seq.order is Order.SUBTRACT_THEN_ADD:
        ok &= n >= p
    if spec.family is Family.EVEN_COHERENT:
        ok &= k % 2 == 0
    x = spec.x
    if x == 0.0:
        ok &= k == 0
    if not ok.any():
        return out
    nn, kk = n[ok], k[ok]
    lf = log_factorial_table(int(nn.max()) + q + 1)
    kx = kk * math.log(x) if x > 0.0 else np.zeros(kk.shape)
    if spec.family is Family.THERMAL:
        base = log_norm - math.log1p(spec.nbar) + kx
        if seq.order is Order.ADD_THEN_SUBTRACT:
            val = base + 2 * lf[nn + q] - lf[nn] - lf[kk]
        else:
            val = base + lf[nn] + lf[kk] - 2 * lf[nn - p]
    else:
        base = log_norm + math.log(2.0) - x - math.log1p(math.exp(-2.0 * x)) + kx
        if seq.order is Order.ADD_THEN_SUBTRACT:
            val = base + 2 * lf[nn + q] - lf[nn] - 2 * lf[kk]
        else:
            val = base + lf[nn] - 2 * lf[nn - p]
    out[ok] = val
    return out


def pnd_closed_array(spec: StateSpec, seq: OpSequence, nmax: int) -> np.ndarray:
    """Closed-form p(n) for n = 0..nmax."""
    log_norm = math.log(norm_closed(spec, seq))
    return np.exp(_log_pnd_closed(spec, seq, np.arange(nmax + 1), log_norm))


def pnd_closed(spec: StateSpec, seq: OpSequence, n: int) -> float:
    """Closed-form probability of finding ``n`` photons in the transformed seed."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return float(pnd_closed_array(spec, seq, n)[n])


def _closed_populations(spec: StateSpec, seq: OpSequence) -> np.ndarray:
    # grow the closed-form PND until the tail is quiet for three consecutive levels
    log_norm = math.log(norm_closed(spec, seq))
    chunk, start = 64, 0
    parts: list[np.ndarray] = []
    total, quiet, prev = 0.0, 0, 0.0
    while start < MAX_TERMS:
        vals = np.exp(_log_pnd_closed(spec, seq, np.arange(start, start + chunk), log_norm))
        for i, v in enumerate(vals):
            total += v
            if total > 0.0 and v <= 1e-16 * total and v <= prev:
                quiet += 1
                if quiet >= 3:
                    parts.append(vals[: i + 1])
                    return np.concatenate(parts)
            else:
                quiet = 0
            prev = v
        parts.append(vals)
        start += chunk
    raise NonConvergence("closed-form populations did not converge")


# ---------------------------------------------------------------- Wigner: reference route

def _displaced_parity(rho: np.ndarray, beta: np.ndarray):
    """(2/pi) Tr[rho D(2 beta) Parity] at every point, plus the outer-shell share.

    Displacement elements <n+d|D(g)|n> are generated along n for each
    occupied off-diagonal d with the normalized Laguerre recurrence; each
    magnitude stays <= 1.  Summation order per point is fixed, so results do
    not depend on how points are batched.
    """
    K = rho.shape[0] - 1
    g = 2.0 * beta
    z = (g * g.conj()).real
    r = np.sqrt(z)
    with np.errstate(divide="ignore"):
        log_r = np.log(r)
    phase = np.where(r > 0, g / np.where(r > 0, r, 1.0), 1.0)
    lf = log_factorial_table(K)
    acc = np.zeros(beta.shape, dtype=complex)
    shell = np.zeros(beta.shape, dtype=complex)
    absr = np.abs(rho)
    for d in range(K + 1):
        lo = np.diagonal(rho, -d)  # rho[n+d, n]
        up = np.diagonal(rho, d)  # rho[n, n+d]
        live = (np.diagonal(absr, -d) > 0) | (np.diagonal(absr, d) > 0)
        if not live.any():
            continue
        if d == 0:
            t_cur = np.exp(-0.5 * z)
        else:
            with np.errstate(under="ignore"):
                t_cur = np.exp(-0.5 * z + d * log_r - 0.5 * lf[d])
            t_cur = np.where(r > 0, t_cur, 0.0)
        t_prev = np.zeros_like(t_cur)
        ph_lo = np.conj(phase) ** d
        ph_up = phase**d
        last = K - d
        for n in range(last + 1):
            if live[n]:
                if d == 0:
                    term = lo[n] * t_cur
                else:
                    term = (lo[n] * ph_lo + up[n] * ph_up) * t_cur
                if n % 2:
                    term = -term
                acc += term
                if n == last:
                    shell += term
            if n < last:
                a = (2 * n + 1 + d - z) * math.sqrt((n + 1) / (n + 1 + d))
                b = (n + d) * math.sqrt((n + 1) * n / ((n + 1 + d) * (n + d))) if n else 0.0
                t_prev, t_cur = t_cur, (a * t_cur - b * t_prev) / (n + 1)
    return TWO_OVER_PI * acc.real, TWO_OVER_PI * np.abs(shell)


def wigner_many(state: DensityMatrix, betas, check_tail: bool = True) -> np.ndarray:
    """Wigner function of ``state`` at an array of complex phase-space points."""
    betas = np.asarray(betas, dtype=complex)
    flat = betas.reshape(-1)
    w, shell = _displaced_parity(state.matrix, flat)
    if check_tail and flat.size and shell.max() > WIGNER_TAIL_TOL:
        i = int(np.argmax(shell))
        raise CutoffInadequate(
            f"outer Fock shell contributes {shell[i]:.3g} at beta={flat[i]:.4g}; raise the cutoff")
    return w.reshape(betas.shape)


def wigner(state: DensityMatrix, beta: complex, check_tail: bool = True) -> float:
    """W(beta) = (2/pi) sum_k (-1)^k <k| D(-beta) rho D(beta) |k>."""
    return float(wigner_many(state, np.array([beta]), check_tail)[0])


# ---------------------------------------------------------------- Wigner: closed forms

def _wigner_thermal_closed(spec: StateSpec, seq: OpSequence, beta: np.ndarray) -> np.ndarray:
    # diagonal state: W = (2/pi) sum_n p(n) (-1)^n exp(-2|b|^2) L_n(4|b|^2)
    probs = _closed_populations(spec, seq)
    sign = np.where(np.arange(probs.size) % 2, -1.0, 1.0)
    lag = scaled_laguerre_sequence(probs.size - 1, 4.0 * np.abs(beta) ** 2)
    out = np.zeros(beta.shape)
    for n in range(probs.size):
        if probs[n] != 0.0:
            out += (sign[n] * probs[n]) * lag[n]
    return TWO_OVER_PI * out


def _wigner_ecs_sa_closed(alpha: complex, seq: OpSequence, beta: np.ndarray) -> np.ndarray:
    p, q = seq.p, seq.q
    a, ac = alpha, np.conj(alpha)
    x = abs(alpha) ** 2
    total = np.zeros(beta.shape, dtype=complex)
    for n in range(p + 1):
        coef = (-1) ** n * math.factorial(n) * math.comb(p, n) ** 2
        m = p - n
        h1 = hermite2(m, q, 1j * (2 * beta - a), 1j * ac)
        h2 = hermite2(m, q, 1j * (2 * beta + a), -1j * ac)
        h3 = hermite2(m, q, 1j * (2 * beta - a), -1j * ac)
        h4 = hermite2(m, q, 1j * (2 * beta + a), 1j * ac)
        bc = np.conj(beta)
        ph = np.exp(2 * (a * bc - ac * beta))
        cross = h3 * np.conj(h4) * ph
        val = (np.abs(h1) ** 2 * np.exp(-2 * np.abs(a - beta) ** 2)
               + np.abs(h2) ** 2 * np.exp(-2 * np.abs(a + beta) ** 2)
               + np.exp(-2 * np.abs(beta) ** 2) * 2 * cross.real)
        total += coef * val
    n3 = norm_closed(StateSpec.even_coherent(alpha), seq)
    return (n3 / (math.pi * (1.0 + math.exp(-2.0 * x))) * total).real


def _wigner_ecs_as_closed(alpha: complex, seq: OpSequence, beta: np.ndarray) -> np.ndarray:
    # a^dag^p a^q |ECS> = alpha^q a^dag^p |alpha> + (-alpha)^q a^dag^p |-alpha>;
    # each pair of photon-added coherent kets gives a Gaussian times H_{p,p}
    p, q = seq.p, seq.q
    x = abs(alpha) ** 2
    bc = np.conj(beta)
    total = np.zeros(beta.shape, dtype=complex)
    for zk in (alpha, -alpha):
        for wk in (alpha, -alpha):
            wc = np.conj(wk)
            expo = -2 * np.abs(beta) ** 2 - x - zk * wc + 2 * bc * zk + 2 * beta * wc
            total += (wc * zk) ** q * np.exp(expo) * hermite2(p, p, 2 * bc - wc, 2 * beta - zk)
    n4 = norm_closed(StateSpec.even_coherent(alpha), seq)
    return (n4 / (math.pi * (1.0 + math.exp(-2.0 * x))) * total).real


def wigner_closed(spec: StateSpec, seq: OpSequence, beta):
    """Closed-form Wigner function of the transformed seed; accepts arrays of beta."""
    arr = np.asarray(beta, dtype=complex)
    if spec.family is Family.THERMAL:
        out = _wigner_thermal_closed(spec, seq, arr)
    elif seq.order is Order.ADD_THEN_SUBTRACT:
        out = _wigner_ecs_sa_closed(spec.alpha, seq, arr)
    else:
        out = _wigner_ecs_as_closed(spec.alpha, seq, arr)
    return float(out) if np.ndim(beta) == 0 else out


# ---------------------------------------------------------------- Wigner grids

@dataclass(frozen=True)
class WignerGrid:
    """Wigner values on a square grid; ``values`` is row-major with Im(beta) as the row."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float
    points_per_axis: int
    values: np.ndarray
    cutoff: Optional[int] = None
    closed_max_deviation: Optional[float] = None

    def __post_init__(self):
        v = np.array(self.values, dtype=float).reshape(-1)
        if v.size != self.points_per_axis**2:
            raise ValueError("values length must equal points_per_axis**2")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def re_axis(self) -> np.ndarray:
        return np.linspace(self.re_min, self.re_max, self.points_per_axis)

    @property
    def im_axis(self) -> np.ndarray:
        return np.linspace(self.im_min, self.im_max, self.points_per_axis)

    def as_array(self) -> np.ndarray:
        return self.values.reshape(self.points_per_axis, self.points_per_axis)

    def points(self) -> np.ndarray:
        re, im = np.meshgrid(self.re_axis, self.im_axis)
        return (re + 1j * im).reshape(-1)

    def integral(self) -> float:
        """Trapezoidal quadrature of W over the grid (d Re beta d Im beta)."""
        w = np.trapezoid(self.as_array(), self.re_axis, axis=1)
        return float(np.trapezoid(w, self.im_axis))

    def minimum(self) -> float:
        return float(self.values.min())

    def negative_volume(self) -> float:
        """Trapezoidal integral of max(-W, 0) over the grid."""
        neg = np.clip(-self.as_array(), 0.0, None)
        return float(np.trapezoid(np.trapezoid(neg, self.re_axis, axis=1), self.im_axis))


def grid_points(re_min: float, re_max: float, im_min: float, im_max: float, points: int) -> np.ndarray:
    re, im = np.meshgrid(np.linspace(re_min, re_max, points), np.linspace(im_min, im_max, points))
    return (re + 1j * im).reshape(-1)


def prepare_state(spec: StateSpec, seq: OpSequence, tail_tol: float = DEFAULT_TAIL_TOL,
                  cutoff: Optional[int] = None):
    """Build the seed at an adequate cutoff and apply ``seq``; returns (state, record, cutoff)."""
    K = choose_cutoff(spec, seq, tail_tol) if cutoff is None else cutoff
    state, record = transform(spec.build(K), seq)
    return state, record, K


def wigner_grid(spec: StateSpec, seq: OpSequence, re_min: float = -3.0, re_max: float = 3.0,
                im_min: float = -3.0, im_max: float = 3.0, points_per_axis: int = 81,
                tail_tol: float = DEFAULT_TAIL_TOL, workers: int = 1, check_closed: bool = False,
                cutoff: Optional[int] = None) -> WignerGrid:
    """Evaluate the reference Wigner function of the transformed seed on a grid.

    With ``check_closed`` the closed form is evaluated too and the largest
    pointwise deviation is stored on the result.
    """
    if points_per_axis < 2:
        raise ValueError("points_per_axis must be >= 2")
    state, _, K = prepare_state(spec, seq, tail_tol, cutoff)
    pts = grid_points(re_min, re_max, im_min, im_max, points_per_axis)
    if workers <= 1:
        values = wigner_many(state, pts)
    else:
        chunks = np.array_split(pts, workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = np.concatenate(list(pool.map(lambda c: wigner_many(state, c), chunks)))
    dev = None
    if check_closed:
        dev = float(np.max(np.abs(values - wigner_closed(spec, seq, pts))))
    return WignerGrid(re_min, re_max, im_min, im_max, points_per_axis, values, K, dev)


# ---------------------------------------------------------------- Mandel Q

@dataclass(frozen=True)
class QResult:
    q: float
    mean_n: float
    second_factorial_moment: float

    @classmethod
    def from_moments(cls, mean_n: float, second: float) -> "QResult":
        if not mean_n > 1e-12:
            raise UndefinedQ(f"mean photon number {mean_n!r} is too small for Mandel Q")
        return cls(second / mean_n - mean_n, mean_n, second)


def mandel_q(state: DensityMatrix) -> QResult:
    """Q = <a^dag^2 a^2>/<a^dag a> - <a^dag a> from the state's factorial moments."""
    return QResult.from_moments(moment(state, 1), moment(state, 2))


def mandel_q_closed_thermal(nbar: float, seq: OpSequence) -> float:
    """Hypergeometric closed form of Q for a transformed thermal seed.

    Raises SingularParameter when a lower hypergeometric parameter is a
    nonpositive integer (p - q <= 1 for add-then-subtract, p <= 1 for
    subtract-then-add).
    """
    p, q = seq.p, seq.q
    if nbar < 0:
        raise ValueError("nbar must be >= 0")
    x = nbar / (1.0 + nbar)
    if seq.order is Order.ADD_THEN_SUBTRACT:
        s = p - q
        f_lo = gauss_2f1(1 + p, 1 + p, s - 1, x)
        f_mid = gauss_2f1(1 + p, 1 + p, s, x)
        f_hi = gauss_2f1(1 + p, 1 + p, s + 1, x)
        return (s - 1) * f_lo / f_mid - s * f_mid / f_hi
    if q > 0 and nbar == 0.0:
        raise NullState(f"{seq.label} annihilates the vacuum")
    g_lo = hyper_3f2(1 + p, 1 + p, 1 + q, 1, p - 1, x)
    g_mid = hyper_3f2(1 + p, 1 + p, 1 + q, 1, p, x)
    f = gauss_2f1(1 + q, 1 + p, 1, x)
    return (p - 1) * g_lo / g_mid - p * g_mid / f


def ecs_moments_closed(alpha: complex, seq: OpSequence) -> tuple[float, float]:
    """Closed-form (<a^dag a>, <a^dag^2 a^2>) for a transformed even coherent seed."""
    x = abs(complex(alpha)) ** 2
    p, q = seq.p, seq.q
    if seq.order is Order.ADD_THEN_SUBTRACT:
        norm = norm_closed(StateSpec.even_coherent(alpha), seq)
        return ecs_sa_moment_sum(x, p, q + 1) * norm, ecs_sa_moment_sum(x, p, q + 2) * norm
    raw0 = ecs_as_moment_sum(x, p, q, 0)
    if not raw0 > 1e-300:
        raise NullState(f"{seq.label} annihilates the even coherent state")
    return ecs_as_moment_sum(x, p, q, 1) / raw0, ecs_as_moment_sum(x, p, q, 2) / raw0


def mandel_q_closed_ecs(alpha: complex, seq: OpSequence) -> float:
    mean_n, second = ecs_moments_closed(alpha, seq)
    return QResult.from_moments(mean_n, second).q
