"""Truncated Fock-space states and the photon addition/subtraction maps.

This module is the numerical reference: every closed-form expression in
the package is checked against states produced here.  Ladder operators are
never materialized as matrices; ``a^dag^p rho a^p`` is a shift of the
density block with per-index amplitude factors, so the maps are exact on
the retained block.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

import numpy as np
from scipy.special import logsumexp

from .errors import CutoffOverflow, NullState
from .special import log_factorial_table

if TYPE_CHECKING:
    from .states import StateSpec

HARD_CEILING = 4096
DEFAULT_TAIL_TOL = 1e-14
_NULL_TRACE = 1e-300


class Order(enum.Enum):
    """Which ladder operator acts on the seed first."""

    ADD_THEN_SUBTRACT = "sa"
    SUBTRACT_THEN_ADD = "as"

    @classmethod
    def parse(cls, value: "Order | str") -> "Order":
        if isinstance(value, cls):
            return value
        v = str(value).lower()
        for member in cls:
            if v in (member.value, member.name.lower()):
                return member
        raise ValueError(f"unknown order {value!r}; expected 'sa' or 'as'")


@dataclass(frozen=True)
class OpSequence:
    """Add ``p`` photons and subtract ``q`` photons in the given order."""

    p: int
    q: int
    order: Order = Order.ADD_THEN_SUBTRACT

    def __post_init__(self):
        if int(self.p) != self.p or int(self.q) != self.q or self.p < 0 or self.q < 0:
            raise ValueError(f"p and q must be nonnegative integers, got p={self.p}, q={self.q}")
        object.__setattr__(self, "p", int(self.p))
        object.__setattr__(self, "q", int(self.q))
        object.__setattr__(self, "order", Order.parse(self.order))

    @property
    def label(self) -> str:
        return f"{self.order.value}(p={self.p},q={self.q})"


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class DensityMatrix:
    """Single-mode density operator on Fock levels 0..cutoff (dense storage)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise ValueError(f"density matrix must be square and non-empty, got shape {m.shape}")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def cutoff(self) -> int:
        return self.matrix.shape[0] - 1

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal().real.copy()

    def normalized(self) -> "DensityMatrix":
        tr = self.trace
        if not tr > _NULL_TRACE:
            raise NullState(f"cannot normalize operator with trace {tr!r}")
        return DensityMatrix(self.matrix / tr)

    def padded(self, cutoff: int) -> "DensityMatrix":
        if cutoff < self.cutoff:
            raise ValueError("padding cannot shrink the basis")
        out = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
        out[: self.cutoff + 1, : self.cutoff + 1] = self.matrix
        return DensityMatrix(out)

    def is_diagonal(self, atol: float = 0.0) -> bool:
        off = self.matrix - np.diag(self.matrix.diagonal())
        return bool(np.all(np.abs(off) <= atol))

    @classmethod
    def fock(cls, n: int, cutoff: Optional[int] = None) -> "DensityMatrix":
        """Projector onto the number state |n>."""
        cutoff = n + 1 if cutoff is None else cutoff
        if not 0 <= n <= cutoff:
            raise ValueError("need 0 <= n <= cutoff")
        m = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
        m[n, n] = 1.0
        return cls(m)

    @classmethod
    def vacuum(cls, cutoff: int = 1) -> "DensityMatrix":
        return cls.fock(0, cutoff)


@dataclass(frozen=True)
class PureState:
    """State vector with Fock amplitudes c_0..c_cutoff."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes)
        if a.ndim != 1 or a.size == 0:
            raise ValueError("amplitudes must be a non-empty 1-d sequence")
        arr = np.array(a, dtype=complex, copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "amplitudes", arr)

    @property
    def cutoff(self) -> int:
        return self.amplitudes.size - 1

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "PureState":
        nrm = self.norm
        if nrm == 0.0:
            raise NullState("zero state vector")
        return PureState(self.amplitudes / nrm)

    def density(self) -> DensityMatrix:
        c = self.amplitudes
        return DensityMatrix(np.outer(c, c.conj()))


@dataclass(frozen=True)
class NormalizationRecord:
    """Trace of the transformed operator before renormalization.

    ``1 / raw_trace`` is the numerical normalization constant.
    """

    raw_trace: float
    closed_form_value: Optional[float] = None
    relative_deviation: Optional[float] = None

    @property
    def constant(self) -> float:
        return 1.0 / self.raw_trace

    def with_closed_form(self, value: float) -> "NormalizationRecord":
        return NormalizationRecord(self.raw_trace, value, abs(value * self.raw_trace - 1.0))


def _log_amplitude(n_in: np.ndarray, shift: int, creation: bool, lf: np.ndarray) -> np.ndarray:
    # log of sqrt((n+p)!/n!) for a^dag^p, or sqrt(n!/(n-q)!) for a^q
    if creation:
        return 0.5 * (lf[n_in + shift] - lf[n_in])
    return 0.5 * (lf[n_in] - lf[n_in - shift])


def apply_creation(state: DensityMatrix, p: int, ceiling: int = HARD_CEILING) -> DensityMatrix:
    """Unnormalized ``a^dag^p rho a^p`` on a basis enlarged by ``p`` levels."""
    if p < 0:
        raise ValueError("p must be >= 0")
    if p == 0:
        return state
    K = state.cutoff
    if K + p > ceiling:
        raise CutoffOverflow(f"cutoff {K} + {p} exceeds ceiling {ceiling}")
    lf = log_factorial_table(K + p)
    f = np.exp(_log_amplitude(np.arange(K + 1), p, True, lf))
    out = np.zeros((K + p + 1, K + p + 1), dtype=complex)
    out[p:, p:] = state.matrix * np.outer(f, f)
    return DensityMatrix(out)


def apply_annihilation(state: DensityMatrix, q: int) -> DensityMatrix:
    """Unnormalized ``a^q rho a^dag^q``; levels below ``q`` are annihilated."""
    if q < 0:
        raise ValueError("q must be >= 0")
    if q == 0:
        return state
    K = state.cutoff
    out = np.zeros((K + 1, K + 1), dtype=complex)
    if q <= K:
        lf = log_factorial_table(K)
        g = np.exp(_log_amplitude(np.arange(q, K + 1), q, False, lf))
        out[: K + 1 - q, : K + 1 - q] = state.matrix[q:, q:] * np.outer(g, g)
    return DensityMatrix(out)


def transform(state: DensityMatrix, seq: OpSequence,
              ceiling: int = HARD_CEILING) -> tuple[DensityMatrix, NormalizationRecord]:
    """Apply the photon-operation recipe and renormalize.

    Raises NullState when the operator annihilates the state.
    """
    if seq.order is Order.ADD_THEN_SUBTRACT:
        raw = apply_annihilation(apply_creation(state, seq.p, ceiling), seq.q)
    else:
        raw = apply_creation(apply_annihilation(state, seq.q), seq.p, ceiling)
    tr = raw.trace
    if not tr > _NULL_TRACE:
        raise NullState(f"{seq.label} annihilates the input state (trace {tr!r})")
    return DensityMatrix(raw.matrix / tr), NormalizationRecord(tr)


def moment(state: DensityMatrix, k: int) -> float:
    """Factorial moment <a^dag^k a^k> = sum_n rho(n,n) n!/(n-k)!."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    K = state.cutoff
    if k > K:
        return 0.0
    n = np.arange(k, K + 1)
    lf = log_factorial_table(K)
    weights = np.exp(lf[n] - lf[n - k])
    return float(np.dot(state.diagonal()[k:], weights))


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    """Half the trace norm of ``a - b``; bases are zero-padded to match."""
    K = max(a.cutoff, b.cutoff)
    diff = a.padded(K).matrix - b.padded(K).matrix
    diff = 0.5 * (diff + diff.conj().T)
    return float(0.5 * np.abs(np.linalg.eigvalsh(diff)).sum())


def log_amplification(k: np.ndarray, seq: OpSequence) -> np.ndarray:
    """log of the diagonal gain seed level k picks up under ``seq`` (-inf if killed)."""
    k = np.asarray(k)
    p, q = seq.p, seq.q
    lf = log_factorial_table(int(k.max()) + p + 1)
    out = np.full(k.shape, -np.inf)
    if seq.order is Order.ADD_THEN_SUBTRACT:
        ok = k + p - q >= 0
        kk = k[ok]
        out[ok] = 2 * lf[kk + p] - lf[kk] - lf[kk + p - q]
    else:
        ok = k >= q
        kk = k[ok]
        out[ok] = lf[kk] + lf[kk + p - q] - 2 * lf[kk - q]
    return out


def choose_cutoff(spec: "StateSpec", seq: OpSequence, tail_tol: float = DEFAULT_TAIL_TOL,
                  ceiling: int = HARD_CEILING) -> int:
    """Seed cutoff whose discarded weight is below ``tail_tol`` after the operation.

    The tail is measured on the *transformed* populations (seed weight times
    the ladder gain), then ``p + q + 10`` levels of headroom are added.  For
    seeds with Fock coherences the amplitudes, not the populations, must fall
    below ``tail_tol``, so the population tail is held to ``tail_tol**2``.
    """
    if not 0.0 < tail_tol < 1.0:
        raise ValueError("tail_tol must lie in (0, 1)")
    headroom = seq.p + seq.q + 10
    k = np.arange(ceiling + 1)
    logw = spec.log_weights(ceiling) + log_amplification(k, seq)
    if not np.isfinite(logw).any():
        # nothing survives (e.g. subtracting from vacuum); downstream raises NullState
        return headroom
    total = logsumexp(logw)
    # tail[K] = mass strictly above K, accumulated from the top down
    rev = np.logaddexp.accumulate(logw[::-1])[::-1]
    tail = np.full(ceiling + 1, -np.inf)
    tail[:-1] = rev[1:] - total
    log_tol = np.log(tail_tol) * (2 if getattr(spec, "has_coherences", False) else 1)
    ok = np.nonzero(tail < log_tol)[0]
    if logw[-1] - total >= log_tol or ok.size == 0:
        raise CutoffOverflow(f"population not resolved below the hard ceiling {ceiling}")
    K = int(ok[0]) + headroom
    if K + seq.p > ceiling:
        raise CutoffOverflow(f"cutoff {K} (+{seq.p} added photons) exceeds ceiling {ceiling}")
    return K
