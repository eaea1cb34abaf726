"""Published closed forms that disagree with the Fock-space reference.

These are evaluated exactly as printed so the validation report can show
by how much they miss.  Nothing else in the package depends on them.
"""
from __future__ import annotations

import math

import numpy as np

from .fock import OpSequence, Order
from .observables import TWO_OVER_PI, _wigner_ecs_sa_closed
from .special import hermite2, laguerre, log_factorial
from .states import Family, StateSpec, norm_closed


def _unweighted_sup(k: int, x: float) -> float:
    return float(laguerre(k, x) + laguerre(k, -x))


def _unweighted_sum(x: float, p: int, q: int) -> float:
    return math.fsum(
        (-1) ** m * math.comb(q, m) ** 2 * math.factorial(m) * math.factorial(p + q - m)
        * _unweighted_sup(p + q - m, x)
        for m in range(q + 1))


def ecs_norm_unweighted(alpha: complex, seq: OpSequence) -> float:
    """ECS normalization with the cross term L_k(-x) carrying no overlap weight.

    The subtract-then-add constant is taken as (-1)^(p+q) times the
    add-then-subtract one.
    """
    x = abs(complex(alpha)) ** 2
    n3 = (1.0 + math.exp(-2.0 * x)) / _unweighted_sum(x, seq.p, seq.q)
    if seq.order is Order.SUBTRACT_THEN_ADD:
        return (-1) ** (seq.p + seq.q) * n3
    return n3


def ecs_norm_sign_relation(alpha: complex, seq: OpSequence) -> float:
    """Subtract-then-add constant obtained as (-1)^(p+q) times the corrected add-then-subtract one."""
    sa = OpSequence(seq.p, seq.q, Order.ADD_THEN_SUBTRACT)
    return (-1) ** (seq.p + seq.q) * norm_closed(StateSpec.even_coherent(alpha), sa)


def thermal_wigner_monomial(spec: StateSpec, seq: OpSequence, beta) -> np.ndarray:
    """Thermal Wigner series with monomials (4|beta|^2)^n / n! in place of Laguerre terms.

    The prefactor (4|beta|^2)^(p-q) is merged into the summand so no negative
    power is formed at beta = 0 (0^0 = 1).
    """
    if spec.family is not Family.THERMAL:
        raise ValueError("thermal seed required")
    p, q = seq.p, seq.q
    beta = np.asarray(beta, dtype=complex)
    u = 4.0 * np.abs(beta) ** 2
    x = spec.x
    log_n = math.log(norm_closed(spec, seq))
    start = max(0, q - p) if seq.order is Order.ADD_THEN_SUBTRACT else q
    total = np.zeros(u.shape)
    with np.errstate(divide="ignore"):
        log_u = np.log(u)
    quiet = 0
    n = start
    while True:
        if seq.order is Order.ADD_THEN_SUBTRACT:
            lc = 2 * (log_factorial(n + p) - log_factorial(n + p - q))
        else:
            lc = 2 * (log_factorial(n) - log_factorial(n - q))
        power = n + p - q
        lx = n * math.log(x) if x > 0 else (0.0 if n == 0 else -np.inf)
        with np.errstate(invalid="ignore"):
            lu = np.where(power == 0, 0.0, power * log_u)
        term = np.exp(lc + lx - log_factorial(n) + lu - 0.5 * u)
        total += term
        n += 1
        if np.all(term <= 1e-16 * np.maximum(total, 1e-300)) and n > start + 2 * u.max() + 2:
            quiet += 1
            if quiet >= 3:
                break
        else:
            quiet = 0
    # exp(-u/2) above is the exp(-2|beta|^2) prefactor
    return TWO_OVER_PI * math.exp(log_n) / (1.0 + spec.nbar) * total


def ecs_wigner_sa_printed(alpha: complex, seq: OpSequence, beta) -> np.ndarray:
    """Add-then-subtract ECS Wigner sum without the 1/pi factor, unweighted constant."""
    beta = np.asarray(beta, dtype=complex)
    corrected = _wigner_ecs_sa_closed(complex(alpha), seq, beta)
    ratio = ecs_norm_unweighted(alpha, seq) / norm_closed(StateSpec.even_coherent(alpha), seq)
    return math.pi * ratio * corrected


def ecs_wigner_as_printed(alpha: complex, seq: OpSequence, beta) -> np.ndarray:
    """Subtract-then-add ECS Wigner sum built from H_{p-n,q} with real arguments."""
    p, q = seq.p, seq.q
    a = complex(alpha)
    ac = a.conjugate()
    beta = np.asarray(beta, dtype=complex)
    bc = np.conj(beta)
    total = np.zeros(beta.shape, dtype=complex)
    for n in range(p + 1):
        coef = (-1) ** n * math.factorial(n) * math.comb(p, n) ** 2
        m = p - n
        h1 = hermite2(m, q, 2 * beta - a, ac)
        h2 = hermite2(m, q, 2 * beta + a, -ac)
        h3 = hermite2(m, q, 2 * beta - a, -ac)
        h4 = hermite2(m, q, 2 * beta + a, ac)
        cross = h3 * np.conj(h4) * np.exp(2 * (a * bc - ac * beta))
        total += coef * (np.abs(h1) ** 2 * np.exp(-2 * np.abs(a - beta) ** 2)
                         + np.abs(h2) ** 2 * np.exp(-2 * np.abs(a + beta) ** 2)
                         + np.exp(-2 * np.abs(beta) ** 2) * 2 * cross.real)
    x = abs(a) ** 2
    return (ecs_norm_unweighted(alpha, seq) / (1.0 + math.exp(-2.0 * x)) * total).real


def ecs_moments_printed(alpha: complex, seq: OpSequence) -> tuple[float, float]:
    """Factorial moments from the unweighted Laguerre sums and sign-related constants."""
    p, q = seq.p, seq.q
    x = abs(complex(alpha)) ** 2
    pref = ecs_norm_unweighted(alpha, seq) / (1.0 + math.exp(-2.0 * x))
    L = lambda k: _unweighted_sup(k, x)  # noqa: E731
    if seq.order is Order.ADD_THEN_SUBTRACT:
        return pref * _unweighted_sum(x, p, q + 1), pref * _unweighted_sum(x, p, q + 2)
    first, second = [], []
    for m in range(q + 1):
        c = math.comb(q, m) ** 2 * math.factorial(m) * math.factorial(p + q - m)
        s = p + q - m
        first.append((-1) ** (s + 1) * c * ((s + 1) * L(s + 1) + L(s)))
        second.append((-1) ** (s + 2) * c * ((s + 2) * (s + 1) * L(s + 2) + 4 * (s + 1) * L(s + 1) + 2 * L(s)))
    return pref * math.fsum(first), pref * math.fsum(second)
