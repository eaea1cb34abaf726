import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from photonops import (CutoffOverflow, DensityMatrix, NullState, OpSequence, Order, StateSpec, apply_annihilation,
                       apply_creation, choose_cutoff, moment, thermal, trace_distance, transform)
from photonops.fock import PureState

SA, AS = Order.ADD_THEN_SUBTRACT, Order.SUBTRACT_THEN_ADD


def test_opsequence_validation():
    with pytest.raises(ValueError):
        OpSequence(-1, 0)
    with pytest.raises(ValueError):
        OpSequence(1.5, 0)
    assert OpSequence(2, 1, "as").order is AS
    assert OpSequence(2, 1).label == "sa(p=2,q=1)"


def test_order_parse_rejects_unknown():
    with pytest.raises(ValueError):
        Order.parse("sideways")


def test_density_matrix_is_read_only():
    rho = DensityMatrix.fock(2)
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 1.0


def test_density_matrix_shape_checked():
    with pytest.raises(ValueError):
        DensityMatrix(np.zeros((2, 3)))


@pytest.mark.parametrize("n,p", [(0, 1), (0, 4), (3, 2), (5, 0)])
def test_creation_on_fock_state(n, p):
    raw = apply_creation(DensityMatrix.fock(n, n), p)
    assert raw.cutoff == n + p
    expected = math.factorial(n + p) / math.factorial(n)
    assert raw.matrix[n + p, n + p].real == pytest.approx(expected)
    assert raw.trace == pytest.approx(expected)


@pytest.mark.parametrize("n,q", [(3, 1), (3, 3), (6, 2)])
def test_annihilation_on_fock_state(n, q):
    raw = apply_annihilation(DensityMatrix.fock(n, n + 2), q)
    assert raw.cutoff == n + 2
    assert raw.matrix[n - q, n - q].real == pytest.approx(math.factorial(n) / math.factorial(n - q))


def test_annihilating_below_q_gives_zero():
    assert apply_annihilation(DensityMatrix.fock(1, 3), 2).trace == 0.0


def test_vacuum_subtraction_is_null():
    with pytest.raises(NullState):
        transform(DensityMatrix.vacuum(4), OpSequence(0, 1, SA))
    with pytest.raises(NullState):
        transform(DensityMatrix.vacuum(4), OpSequence(3, 1, AS))


def test_add_then_subtract_on_vacuum():
    # a a^dag |0> = |0>, while a^dag a |0> = 0
    state, rec = transform(DensityMatrix.vacuum(2), OpSequence(1, 1, SA))
    assert state.matrix[0, 0] == pytest.approx(1.0)
    assert rec.raw_trace == pytest.approx(1.0)


def test_creation_respects_ceiling():
    with pytest.raises(CutoffOverflow):
        apply_creation(DensityMatrix.vacuum(10), 5, ceiling=12)


@given(st.floats(0.01, 2.0))
def test_commutator_shows_in_traces(nbar):
    # Tr[a a^dag rho a a^dag] - Tr[a^dag a rho a^dag a] = <(n+1)^2> - <n^2> = 2 nbar + 1
    K = choose_cutoff(StateSpec.thermal(nbar), OpSequence(1, 1))
    rho = thermal(nbar, K)
    _, sa = transform(rho, OpSequence(1, 1, SA))
    _, as_ = transform(rho, OpSequence(1, 1, AS))
    assert sa.raw_trace - as_.raw_trace == pytest.approx(2 * nbar + 1, rel=1e-10)


def _random_density(rng, K):
    a = rng.normal(size=(K + 1, K + 1)) + 1j * rng.normal(size=(K + 1, K + 1))
    m = a @ a.conj().T
    return DensityMatrix(m / np.trace(m).real)


@given(st.integers(0, 10_000), st.integers(0, 4), st.integers(0, 4), st.sampled_from([SA, AS]))
def test_transform_returns_density_operator(seed, p, q, order):
    rho = _random_density(np.random.default_rng(seed), 8)
    state, rec = transform(rho, OpSequence(p, q, order))
    m = state.matrix
    assert np.allclose(m, m.conj().T, atol=1e-13)
    assert state.trace == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.eigvalsh(m).min() > -1e-12
    assert rec.constant == pytest.approx(1 / rec.raw_trace)


def test_normalization_record_closed_form():
    _, rec = transform(DensityMatrix.fock(2, 2), OpSequence(1, 0))
    checked = rec.with_closed_form(1 / 3)
    assert checked.relative_deviation == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("n", [1, 2, 5])
def test_moments_of_number_state(n):
    rho = DensityMatrix.fock(n, n + 3)
    assert moment(rho, 1) == pytest.approx(n)
    assert moment(rho, 2) == pytest.approx(n * (n - 1))
    assert moment(rho, n + 1) == 0.0


def test_trace_distance_properties():
    rng = np.random.default_rng(7)
    a, b = _random_density(rng, 5), _random_density(rng, 7)
    assert trace_distance(a, a) == pytest.approx(0.0, abs=1e-14)
    assert trace_distance(a, b) == pytest.approx(trace_distance(b, a))
    assert 0.0 <= trace_distance(a, b) <= 1.0
    assert trace_distance(DensityMatrix.fock(0, 3), DensityMatrix.fock(1, 3)) == pytest.approx(1.0)


def test_pure_state_density():
    psi = PureState(np.array([1.0, 1.0j])).normalized()
    rho = psi.density()
    assert rho.trace == pytest.approx(1.0)
    assert rho.matrix[0, 1] == pytest.approx(-0.5j)


def test_cutoff_grows_with_stricter_tail():
    spec, seq = StateSpec.thermal(1.0), OpSequence(4, 2)
    assert choose_cutoff(spec, seq, 1e-6) < choose_cutoff(spec, seq, 1e-14)


@pytest.mark.parametrize("nbar,p,q", [(1.0, 8, 6), (1.0, 6, 8), (0.25, 4, 2)])
def test_chosen_cutoff_is_converged(nbar, p, q):
    # doubling the cutoff must not move the normalized populations
    spec, seq = StateSpec.thermal(nbar), OpSequence(p, q)
    K = choose_cutoff(spec, seq)
    small, _ = transform(spec.build(K), seq)
    big, _ = transform(spec.build(2 * K), seq)
    assert trace_distance(small, big) < 1e-12


def test_unresolvable_tail_overflows():
    with pytest.raises(CutoffOverflow):
        choose_cutoff(StateSpec.thermal(1e4), OpSequence(0, 0))
