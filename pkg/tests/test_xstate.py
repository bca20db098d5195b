import numpy as np
import pytest
from hypothesis import given, strategies as st

from discordqpt import xstate
from discordqpt.correlators import CorrelatorSet
from discordqpt.errors import InvalidStateError
from discordqpt.xstate import BELL, MAXIMALLY_MIXED, XState

from strategies import xstates


@given(xstates())
def test_coefficients_round_trip(x):
    back = xstate.from_coefficients(xstate.coefficients(x), validate=False)
    assert np.allclose(back.as_tuple(), x.as_tuple(), atol=1e-15)


@given(xstates())
def test_spectrum_matches_dense(x):
    closed = np.sort(xstate.eigenvalues(x, clamp=False))
    assert np.allclose(closed, np.linalg.eigvalsh(xstate.to_matrix(x)), atol=1e-12)


@given(xstates())
def test_matrix_round_trip(x):
    assert xstate.from_matrix(xstate.to_matrix(x)) == x


def test_known_spectra():
    assert sorted(xstate.eigenvalues(BELL)) == [0.0, 0.0, 0.0, 1.0]
    assert tuple(xstate.eigenvalues(MAXIMALLY_MIXED)) == (0.25,) * 4


def test_correlator_mapping():
    x = xstate.from_correlators(CorrelatorSet(mz=-0.2, sxx=0.3, syy=-0.1, szz=0.4))
    c = xstate.coefficients(x)
    assert np.allclose(c, (0.3, -0.1, 0.4, -0.2), atol=1e-15)
    assert x.a + 2 * x.b + x.d == pytest.approx(1.0, abs=1e-15)


def test_invalid_correlators_rejected():
    with pytest.raises(InvalidStateError):
        xstate.from_correlators(CorrelatorSet(mz=0.0, sxx=1.0, syy=1.0, szz=1.0))


@pytest.mark.parametrize("state", [
    XState(0.5, 0.25, 0.1, 0.0, 0.0),      # trace
    XState(0.6, 0.25, -0.1, 0.0, 0.0),     # negative diagonal
    XState(0.25, 0.25, 0.25, 0.3, 0.0),    # |z| > b
    XState(0.25, 0.25, 0.25, 0.0, 0.3),    # |f| > sqrt(ad)
])
def test_validation(state):
    assert not state.is_valid()
    with pytest.raises(InvalidStateError):
        state.validate()


def test_clamping_only_touches_rounding_noise():
    x = XState(a=0.5, b=0.0, d=0.5, z=0.0, f=0.5 + 5e-13)
    assert min(xstate.eigenvalues(x)) == 0.0
    assert min(xstate.eigenvalues(x, clamp=False)) < 0.0
    far = XState(a=0.5, b=0.0, d=0.5, z=0.0, f=0.6)
    assert min(xstate.eigenvalues(far)) < -1e-3


@pytest.mark.parametrize("perturb", [
    lambda m: m.__setitem__((0, 1), 1e-6),
    lambda m: m.__setitem__((1, 1), m[1, 1] + 1e-6),
    lambda m: m.__setitem__((0, 3), m[0, 3] + 1e-6),
])
def test_from_matrix_rejects_off_pattern(perturb):
    m = xstate.to_matrix(MAXIMALLY_MIXED)
    perturb(m)
    with pytest.raises(ValueError):
        xstate.from_matrix(m)


def test_from_matrix_rejects_imaginary():
    m = xstate.to_matrix(BELL).astype(complex)
    m[0, 3] += 1e-6j
    with pytest.raises(ValueError):
        xstate.from_matrix(m)


def test_random_states_valid():
    rng = np.random.default_rng(3)
    assert all(xstate.random_xstate(rng).is_valid() for _ in range(2000))


@given(st.floats(0, 1))
def test_symmetric_product_states_are_x_states(p):
    rho = np.kron(np.diag([p, 1 - p]), np.diag([p, 1 - p]))
    x = xstate.from_matrix(rho)
    assert x.is_valid()
