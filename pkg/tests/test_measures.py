import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from discordqpt import measures, xstate
from discordqpt.errors import NegativeProbabilityError
from discordqpt.measures import Branch, MeasurementBasis
from discordqpt.xstate import BELL, MAXIMALLY_MIXED, XState

from strategies import xstates


def werner(w):
    """w |Phi+><Phi+| + (1 - w) I/4."""
    return XState(a=w / 2 + (1 - w) / 4, b=(1 - w) / 4, d=w / 2 + (1 - w) / 4, z=0.0, f=w / 2)


def test_bell_state():
    t = measures.triple(BELL)
    assert t == pytest.approx((2.0, 1.0, 1.0), abs=1e-15)


def test_maximally_mixed():
    assert measures.triple(MAXIMALLY_MIXED) == (0.0, 0.0, 0.0)


@pytest.mark.parametrize("w", [0.1, 0.4, 0.8])
def test_werner_discord_closed_form(w):
    # Bell-diagonal with |c1|=|c3|=w: every axis is optimal
    h = lambda v: -sum(u * math.log2(u) for u in v if u > 0)  # noqa: E731
    eig = [(1 + 3 * w) / 4] + [(1 - w) / 4] * 3
    q = 1 - h(eig) + h(((1 + w) / 2, (1 - w) / 2))
    assert measures.discord_analytic(werner(w)).discord == pytest.approx(q, abs=1e-14)


@given(st.floats(0, 1))
def test_product_states_have_no_correlations(p):
    # equal marginals keep the inner diagonal entries equal
    x = xstate.from_matrix(np.kron(np.diag([p, 1 - p]), np.diag([p, 1 - p])))
    t = measures.triple(x)
    assert t.mutual == pytest.approx(0.0, abs=1e-12)
    assert t.discord == pytest.approx(0.0, abs=1e-12)


@given(xstates())
def test_ordering(x):
    t = measures.triple(x)
    assert t.discord >= 0 and t.classical >= -1e-12
    assert t.discord <= t.mutual + 1e-12
    assert t.mutual <= 2 * measures.marginal_entropy(x) + 1e-12


@settings(max_examples=40, deadline=None)
@given(xstates())
def test_analytic_matches_brute_force(x):
    analytic = measures.discord_analytic(x).discord
    numeric = measures.discord_numeric(x)
    assert numeric <= analytic + 1e-9
    assert abs(analytic - numeric) < 1e-6


@given(xstates())
def test_branch_selection(x):
    q1, q2 = measures.discord_branches(x)
    res = measures.discord_analytic(x)
    assert res.discord == pytest.approx(max(min(q1, q2), 0.0), abs=1e-15)
    if abs(q1 - q2) <= measures.BRANCH_TIE_TOL:
        assert res.branch is Branch.Q2


def test_in_plane_branch_uses_larger_coherence():
    x = XState(a=0.3, b=0.2, d=0.3, z=0.15, f=-0.05)
    cands = measures.axis_conditional_entropies(x)
    _, q2 = measures.discord_branches(x)
    base = measures.marginal_entropy(x) - measures.joint_entropy(x)
    assert q2 == pytest.approx(base + min(cands["x"], cands["y"]), abs=1e-15)


def test_axis_precedence():
    assert measures.best_axis({"x": 0.5, "y": 0.5, "z": 0.5}) == "x"
    assert measures.best_axis({"x": 0.6, "y": 0.5, "z": 0.5}) == "y"
    assert measures.best_axis({"x": 0.6, "y": 0.7, "z": 0.5}) == "z"


@given(xstates(), st.floats(0, math.pi), st.floats(0, 2 * math.pi))
def test_conditional_entropy_symmetries(x, theta, phi):
    base = measures.conditional_entropy_measured(x, MeasurementBasis(theta, phi))
    for other in (MeasurementBasis(theta, phi + math.pi), MeasurementBasis(theta, -phi),
                  MeasurementBasis(math.pi - theta, phi + math.pi)):
        assert measures.conditional_entropy_measured(x, other) == pytest.approx(base, abs=1e-9)


@given(xstates(), st.floats(0, math.pi / 2), st.floats(0, math.pi / 2))
def test_batched_matches_dense(x, theta, phi):
    rho = xstate.to_matrix(x).astype(complex)
    fast = measures._batched_conditional_entropy(rho, np.asarray(theta), np.asarray(phi))
    slow = measures.conditional_entropy_measured(x, MeasurementBasis(theta, phi))
    assert float(fast) == pytest.approx(slow, abs=1e-9)


def test_projectors_resolve_identity():
    p0, p1 = MeasurementBasis(0.3, 1.1).projectors()
    assert np.allclose(p0 + p1, np.eye(2))
    assert np.allclose(p0 @ p0, p0)
    assert np.allclose(p0 @ p1, 0)


def test_axis_entropies_match_measurements():
    x = XState(a=0.35, b=0.15, d=0.35, z=0.1, f=-0.12)
    cands = measures.axis_conditional_entropies(x)
    for axis, basis in (("x", MeasurementBasis(math.pi / 2, 0.0)),
                        ("y", MeasurementBasis(math.pi / 2, math.pi / 2)),
                        ("z", MeasurementBasis(0.0, 0.0))):
        assert cands[axis] == pytest.approx(measures.conditional_entropy_measured(x, basis), abs=1e-12)


def test_negative_probability():
    with pytest.raises(NegativeProbabilityError):
        measures.binary_entropy_terms([0.5, 0.6, -0.1])
    assert measures.binary_entropy_terms([0.5, 0.5, -1e-14]) == pytest.approx(1.0)


def test_numeric_triple_logs_disagreement(caplog):
    with caplog.at_level("INFO"):
        t = measures.triple(werner(0.5), numeric=True)
    assert t.discord == pytest.approx(measures.discord_analytic(werner(0.5)).discord, abs=1e-9)
