"""Mutual information, classical correlation and discord of X states.

All entropies are in bits.  Measurements are projective and act on
qubit B.  :func:`discord_analytic` is the closed form for X states.
It is the minimum over a z-axis measurement (branch ``Q1``) and the
best in-plane measurement (branch ``Q2``).  :func:`discord_numeric`
finds the same optimum by brute force over all projective measurements.
It exists to check the closed form.
"""
from __future__ import annotations

import enum
import logging
import math
from typing import Iterable, NamedTuple

import numpy as np
from scipy import optimize

from .errors import NegativeProbabilityError
from .xstate import PSD_TOL, XState, coefficients, eigenvalues, to_matrix

log = logging.getLogger(__name__)

BRANCH_TIE_TOL = 1e-12


class Branch(str, enum.Enum):
    Q1 = "Q1"
    Q2 = "Q2"


class CorrelationTriple(NamedTuple):
    mutual: float
    classical: float
    discord: float


class MeasurementBasis(NamedTuple):
    """Bloch direction of the projectors ``(I +/- n.sigma)/2`` on qubit B."""

    theta: float
    phi: float

    def direction(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])

    def projectors(self) -> tuple[np.ndarray, np.ndarray]:
        n = self.direction()
        ns = n[0] * _SX + n[1] * _SY + n[2] * _SZ
        return (_I2 + ns) / 2, (_I2 - ns) / 2


class AnalyticDiscord(NamedTuple):
    discord: float
    branch: Branch


_I2 = np.eye(2, dtype=complex)
_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SZ = np.array([[1, 0], [0, -1]], dtype=complex)


def _xlog2x(v: float) -> float:
    return v * math.log2(v) if v > 0.0 else 0.0


def binary_entropy_terms(spectrum: Iterable[float]) -> float:
    """Shannon/von Neumann entropy ``-sum v log2 v`` with ``0 log 0 = 0``."""
    total = 0.0
    for v in spectrum:
        if v < -PSD_TOL:
            raise NegativeProbabilityError(f"negative probability {v!r}")
        total -= _xlog2x(v)
    return max(total, 0.0)


def marginal_entropy(x: XState) -> float:
    """``S(rho_A) = S(rho_B)``; both marginals are fixed by ``c4``."""
    c4 = coefficients(x).c4
    return binary_entropy_terms(((1 + c4) / 2, (1 - c4) / 2))


def joint_entropy(x: XState) -> float:
    return binary_entropy_terms(eigenvalues(x))


def mutual_information(x: XState) -> float:
    return max(2.0 * marginal_entropy(x) - joint_entropy(x), 0.0)


def _conditional_z(x: XState) -> float:
    # measure sigma^z on B: A is left in diag(a, b) or diag(b, d)
    a, b, d = max(x.a, 0.0), max(x.b, 0.0), max(x.d, 0.0)
    return binary_entropy_terms((a, b)) - binary_entropy_terms((a + b,)) + \
        binary_entropy_terms((d, b)) - binary_entropy_terms((d + b,))


def _conditional_in_plane(gamma: float) -> float:
    gamma = min(gamma, 1.0)
    return binary_entropy_terms(((1 + gamma) / 2, (1 - gamma) / 2))


def axis_conditional_entropies(x: XState) -> dict[str, float]:
    """Measured conditional entropy for sigma^x, sigma^y and sigma^z on B.

    The in-plane optimum is always one of the two axes; which axis wins
    flips where ``|c1| = |c2|``.
    """
    c1, c2, _, c4 = coefficients(x)
    return {
        "x": _conditional_in_plane(math.hypot(c4, c1)),
        "y": _conditional_in_plane(math.hypot(c4, c2)),
        "z": _conditional_z(x),
    }


def optimal_axis(x: XState, tie_tol: float = BRANCH_TIE_TOL) -> str:
    """Axis of the best analytic measurement; ties resolve in order x, y, z."""
    return best_axis(axis_conditional_entropies(x), tie_tol)


def best_axis(cands: dict[str, float], tie_tol: float = BRANCH_TIE_TOL) -> str:
    best = min(cands.values())
    for axis in ("x", "y", "z"):
        if cands[axis] <= best + tie_tol:
            return axis
    raise AssertionError("unreachable")


def discord_branches(x: XState) -> tuple[float, float]:
    """The two candidate discords ``(Q1, Q2)``."""
    base = marginal_entropy(x) - joint_entropy(x)
    q1 = base + _conditional_z(x)
    gamma = math.sqrt((x.a - x.d) ** 2 + 4 * (abs(x.z) + abs(x.f)) ** 2)
    q2 = base + _conditional_in_plane(gamma)
    return q1, q2


def discord_analytic(x: XState) -> AnalyticDiscord:
    q1, q2 = discord_branches(x)
    if q1 < q2 - BRANCH_TIE_TOL:
        return AnalyticDiscord(max(q1, 0.0), Branch.Q1)
    return AnalyticDiscord(max(q2, 0.0), Branch.Q2)


# --------------------------------------------------------------------------
# brute-force oracle over projective measurements


def _entropy_dense(m: np.ndarray) -> float:
    return binary_entropy_terms(np.clip(np.linalg.eigvalsh(m), 0.0, None))


def conditional_entropy_measured(x: XState, m: MeasurementBasis) -> float:
    """``sum_i p_i S(rho_i)`` for the projective measurement ``m`` on B."""
    rho = to_matrix(x).astype(complex)
    total = 0.0
    for proj in m.projectors():
        k = np.kron(_I2, proj)
        post = k @ rho @ k
        p_i = float(np.trace(post).real)
        if p_i <= 0.0:
            continue
        total += p_i * _entropy_dense(post / p_i)
    return total


def _batched_conditional_entropy(rho: np.ndarray, theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    st = np.sin(theta)
    n = np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)
    ns = np.einsum("...k,kij->...ij", n, np.stack([_SX, _SY, _SZ]))
    r4 = rho.reshape(2, 2, 2, 2)  # [a, b, a', b']
    total = np.zeros(theta.shape)
    for sign in (1.0, -1.0):
        proj = (_I2 + sign * ns) / 2
        # unnormalised conditional state of A: Tr_B[(I x P) rho]
        m = np.einsum("ibjc,...cb->...ij", r4, proj)
        tr = np.real(m[..., 0, 0] + m[..., 1, 1])
        disc = np.sqrt(np.real(m[..., 0, 0] - m[..., 1, 1]) ** 2 + 4 * np.abs(m[..., 0, 1]) ** 2)
        for mu in ((tr + disc) / 2, (tr - disc) / 2):
            mu = np.clip(mu, 0.0, None)
            with np.errstate(divide="ignore", invalid="ignore"):
                term = np.where((mu > 0) & (tr > 0), -mu * np.log2(mu / np.where(tr > 0, tr, 1.0)), 0.0)
            total += term
    return total


def minimize_conditional_entropy(
    x: XState, grid: tuple[int, int] = (181, 91), refine: bool = True
) -> tuple[float, MeasurementBasis]:
    """Grid search plus Nelder-Mead polish of the measured conditional entropy.

    X states commute with ``sigma^z (x) sigma^z`` and are real, so the
    objective is unchanged under ``phi -> phi + pi`` and ``phi -> -phi``;
    flipping ``n -> -n`` only relabels outcomes.  The grid therefore covers
    ``theta, phi`` in ``[0, pi/2]``, and includes the three axes exactly.
    Ties on the grid go to the smallest theta, then the smallest phi.
    """
    rho = to_matrix(x).astype(complex)
    thetas = np.linspace(0.0, math.pi / 2, grid[0])
    phis = np.linspace(0.0, math.pi / 2, grid[1])
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    values = _batched_conditional_entropy(rho, tt, pp)
    i, j = np.unravel_index(np.argmin(values), values.shape)
    best = float(values[i, j])
    basis = MeasurementBasis(float(thetas[i]), float(phis[j]))
    if not refine:
        return best, basis

    def objective(v):
        return float(_batched_conditional_entropy(rho, np.asarray(v[0]), np.asarray(v[1])))

    dt, dp = thetas[1] - thetas[0], phis[1] - phis[0]
    start = np.array([basis.theta, basis.phi])
    simplex = np.array([start, start + [dt, 0.0], start + [0.0, dp]])
    res = optimize.minimize(
        objective, start, method="Nelder-Mead",
        options={"initial_simplex": simplex, "xatol": 1e-9, "fatol": 1e-12, "maxiter": 2000},
    )
    if res.fun < best:
        best = float(res.fun)
        basis = MeasurementBasis(float(res.x[0]), float(res.x[1]))
    return best, basis


def discord_numeric(x: XState, grid: tuple[int, int] = (181, 91)) -> float:
    rho = to_matrix(x)
    rho_b = np.array([[rho[0, 0] + rho[2, 2], rho[0, 1] + rho[2, 3]],
                      [rho[1, 0] + rho[3, 2], rho[1, 1] + rho[3, 3]]])
    cond, _ = minimize_conditional_entropy(x, grid)
    return _entropy_dense(rho_b) - _entropy_dense(rho) + cond


def triple(x: XState, numeric: bool = False) -> CorrelationTriple:
    mutual = mutual_information(x)
    discord = discord_numeric(x) if numeric else discord_analytic(x).discord
    if numeric:
        analytic = discord_analytic(x).discord
        if analytic - discord > 1e-6:
            log.info("analytic discord exceeds numeric optimum by %.3g for %s", analytic - discord, x)
    return CorrelationTriple(mutual, mutual - discord, discord)
