"""Cross-checks between closed forms and independent brute-force routes.

Each oracle compares one analytic path against a route that shares none
of its algebra:

* coefficient maps vs the full tensor-product Kraus sum,
* closed-form spectrum vs dense diagonalisation,
* analytic discord vs brute-force minimisation over projective measurements,
* Kraus completeness,
* the equal split ``C = Q = I/2`` on pure X states.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import channels, measures, xstate
from .channels import ChannelKind

P_VALUES = tuple(round(0.1 * k, 1) for k in range(1, 10))


@dataclass(frozen=True)
class OracleResult:
    name: str
    max_dev: float
    median_dev: float
    tolerance: float
    passed: bool
    note: str = ""


def _summary(name, devs, tol, extra_ok=True, note="", median_tol: Optional[float] = None):
    devs = np.asarray(devs, dtype=float)
    mx = float(devs.max()) if devs.size else 0.0
    med = float(np.median(devs)) if devs.size else 0.0
    ok = mx < tol and extra_ok and (median_tol is None or med < median_tol)
    return OracleResult(name, mx, med, tol, bool(ok), note)


def coefficient_maps(states, p_values=P_VALUES) -> OracleResult:
    devs = []
    for x in states:
        c0 = xstate.coefficients(x)
        for kind in (ChannelKind.BF, ChannelKind.PF, ChannelKind.BPF):
            for p in p_values:
                mapped = channels.evolve_coefficients(c0, kind, p)
                kraus = xstate.coefficients(channels.evolve_two_qubit(x, kind, p))
                devs.append(max(abs(u - v) for u, v in zip(mapped, kraus)))
    return _summary("coefficient_maps_vs_kraus", devs, 1e-12)


def spectrum(states) -> OracleResult:
    devs = []
    for x in states:
        closed = np.sort(np.array(xstate.eigenvalues(x, clamp=False)))
        dense = np.linalg.eigvalsh(xstate.to_matrix(x))
        devs.append(float(np.max(np.abs(closed - dense))))
    return _summary("spectrum_vs_dense", devs, 1e-12)


def discord(states, grid=(181, 91)) -> OracleResult:
    devs, worst_excess = [], -math.inf
    for x in states:
        analytic = measures.discord_analytic(x).discord
        numeric = measures.discord_numeric(x, grid)
        devs.append(abs(analytic - numeric))
        worst_excess = max(worst_excess, numeric - analytic)
    envelope = worst_excess <= 1e-9
    return _summary(
        "analytic_vs_numeric_discord", devs, 1e-4, extra_ok=envelope, median_tol=1e-6,
        note=f"max(numeric - analytic) = {worst_excess:.3g}",
    )


def completeness(n_points: int = 101) -> OracleResult:
    devs = [
        channels.completeness_residual(channels.kraus_ops(kind, p))
        for kind in ChannelKind
        for p in np.linspace(0.0, 1.0, n_points)
    ]
    return _summary("kraus_completeness", devs, 1e-14)


def random_pure_xstate(rng: np.random.Generator) -> xstate.XState:
    """``cos t |00> + sin t |11>`` or ``(|01> +/- |10>)/sqrt 2``."""
    if rng.random() < 0.8:
        t = rng.uniform(0.0, math.pi)
        c, s = math.cos(t), math.sin(t)
        return xstate.XState(a=c * c, b=0.0, d=s * s, z=0.0, f=c * s)
    sign = 1.0 if rng.random() < 0.5 else -1.0
    return xstate.XState(a=0.0, b=0.5, d=0.0, z=sign * 0.5, f=0.0)


def pure_split(states) -> OracleResult:
    devs = []
    for x in states:
        t = measures.triple(x)
        devs.append(max(abs(t.classical - t.mutual / 2), abs(t.discord - t.mutual / 2)))
    return _summary("pure_state_equal_split", devs, 1e-9)


def run_all(seed: int = 0, n_states: int = 1000,
            progress: Optional[Callable[[str], None]] = None) -> list[OracleResult]:
    rng = np.random.default_rng(seed)
    states = [xstate.random_xstate(rng) for _ in range(n_states)]
    pure = [random_pure_xstate(rng) for _ in range(n_states)]
    results = []
    for name, job in (
        ("coefficient maps", lambda: coefficient_maps(states)),
        ("spectrum", lambda: spectrum(states)),
        ("discord", lambda: discord(states)),
        ("completeness", completeness),
        ("pure states", lambda: pure_split(pure)),
    ):
        if progress:
            progress(name)
        results.append(job())
    return results
