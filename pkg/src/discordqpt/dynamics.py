"""Correlation trajectories, sudden-change detection and critical scans.

A sudden change in the decay of classical correlation and discord happens
where the optimal measurement on qubit B switches axis.  For X states the
candidates are sigma^z (branch Q1) and the better of sigma^x and sigma^y
(branch Q2).  The detector follows the best of the three axis candidates
along the coefficient maps.  It brackets the first switch on a grid and
root-finds on the smooth difference of the two candidate entropies.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy import optimize

from .channels import ChannelKind, evolve_coefficients, evolve_two_qubit
from .correlators import (
    DEFAULT_QUAD,
    CorrelatorSet,
    ModelKind,
    ModelPoint,
    QuadratureConfig,
    correlator_set,
)
from .errors import InsufficientDataError, UnclassifiableError, UnsupportedChannelError
from .measures import (
    BRANCH_TIE_TOL,
    Branch,
    CorrelationTriple,
    axis_conditional_entropies,
    discord_analytic,
    best_axis as _best_axis,
    triple,
)
from .xstate import XState, coefficients, from_coefficients, from_correlators

Source = Union[ModelPoint, CorrelatorSet, XState, tuple]

DEFAULT_P_MAX = 0.999
DEFAULT_P_POINTS = 1001
VARIATION_TOL = 1e-6
SLOPE_TOL = 1e-6
CRITICAL_POINTS = {"lambda": (1.0,), "gamma": (0.0,), "delta": (-1.0, 1.0)}
UNITAL = (ChannelKind.BF, ChannelKind.PF, ChannelKind.BPF)


class DynamicsType(str, enum.Enum):
    TYPE_I = "TypeI"
    TYPE_II = "TypeII"
    TYPE_III = "TypeIII"


class DetectionMethod(str, enum.Enum):
    BRANCH_CROSSING = "branch-crossing"
    SLOPE_CHANGE = "slope-change"


def default_p_grid() -> np.ndarray:
    return np.linspace(0.0, DEFAULT_P_MAX, DEFAULT_P_POINTS)


def resolve_state(source: Source, quad: QuadratureConfig = DEFAULT_QUAD) -> XState:
    """Initial X state from a model point, correlators, a table row, or a state."""
    if isinstance(source, XState):
        return source.validate()
    if isinstance(source, CorrelatorSet):
        return from_correlators(source)
    if isinstance(source, tuple) and len(source) == 2 and isinstance(source[1], CorrelatorSet):
        return from_correlators(source[1])
    if isinstance(source, ModelPoint):
        return from_correlators(correlator_set(source, quad))
    raise TypeError(f"cannot build an X state from {type(source).__name__}")


def _model_of(source: Source) -> Optional[ModelPoint]:
    if isinstance(source, ModelPoint):
        return source
    if isinstance(source, tuple) and len(source) == 2 and isinstance(source[0], ModelPoint):
        return source[0]
    return None


def evolve(x0: XState, channel: ChannelKind, p: float) -> XState:
    channel = ChannelKind(channel)
    if channel is ChannelKind.AD:
        return evolve_two_qubit(x0, channel, p).validate()
    return from_coefficients(evolve_coefficients(coefficients(x0), channel, p))


@dataclass
class Trajectory:
    channel: ChannelKind
    model: Optional[ModelPoint]
    initial: XState
    p_grid: np.ndarray
    triples: list[CorrelationTriple]
    branches: list[Branch]
    axes: list[str] = field(default_factory=list)
    candidates: list[dict] = field(default_factory=list)

    def __post_init__(self):
        if len(self.triples) != len(self.p_grid) or len(self.branches) != len(self.p_grid):
            raise ValueError("trajectory columns must match the p grid length")

    @property
    def mutual(self) -> np.ndarray:
        return np.array([t.mutual for t in self.triples])

    @property
    def classical(self) -> np.ndarray:
        return np.array([t.classical for t in self.triples])

    @property
    def discord(self) -> np.ndarray:
        return np.array([t.discord for t in self.triples])


def _check_grid(p_grid) -> np.ndarray:
    grid = np.asarray(p_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("p grid must be a non-empty 1-d sequence")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("p grid must be strictly increasing")
    if grid[0] < 0.0 or grid[-1] >= 1.0:
        raise ValueError("p grid must lie in [0, 1); evaluate p = 1 with limit_triple")
    return grid


def trajectory(
    source: Source,
    channel: ChannelKind,
    p_grid: Optional[Sequence[float]] = None,
    quad: QuadratureConfig = DEFAULT_QUAD,
) -> Trajectory:
    channel = ChannelKind(channel)
    grid = _check_grid(default_p_grid() if p_grid is None else p_grid)
    x0 = resolve_state(source, quad)
    triples, branches, axes, cands = [], [], [], []
    for p in grid:
        x = evolve(x0, channel, p)
        triples.append(triple(x))
        branches.append(discord_analytic(x).branch)
        cands.append(axis_conditional_entropies(x))
        axes.append(_best_axis(cands[-1]))
    return Trajectory(channel, _model_of(source), x0, grid, triples, branches, axes, cands)


def limit_triple(source: Source, channel: ChannelKind, quad: QuadratureConfig = DEFAULT_QUAD) -> CorrelationTriple:
    """Correlations of the fully decohered state at ``p = 1``."""
    return triple(evolve(resolve_state(source, quad), channel, 1.0))


# --------------------------------------------------------------------------
# sudden change


@dataclass(frozen=True)
class SuddenChange:
    p_sc: Optional[float]
    method: Optional[DetectionMethod]
    axes: Optional[tuple[str, str]] = None

    @property
    def found(self) -> bool:
        return self.p_sc is not None


def first_switch(labels: Sequence[str], candidates: Sequence[dict]) -> Optional[int]:
    """Index ``i`` of the first genuine optimal-axis switch between ``i`` and ``i+1``.

    A label change only counts if the outgoing axis was strictly better
    than the incoming one at ``i`` or one step earlier.  Degenerate
    candidates that split apart (for instance sigma^x and sigma^y when
    ``c1 = c2``) do not count.
    """
    for i in range(len(labels) - 1):
        old, new = labels[i], labels[i + 1]
        if old == new:
            continue
        for j in (i, i - 1):
            if j >= 0 and candidates[j][new] - candidates[j][old] > BRANCH_TIE_TOL:
                return i
    return None


def _branch_crossing(x0, channel, grid) -> Optional[tuple[float, str, str]]:
    c0 = coefficients(x0)

    def entropies(p):
        return axis_conditional_entropies(from_coefficients(evolve_coefficients(c0, channel, p), validate=False))

    cands = [entropies(p) for p in grid]
    labels = [_best_axis(c) for c in cands]
    i = first_switch(labels, cands)
    if i is None:
        return None
    old, new = labels[i], labels[i + 1]

    def gap(p):
        e = entropies(p)
        return e[old] - e[new]

    lo, hi = grid[i], grid[i + 1]
    if gap(lo) >= 0.0:
        root = lo
    elif gap(hi) <= 0.0:
        root = hi
    else:
        root = optimize.brentq(gap, lo, hi, xtol=1e-12, rtol=4 * np.finfo(float).eps)
    return float(root), old, new


def _one_sided_derivatives(y: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    """Fourth-order backward and forward five-point derivatives (NaN near edges)."""
    n = len(y)
    back = np.full(n, np.nan)
    fwd = np.full(n, np.nan)
    i = np.arange(4, n)
    back[i] = (25 * y[i] - 48 * y[i - 1] + 36 * y[i - 2] - 16 * y[i - 3] + 3 * y[i - 4]) / (12 * h)
    i = np.arange(0, n - 4)
    fwd[i] = (-25 * y[i] + 48 * y[i + 1] - 36 * y[i + 2] + 16 * y[i + 3] - 3 * y[i + 4]) / (12 * h)
    return back, fwd


def detect_kink(p_grid: np.ndarray, values: np.ndarray, jump_tol: float = 1e-3,
                contrast: float = 100.0) -> Optional[float]:
    """Locate a slope discontinuity in a uniformly sampled curve.

    At each interior point the backward and forward five-point slopes are
    compared.  Where the curve is smooth they agree to truncation error.
    The largest mismatch counts as a kink only if it exceeds ``jump_tol``
    and is ``contrast`` times the median mismatch.
    """
    p_grid = np.asarray(p_grid, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(p_grid) < 9:
        return None
    h = float(np.mean(np.diff(p_grid)))
    back, fwd = _one_sided_derivatives(values, h)
    score = np.abs(fwd - back)
    valid = ~np.isnan(score)
    if not valid.any():
        return None
    s = np.where(valid, score, -np.inf)
    k = int(np.argmax(s))
    med = float(np.median(score[valid]))
    if s[k] > jump_tol and s[k] > contrast * med:
        return float(p_grid[k])
    return None


def detect_p_sc(
    source: Source,
    channel: ChannelKind,
    search_interval: tuple[float, float] = (0.0, DEFAULT_P_MAX),
    grid_points: int = 2001,
    method: str = "auto",
    quad: QuadratureConfig = DEFAULT_QUAD,
) -> SuddenChange:
    """Parametrized time of the first switch of the optimal measurement.

    ``method`` is ``"branch"`` (root-find on candidate-entropy differences),
    ``"slope"`` (kink detection on the sampled classical correlation) or
    ``"auto"`` (branch first, slope as fallback).  No change is reported
    as ``SuddenChange(None, None)``.
    """
    channel = ChannelKind(channel)
    if channel not in UNITAL:
        raise UnsupportedChannelError("sudden-change detection needs a BF, PF or BPF coefficient map")
    lo, hi = search_interval
    if not 0.0 <= lo < hi < 1.0:
        raise ValueError("search interval must satisfy 0 <= lo < hi < 1")
    x0 = resolve_state(source, quad)
    grid = np.linspace(lo, hi, grid_points)
    if method in ("auto", "branch"):
        hit = _branch_crossing(x0, channel, grid)
        if hit is not None:
            return SuddenChange(hit[0], DetectionMethod.BRANCH_CROSSING, (hit[1], hit[2]))
        if method == "branch":
            return SuddenChange(None, None)
    if method not in ("auto", "slope"):
        raise ValueError(f"unknown detection method {method!r}")
    traj = trajectory(x0, channel, grid)
    p = detect_kink(grid, traj.classical)
    if p is None:
        return SuddenChange(None, None)
    return SuddenChange(p, DetectionMethod.SLOPE_CHANGE)


# --------------------------------------------------------------------------
# classification


def _max_rise(y: np.ndarray) -> float:
    """Largest increase of ``y`` over any earlier value (0 for non-increasing)."""
    return float(np.max(y - np.minimum.accumulate(y)))


def classify(traj: Trajectory, tol: float = VARIATION_TOL) -> DynamicsType:
    """Assign one of the three dynamics types.

    Type I: classical correlation constant while discord decays.  This also
    covers a frozen-discord window that ends at a switch.  Type II: the
    optimal measurement switches at some ``p_sc``.  Type III: no switch,
    with C and Q both non-increasing.  Anything else raises
    :class:`UnclassifiableError`.
    """
    if len(traj.p_grid) < 50:
        raise ValueError("classification needs at least 50 grid points")
    c, q = traj.classical, traj.discord
    q_decays = (q[0] - q[-1] > tol) and _max_rise(q) <= tol
    if np.ptp(c) < tol and q_decays:
        return DynamicsType.TYPE_I
    switch = first_switch(traj.axes, traj.candidates)
    if switch is not None:
        if np.ptp(q[: switch + 1]) < tol:
            return DynamicsType.TYPE_I
        return DynamicsType.TYPE_II
    if _max_rise(c) <= tol and _max_rise(q) <= tol:
        return DynamicsType.TYPE_III
    raise UnclassifiableError(
        f"no sudden change, yet C rises by {_max_rise(c):.3g} and Q by {_max_rise(q):.3g}"
    )


def q_exceeds_c_interval(traj: Trajectory, margin: float = 1e-9) -> Optional[tuple[float, float]]:
    """Longest contiguous stretch of the grid where discord exceeds C."""
    above = (traj.discord - traj.classical) > margin
    best = None
    start = None
    for i, flag in enumerate(np.append(above, False)):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            if best is None or i - start > best[1] - best[0]:
                best = (start, i)
            start = None
    if best is None:
        return None
    return float(traj.p_grid[best[0]]), float(traj.p_grid[best[1] - 1])


# --------------------------------------------------------------------------
# critical scans


@dataclass(frozen=True)
class DivergenceIndicator:
    """Finite-grid stand-in for a diverging derivative.

    ``fires`` when the derivative magnitude at the grid point nearest the
    critical value is at least ``factor`` times its magnitude ``steps``
    grid points further away.  ``monotone_tail`` reports whether the
    magnitude grows strictly over the last five points approaching it.
    """

    critical: float
    near: float
    far: float
    ratio: float
    fires: bool
    monotone_tail: bool


@dataclass
class CriticalScan:
    parameter: str
    channel: ChannelKind
    grid: np.ndarray
    p_sc: list[Optional[float]]
    derivative: list[Optional[float]]
    indicator: Optional[DivergenceIndicator] = None


def _runs(mask: Sequence[bool]) -> list[tuple[int, int]]:
    runs, start = [], None
    for i, flag in enumerate(list(mask) + [False]):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            runs.append((start, i))
            start = None
    return runs


def finite_difference(grid: np.ndarray, values: Sequence[Optional[float]]) -> list[Optional[float]]:
    """Derivative on each run of at least three consecutive present values.

    Central differences inside a run, second-order one-sided at its ends.
    """
    out: list[Optional[float]] = [None] * len(values)
    present = [v is not None for v in values]
    for s, e in _runs(present):
        if e - s < 3:
            continue
        d = np.gradient(np.array(values[s:e], dtype=float), grid[s:e], edge_order=2)
        out[s:e] = [float(v) for v in d]
    return out


def divergence_indicator(
    scan: CriticalScan, critical: Optional[float] = None, steps: int = 10, factor: float = 2.0
) -> Optional[DivergenceIndicator]:
    if critical is None:
        critical = CRITICAL_POINTS[scan.parameter][-1]
    idx = [i for i, d in enumerate(scan.derivative) if d is not None]
    if not idx:
        return None
    near = min(idx, key=lambda i: (abs(scan.grid[i] - critical), i))
    away = -1 if scan.grid[near] <= critical else 1
    far = near + away * steps
    if not 0 <= far < len(scan.grid) or scan.derivative[far] is None:
        return None
    d_near = abs(scan.derivative[near])
    d_far = abs(scan.derivative[far])
    ratio = d_near / d_far if d_far > 0 else math.inf
    tail_idx = [near + away * k for k in range(4, -1, -1)]
    tail = [scan.derivative[i] for i in tail_idx if 0 <= i < len(scan.grid)]
    monotone = len(tail) == 5 and all(t is not None for t in tail) and all(
        abs(b) > abs(a) for a, b in zip(tail, tail[1:])
    )
    return DivergenceIndicator(
        critical=float(critical),
        near=float(scan.grid[near]),
        far=float(scan.grid[far]),
        ratio=float(ratio),
        fires=ratio >= factor,
        monotone_tail=monotone,
    )


def _scan_point(args) -> Optional[float]:
    source, channel, quad = args
    return detect_p_sc(source, channel, method="branch", quad=quad).p_sc


def scan(
    parameter: str,
    grid: Sequence[float],
    fixed: Optional[dict] = None,
    channel: ChannelKind = ChannelKind.BPF,
    r: int = 1,
    table: Optional[Sequence[tuple[ModelPoint, CorrelatorSet]]] = None,
    quad: QuadratureConfig = DEFAULT_QUAD,
    allow_critical: bool = False,
    critical: Optional[float] = None,
    workers: int = 1,
) -> CriticalScan:
    """p_sc over a grid of one tuning parameter, with its derivative.

    ``lambda`` and ``gamma`` scans build XY points, holding the other
    parameter at ``fixed``.  ``delta`` scans take XXZ correlators from
    ``table``, which must cover every grid value at separation ``r``.
    """
    if parameter not in CRITICAL_POINTS:
        raise ValueError(f"unknown scan parameter {parameter!r}")
    channel = ChannelKind(channel)
    fixed = dict(fixed or {})
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or np.any(np.diff(grid) <= 0):
        raise ValueError("scan grid must be strictly increasing")
    if not allow_critical:
        for crit in CRITICAL_POINTS[parameter]:
            if np.any(np.abs(grid - crit) < 1e-12):
                raise ValueError(f"grid contains the critical point {parameter}={crit}")

    if parameter == "lambda":
        sources = [ModelPoint.xy(v, fixed["gamma"], r) for v in grid]
    elif parameter == "gamma":
        sources = [ModelPoint.xy(fixed["lambda"], v, r) for v in grid]
    else:
        if table is None:
            raise ValueError("delta scans need a correlator table")
        lookup = {
            (round(pt.delta, 12), pt.r): (pt, cs) for pt, cs in table if pt.kind is ModelKind.XXZ
        }
        missing = [v for v in grid if (round(float(v), 12), r) not in lookup]
        if missing:
            raise ValueError(f"correlator table lacks delta values {missing[:5]} at r={r}")
        sources = [lookup[(round(float(v), 12), r)] for v in grid]

    jobs = [(s, channel, quad) for s in sources]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            p_sc = list(pool.map(_scan_point, jobs))
    else:
        p_sc = [_scan_point(j) for j in jobs]

    derivative = finite_difference(grid, p_sc)
    if all(d is None for d in derivative):
        raise InsufficientDataError(
            f"fewer than three consecutive p_sc values on the {parameter} grid"
        )
    result = CriticalScan(parameter, channel, grid, p_sc, derivative)
    result.indicator = divergence_indicator(result, critical)
    return result
