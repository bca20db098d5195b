"""Ground-state correlators of the transverse-field XY chain.

Everything here is in the thermodynamic limit.  The single-site
magnetization and the two-site correlators come from integrals over the
quasiparticle momentum ``phi`` in ``[0, pi]``.  The ``sigma^x`` and
``sigma^y`` correlators are Toeplitz determinants of the ``G_r``
coefficients.

XXZ correlators are not derived.  They, or any other externally computed
values, come in through :func:`load_correlator_table`.
"""
from __future__ import annotations

import enum
import io
import math
import os
from dataclasses import dataclass, field
from typing import Iterable, TextIO, Union

import numpy as np
from scipy import integrate

from .errors import (
    QuadratureError,
    SizeLimitError,
    TableParseError,
    TableRangeError,
    UnsupportedModelError,
)

MAX_SEPARATION = 16


class ModelKind(str, enum.Enum):
    XY = "xy"
    TIM = "tim"
    XXZ = "xxz"
    EXTERNAL = "external"


@dataclass(frozen=True)
class ModelPoint:
    """A spin model and its tuning parameters at one spin separation ``r``.

    ``lam`` is the inverse transverse-field strength, ``gamma`` the XY
    anisotropy and ``delta`` the XXZ anisotropy.  XY-type points ignore
    ``delta``; XXZ points ignore ``lam`` and ``gamma``.
    """

    kind: ModelKind
    lam: float = 0.0
    gamma: float = 1.0
    delta: float = 0.0
    r: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", ModelKind(self.kind))
        if isinstance(self.r, bool) or int(self.r) != self.r or self.r < 1:
            raise ValueError(f"r must be a positive integer, got {self.r!r}")
        object.__setattr__(self, "r", int(self.r))
        if not (self.lam >= 0.0) or not math.isfinite(self.lam):
            raise ValueError(f"lambda must be finite and >= 0, got {self.lam!r}")
        if not abs(self.gamma) <= 1.0:
            raise ValueError(f"gamma must lie in [-1, 1], got {self.gamma!r}")
        if not math.isfinite(self.delta):
            raise ValueError(f"delta must be finite, got {self.delta!r}")
        if self.kind is ModelKind.TIM and abs(self.gamma) != 1.0:
            raise ValueError("the transverse-field Ising model requires |gamma| = 1")

    @classmethod
    def xy(cls, lam: float, gamma: float, r: int = 1) -> "ModelPoint":
        return cls(ModelKind.XY, lam=float(lam), gamma=float(gamma), r=r)

    @classmethod
    def tim(cls, lam: float, r: int = 1, sign: int = 1) -> "ModelPoint":
        return cls(ModelKind.TIM, lam=float(lam), gamma=1.0 if sign >= 0 else -1.0, r=r)

    @classmethod
    def xxz(cls, delta: float, r: int = 1) -> "ModelPoint":
        return cls(ModelKind.XXZ, delta=float(delta), r=r)

    def parameter(self, name: str) -> float:
        return {"lambda": self.lam, "gamma": self.gamma, "delta": self.delta}[name]


@dataclass(frozen=True)
class CorrelatorSet:
    """Magnetization ``<sigma^z>`` and the correlators at separation r."""

    mz: float
    sxx: float
    syy: float
    szz: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.mz, self.sxx, self.syy, self.szz)


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 2**20

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


DEFAULT_QUAD = QuadratureConfig()

# First pass subdivision budget.  The full budget only gets allocated on retry;
# QUADPACK sizes its work arrays by the limit.
_FIRST_PASS_LIMIT = 500


def dispersion(phi, lam: float, gamma: float):
    """Quasiparticle energy ``omega_phi``; vectorised over ``phi``."""
    return np.hypot(gamma * lam * np.sin(phi), 1.0 + lam * np.cos(phi))


def _quad(func, a: float, b: float, quad: QuadratureConfig, points=None) -> float:
    def attempt(limit):
        return integrate.quad(
            func, a, b,
            epsabs=quad.abs_tol / 2, epsrel=quad.rel_tol,
            limit=limit, full_output=1, points=points,
        )

    # with full_output, a fourth element (the QUADPACK message) signals trouble
    limit = min(quad.max_subdivisions, _FIRST_PASS_LIMIT)
    out = attempt(limit)
    if len(out) > 3 and limit < quad.max_subdivisions:
        out = attempt(quad.max_subdivisions)
    value, abserr, info = out[0], out[1], out[2]
    if len(out) > 3 and abserr > max(quad.abs_tol / 2, quad.rel_tol * abs(value)):
        reason = out[3].strip().splitlines()[0]
        raise QuadratureError(
            f"integration did not converge ({reason}; error estimate {abserr:.3g}, "
            f"subdivisions used {info['last']})"
        )
    return value


def _integrate(func, lam: float, gamma: float, quad: QuadratureConfig) -> float:
    """Integral of ``func(phi, u)`` over ``[0, pi]`` with ``u = 1 + lam cos(phi)``.

    For ``lam > 1`` the gap nearly closes at ``cos(phi*) = -1/lam`` when
    ``gamma`` is small, leaving a peak of width ``~|gamma|``.  On each side
    of ``phi*`` the substitution ``phi = phi* +/- |gamma| sinh(t)`` turns
    that peak into a smooth integrand.
    """
    if lam <= 1.0 or gamma == 0.0:
        points = [math.acos(-1.0 / lam)] if lam > 1.0 else None
        return _quad(lambda phi: func(phi, 1.0 + lam * math.cos(phi)), 0.0, math.pi, quad, points)
    centre = math.acos(-1.0 / lam)
    log_s = math.log(abs(gamma))
    total = 0.0
    for sign, length in ((-1.0, centre), (1.0, math.pi - centre)):
        def g(t, sign=sign):
            grow, shrink = math.exp(t + log_s), math.exp(log_s - t)
            delta = sign * (grow - shrink) / 2
            # 1 + lam cos(phi) without cancellation near phi*
            u = -2.0 * lam * math.sin(centre + delta / 2) * math.sin(delta / 2)
            return func(centre + delta, u) * (grow + shrink) / 2

        total += _quad(g, 0.0, math.asinh(length / abs(gamma)), quad)
    return total


def _even_part(r: int, lam: float, gamma: float, quad: QuadratureConfig) -> float:
    # (1/pi) int cos(r phi) (1 + lam cos phi) / omega
    def f(phi, u):
        return math.cos(r * phi) * u / math.hypot(gamma * lam * math.sin(phi), u)

    if lam == 0.0:
        return 1.0 if r == 0 else 0.0
    return _integrate(f, lam, gamma, quad) / math.pi


def _odd_part(r: int, lam: float, gamma: float, quad: QuadratureConfig) -> float:
    # (gamma lam / pi) int sin(r phi) sin(phi) / omega
    if r == 0 or lam == 0.0 or gamma == 0.0:
        return 0.0

    def f(phi, u):
        return math.sin(r * phi) * math.sin(phi) / math.hypot(gamma * lam * math.sin(phi), u)

    return gamma * lam * _integrate(f, lam, gamma, quad) / math.pi


def magnetization(lam: float, gamma: float, quad: QuadratureConfig = DEFAULT_QUAD) -> float:
    """Single-site ``<sigma^z>``; equals -1 at ``lam = 0``."""
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    return -_even_part(0, lam, gamma, quad)


def g_coefficient(r: int, lam: float, gamma: float, quad: QuadratureConfig = DEFAULT_QUAD) -> float:
    k = abs(int(r))
    even = _even_part(k, lam, gamma, quad)
    odd = _odd_part(k, lam, gamma, quad)
    # the sine integral is odd in r
    return even - odd if r >= 0 else even + odd


def toeplitz_correlators(g: dict[int, float], r: int) -> tuple[float, float]:
    """Return ``(sxx, syy)`` from a mapping ``k -> G_k`` covering ``-r..r``."""
    if r == 1:
        return float(g[-1]), float(g[1])
    idx = np.arange(r)
    offset = idx[:, None] - idx[None, :]
    gxx = np.vectorize(lambda k: g[int(k)])(offset - 1)
    gyy = np.vectorize(lambda k: g[int(k)])(offset + 1)
    # numpy's det is LU with partial pivoting
    return float(np.linalg.det(gxx)), float(np.linalg.det(gyy))


def correlator_set(point: ModelPoint, quad: QuadratureConfig = DEFAULT_QUAD) -> CorrelatorSet:
    if point.kind not in (ModelKind.XY, ModelKind.TIM):
        raise UnsupportedModelError(
            f"{point.kind.value} correlators are not computed here; load them from a table"
        )
    r = point.r
    if r > MAX_SEPARATION:
        raise SizeLimitError(f"r={r} exceeds the Toeplitz size cap {MAX_SEPARATION}")
    lam, gamma = point.lam, point.gamma
    g: dict[int, float] = {}
    for k in range(r + 1):
        even = _even_part(k, lam, gamma, quad)
        odd = _odd_part(k, lam, gamma, quad)
        g[k] = even - odd
        g[-k] = even + odd
    mz = -g[0]
    sxx, syy = toeplitz_correlators(g, r)
    szz = mz * mz - g[r] * g[-r]
    return CorrelatorSet(mz=mz, sxx=sxx, syy=syy, szz=szz)


# --------------------------------------------------------------------------
# correlator tables

_CORRELATOR_FIELDS = ("mz", "sxx", "syy", "szz")
_PARAM_ALIASES = {"lambda": "lam", "lam": "lam", "gamma": "gamma", "delta": "delta", "r": "r"}


@dataclass
class _Header:
    names: list[str] = field(default_factory=list)


def _parse_number(text: str, line: int, name: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise TableParseError(line, f"field {name!r}: cannot parse {text!r} as a number") from None
    if not math.isfinite(value):
        raise TableParseError(line, f"field {name!r}: non-finite value {text!r}")
    return value


def _parse_row(fields: list[str], header: _Header, line: int) -> tuple[ModelPoint, CorrelatorSet]:
    if len(fields) < 6:
        raise TableParseError(line, f"expected at least 6 fields, found {len(fields)}")
    kind_text = fields[0].lower()
    try:
        kind = ModelKind(kind_text)
    except ValueError:
        raise TableParseError(line, f"unknown model kind {fields[0]!r}") from None

    params: dict[str, float] = {}
    for pos, token in enumerate(fields[1:-4], start=1):
        if "=" in token:
            key, _, text = token.partition("=")
            key = key.strip().lower()
        else:
            key = header.names[pos] if pos < len(header.names) else ""
            text = token
        if key not in _PARAM_ALIASES:
            raise TableParseError(line, f"unknown parameter {key or token!r}")
        if text.strip() == "":
            continue
        params[_PARAM_ALIASES[key]] = _parse_number(text, line, key)

    values = [_parse_number(t, line, n) for t, n in zip(fields[-4:], _CORRELATOR_FIELDS)]
    for name, value in zip(_CORRELATOR_FIELDS, values):
        if not -1.0 <= value <= 1.0:
            raise TableRangeError(line, name, value)

    r = params.pop("r", 1.0)
    if r != int(r):
        raise TableParseError(line, f"r must be an integer, got {r!r}")
    if kind is ModelKind.TIM:
        params.setdefault("gamma", 1.0)
    try:
        point = ModelPoint(kind, r=int(r), **params)
    except ValueError as exc:
        raise TableParseError(line, str(exc)) from None
    return point, CorrelatorSet(*values)


def load_correlator_table(
    source: Union[str, os.PathLike, TextIO, Iterable[str]],
) -> list[tuple[ModelPoint, CorrelatorSet]]:
    """Parse a comma-separated correlator table.

    The first non-comment line is a header whose first column is ``kind``
    and whose last four columns are ``mz,sxx,syy,szz``.  Each data row
    carries the model kind, its parameters, and four correlators.
    Parameters may be plain values named by the header column at the same
    position, or self-describing ``name=value`` tokens::

        kind,delta,r,mz,sxx,syy,szz
        xxz,delta=0.5,r=1,0.0,-0.3,-0.3,0.1
        xxz,-0.5,1,0.0,-0.4,-0.4,-0.2

    Lines starting with ``#`` and blank lines are skipped.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            return load_correlator_table(fh)
    if isinstance(source, io.TextIOBase) or hasattr(source, "read"):
        lines: Iterable[str] = source.read().splitlines()
    else:
        lines = source

    header: _Header | None = None
    rows = []
    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        fields = [f.strip() for f in text.split(",")]
        if header is None:
            names = [f.lower() for f in fields]
            if names[0] != "kind" or tuple(names[-4:]) != _CORRELATOR_FIELDS:
                raise TableParseError(
                    lineno, "header must start with 'kind' and end with 'mz,sxx,syy,szz'"
                )
            header = _Header(names)
            continue
        rows.append(_parse_row(fields, header, lineno))
    return rows
