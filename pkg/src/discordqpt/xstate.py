"""Two-qubit X states stored as the five real parameters ``a, b, d, z, f``.

In the computational basis ``{00, 01, 10, 11}`` the density matrix is::

    [[a, 0, 0, f],
     [0, b, z, 0],
     [0, z, b, 0],
     [f, 0, 0, d]]
"""
from __future__ import annotations

import math
from dataclasses import astuple, dataclass
from typing import NamedTuple

import numpy as np

from .correlators import CorrelatorSet
from .errors import InvalidStateError

TRACE_TOL = 1e-12
PSD_TOL = 1e-12


class CorrelationCoefficients(NamedTuple):
    c1: float
    c2: float
    c3: float
    c4: float


class Spectrum(NamedTuple):
    lam0: float
    lam1: float
    lam2: float
    lam3: float


@dataclass(frozen=True)
class XState:
    a: float
    b: float
    d: float
    z: float
    f: float

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return astuple(self)

    def problems(self, tol: float = PSD_TOL) -> list[str]:
        """Human-readable list of violated validity conditions (empty if valid)."""
        out = []
        trace = self.a + 2 * self.b + self.d
        if abs(trace - 1.0) > TRACE_TOL:
            out.append(f"trace {trace!r} != 1")
        for name in ("a", "b", "d"):
            if getattr(self, name) < -tol:
                out.append(f"{name}={getattr(self, name)!r} < 0")
        if abs(self.z) > self.b + tol:
            out.append(f"|z|={abs(self.z)!r} > b={self.b!r}")
        ad = max(self.a, 0.0) * max(self.d, 0.0)
        if abs(self.f) > math.sqrt(ad) + tol:
            out.append(f"|f|={abs(self.f)!r} > sqrt(a d)={math.sqrt(ad)!r}")
        low = min(eigenvalues(self, clamp=False))
        if low < -tol:
            out.append(f"negative eigenvalue {low!r}")
        return out

    def is_valid(self, tol: float = PSD_TOL) -> bool:
        return not self.problems(tol)

    def validate(self, tol: float = PSD_TOL) -> "XState":
        problems = self.problems(tol)
        if problems:
            raise InvalidStateError("invalid X state: " + "; ".join(problems))
        return self


BELL = XState(a=0.5, b=0.0, d=0.5, z=0.0, f=0.5)
MAXIMALLY_MIXED = XState(a=0.25, b=0.25, d=0.25, z=0.0, f=0.0)


def from_correlators(c: CorrelatorSet) -> XState:
    mz, szz = c.mz, c.szz
    state = XState(
        a=0.25 + mz / 2 + szz / 4,
        b=(1.0 - szz) / 4,
        d=0.25 - mz / 2 + szz / 4,
        z=(c.sxx + c.syy) / 4,
        f=(c.sxx - c.syy) / 4,
    )
    return state.validate()


def coefficients(x: XState) -> CorrelationCoefficients:
    return CorrelationCoefficients(
        c1=2 * x.z + 2 * x.f,
        c2=2 * x.z - 2 * x.f,
        c3=x.a + x.d - 2 * x.b,
        c4=x.a - x.d,
    )


def from_coefficients(c: CorrelationCoefficients, validate: bool = True) -> XState:
    """Invert :func:`coefficients` using unit trace to fix ``a + d + 2b = 1``."""
    c1, c2, c3, c4 = c
    state = XState(
        a=(1.0 + c3) / 4 + c4 / 2,
        b=(1.0 - c3) / 4,
        d=(1.0 + c3) / 4 - c4 / 2,
        z=(c1 + c2) / 4,
        f=(c1 - c2) / 4,
    )
    return state.validate() if validate else state


def eigenvalues(x: XState, clamp: bool = True) -> Spectrum:
    """Closed-form spectrum.

    With ``clamp`` set, values in ``[-1e-12, 0)`` are raised to exactly zero
    so downstream ``log2`` terms stay finite.  Anything more negative is
    returned as is.
    """
    c1, c2, c3, c4 = coefficients(x)
    root = math.sqrt(4 * c4 * c4 + (c1 - c2) ** 2)
    vals = (
        ((1 + c3) + root) / 4,
        ((1 + c3) - root) / 4,
        (1 - c3 + c1 + c2) / 4,
        (1 - c3 - c1 - c2) / 4,
    )
    if clamp:
        vals = tuple(0.0 if -PSD_TOL <= v < 0.0 else v for v in vals)
    return Spectrum(*vals)


def to_matrix(x: XState) -> np.ndarray:
    m = np.zeros((4, 4))
    m[0, 0], m[1, 1], m[2, 2], m[3, 3] = x.a, x.b, x.b, x.d
    m[1, 2] = m[2, 1] = x.z
    m[0, 3] = m[3, 0] = x.f
    return m


# off-pattern positions; everything except the diagonal and anti-diagonal
_X_MASK = np.ones((4, 4), dtype=bool)
for _i in range(4):
    _X_MASK[_i, _i] = False
    _X_MASK[_i, 3 - _i] = False


def from_matrix(m: np.ndarray, tol: float = 1e-13) -> XState:
    """Re-extract the five parameters from a 4x4 matrix in X form.

    Raises :class:`ValueError` if the matrix leaves the X pattern, has
    unequal inner diagonal entries, or carries imaginary parts above ``tol``.
    """
    m = np.asarray(m)
    off = np.max(np.abs(m[_X_MASK])) if m.size else 0.0
    if off > tol:
        raise ValueError(f"off-pattern element of magnitude {off:.3g}")
    if np.iscomplexobj(m):
        imag = np.max(np.abs(m.imag))
        if imag > tol:
            raise ValueError(f"imaginary part of magnitude {imag:.3g}")
        m = m.real
    if abs(m[1, 1] - m[2, 2]) > tol:
        raise ValueError("inner diagonal entries differ")
    if abs(m[1, 2] - m[2, 1]) > tol or abs(m[0, 3] - m[3, 0]) > tol:
        raise ValueError("matrix is not symmetric")
    return XState(
        a=float(m[0, 0]),
        b=float(0.5 * (m[1, 1] + m[2, 2])),
        d=float(m[3, 3]),
        z=float(0.5 * (m[1, 2] + m[2, 1])),
        f=float(0.5 * (m[0, 3] + m[3, 0])),
    )


def random_xstate(rng: np.random.Generator) -> XState:
    """Sample a valid X state.

    ``(a, 2b, d)`` is drawn uniformly from the simplex, then ``z`` and
    ``f`` uniformly within their positivity bounds ``|z| <= b`` and
    ``|f| <= sqrt(a d)``.
    """
    a, b2, d = rng.dirichlet((1.0, 1.0, 1.0))
    b = b2 / 2
    z = rng.uniform(-b, b)
    bound = math.sqrt(a * d)
    f = rng.uniform(-bound, bound)
    return XState(a=float(a), b=float(b), d=float(1.0 - a - 2 * b), z=float(z), f=float(f))
