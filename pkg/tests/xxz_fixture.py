"""Nearest-neighbour XXZ correlators for building test tables.

Test data only; the library ingests XXZ correlators and never derives
them.  Values follow from the exact ground-state energy per bond of the
antiferromagnetic chain ``sum S.S`` (anisotropy ``D`` on the z term) by
Hellmann-Feynman:

    <SzSz> = de/dD,   <SxSx> = (e - D <SzSz>) / 2.

The chain ``-(1/2) sum [sx sx + sy sy + delta sz sz]`` maps onto it by a
pi rotation of every other spin about z, with ``D = -delta``.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import integrate


def bond_energy(aniso: float) -> float:
    """Ground-state energy per bond of sum (SxSx + SySy + aniso SzSz)."""
    if -1.0 < aniso < 1.0:
        mu = math.acos(aniso)

        def f(x):
            if x == 0.0:
                return (math.pi - mu) / math.pi
            # sinh((pi - mu) x) / (sinh(pi x) cosh(mu x)), overflow-free
            num = 2 * (math.exp(-2 * mu * x) - math.exp(-2 * math.pi * x))
            return num / (-math.expm1(-2 * math.pi * x) * (1 + math.exp(-2 * mu * x)))

        val, _ = integrate.quad(f, 0.0, np.inf, epsabs=1e-14, epsrel=1e-13, limit=400)
        return aniso / 4 - math.sin(mu) * val
    if aniso > 1.0:
        nu = math.acosh(aniso)
        n = np.arange(1, 200_000)
        tail = np.sum(1.0 / (np.exp(np.minimum(2 * n * nu, 700.0)) + 1.0))
        return aniso / 4 - math.sinh(nu) * (0.5 + 2 * tail)
    raise ValueError("isotropic points are excluded")


def xxz_correlators(delta: float, h: float = 1e-5) -> tuple[float, float, float, float]:
    """(mz, sxx, syy, szz) in Pauli units for the ferromagnetic-sign chain."""
    aniso = -delta
    e = bond_energy(aniso)
    zz = (bond_energy(aniso + h) - bond_energy(aniso - h)) / (2 * h)
    xx = (e - aniso * zz) / 2
    return 0.0, -4 * xx, -4 * xx, 4 * zz


def delta_grid() -> np.ndarray:
    grid = np.round(np.arange(-2.0, 0.995, 0.01), 10)
    return grid[np.abs(np.abs(grid) - 1.0) > 1e-9]


def write_table(path, deltas=None) -> None:
    deltas = delta_grid() if deltas is None else deltas
    lines = ["# XXZ nearest-neighbour correlators (Bethe ansatz, Hellmann-Feynman)",
             "kind,delta,r,mz,sxx,syy,szz"]
    for d in deltas:
        mz, sxx, syy, szz = xxz_correlators(float(d))
        lines.append(f"xxz,{d:.17g},1,{mz:.17g},{sxx:.17g},{syy:.17g},{szz:.17g}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
