"""Local Markovian decoherence channels acting on two-qubit X states.

Both qubits couple to identical, independent environments with the same
parametrized time ``p = 1 - exp(-theta t)``.  Phase damping has the same
quantum operation as phase flip and is not listed separately.
"""
from __future__ import annotations

import enum
import itertools
import math

import numpy as np

from .errors import PatternViolationError, UnsupportedChannelError
from .xstate import CorrelationCoefficients, XState, from_matrix, to_matrix


class ChannelKind(str, enum.Enum):
    AD = "AD"
    PF = "PF"
    BF = "BF"
    BPF = "BPF"


def time_to_p(theta: float, t: float) -> float:
    """Parametrized time for decay rate ``theta`` (1/time) after time ``t``."""
    if theta < 0 or t < 0:
        raise ValueError("decay rate and time must be non-negative")
    return -math.expm1(-theta * t)


def _check_p(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"parametrized time p must lie in [0, 1], got {p!r}")
    return p


def kraus_ops(kind: ChannelKind, p: float) -> tuple[np.ndarray, ...]:
    kind = ChannelKind(kind)
    p = _check_p(p)
    if kind is ChannelKind.AD:
        return (
            np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - p)]], dtype=complex),
            np.array([[0.0, math.sqrt(p)], [0.0, 0.0]], dtype=complex),
        )
    keep = math.sqrt(1.0 - p / 2)
    flip = math.sqrt(p / 2)
    e0 = np.array([[keep, 0.0], [0.0, keep]], dtype=complex)
    if kind is ChannelKind.BF:
        e1 = np.array([[0.0, flip], [flip, 0.0]], dtype=complex)
    elif kind is ChannelKind.PF:
        e1 = np.array([[flip, 0.0], [0.0, -flip]], dtype=complex)
    else:
        e1 = np.array([[0.0, -1j * flip], [1j * flip, 0.0]], dtype=complex)
    return (e0, e1)


def completeness_residual(ops) -> float:
    """Largest entry of ``sum_k E_k^dagger E_k - I``."""
    total = sum(e.conj().T @ e for e in ops)
    return float(np.max(np.abs(total - np.eye(total.shape[0]))))


def apply_two_qubit(rho: np.ndarray, ops) -> np.ndarray:
    out = np.zeros((4, 4), dtype=complex)
    for e_mu, e_nu in itertools.product(ops, repeat=2):
        k = np.kron(e_mu, e_nu)
        out += k @ rho @ k.conj().T
    return out


def evolve_two_qubit(x: XState, kind: ChannelKind, p: float) -> XState:
    """Evolve through the full tensor-product Kraus sum and re-extract.

    The result is divided by its trace; the channels are trace preserving,
    so this only strips accumulated rounding.  AD at ``p = 1`` then gives
    exactly ``|00><00|``.
    """
    rho = apply_two_qubit(to_matrix(x).astype(complex), kraus_ops(kind, p))
    rho /= np.trace(rho).real
    try:
        return from_matrix(rho, tol=1e-13)
    except ValueError as exc:
        raise PatternViolationError(f"{ChannelKind(kind).value} channel at p={p}: {exc}") from None


def evolve_coefficients(
    c: CorrelationCoefficients, kind: ChannelKind, p: float
) -> CorrelationCoefficients:
    """Closed-form coefficient maps for the unital channels.

    AD has no map of this kind; route it through :func:`evolve_two_qubit`.
    """
    kind = ChannelKind(kind)
    p = _check_p(p)
    q = 1.0 - p
    c1, c2, c3, c4 = c
    if kind is ChannelKind.BPF:
        return CorrelationCoefficients(c1 * q * q, c2, c3 * q * q, c4 * q)
    if kind is ChannelKind.BF:
        return CorrelationCoefficients(c1, c2 * q * q, c3 * q * q, c4 * q)
    if kind is ChannelKind.PF:
        return CorrelationCoefficients(c1 * q * q, c2 * q * q, c3, c4)
    raise UnsupportedChannelError("AD has no closed-form coefficient map; use evolve_two_qubit")
