"""Quantum discord of spin-chain X states under Markovian decoherence.

Ground-state correlators of the XY chain feed two-qubit X states, which
evolve under amplitude damping, phase flip, bit flip or bit-phase flip.
Sudden changes in the decay of classical correlation and discord, and
how their onset moves across a tuning parameter, flag quantum phase
transitions.
"""
from .channels import ChannelKind, evolve_coefficients, evolve_two_qubit, kraus_ops, time_to_p
from .correlators import (
    CorrelatorSet,
    ModelKind,
    ModelPoint,
    QuadratureConfig,
    correlator_set,
    load_correlator_table,
)
from .dynamics import (
    DynamicsType,
    SuddenChange,
    Trajectory,
    classify,
    detect_p_sc,
    scan,
    trajectory,
)
from .errors import DiscordQPTError
from .measures import Branch, CorrelationTriple, discord_analytic, discord_numeric, triple
from .xstate import XState, coefficients, eigenvalues, from_coefficients, from_correlators

__version__ = "0.1.0"

__all__ = [
    "Branch", "ChannelKind", "CorrelationTriple", "CorrelatorSet", "DiscordQPTError",
    "DynamicsType", "ModelKind", "ModelPoint", "QuadratureConfig", "SuddenChange",
    "Trajectory", "XState", "classify", "coefficients", "correlator_set", "detect_p_sc",
    "discord_analytic", "discord_numeric", "eigenvalues", "evolve_coefficients",
    "evolve_two_qubit", "from_coefficients", "from_correlators", "kraus_ops",
    "load_correlator_table", "scan", "time_to_p", "trajectory", "triple",
]
