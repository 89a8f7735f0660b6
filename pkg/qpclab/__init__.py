"""
qpclab - a desk-scale laboratory for a quantum private comparison protocol.

qpclab runs the protocol end to end on a small statevector simulator,
reproduces the passive and active attacks that leak a participant's secret,
implements the sum-based fix, and measures every claim by exact oracle and
seeded Monte Carlo campaign.
"""

import logging

__version__ = "0.1.0a1"

from qpclab.errors import (
    ConfigurationError,
    MalformedMessageError,
    QpcError,
    StateCollapseError,
)
from qpclab.primitives.encoding import BitPair, GroupSequence, SecretInput, from_groups, to_groups
from qpclab.primitives.factories import build_upsilon
from qpclab.primitives.keys import KeyRing, Party, party_view, simulate_qkd
from qpclab.primitives.quantum import BellCode, StateVector
from qpclab.protocol import (
    InterceptResend,
    NoEve,
    ProtocolConfig,
    Transcript,
    Variant,
    Verdict,
    run_protocol,
)
from qpclab.attacks import AttackReport, active_attack, passive_attack
from qpclab.analysis import (
    ExperimentKind,
    ExperimentReport,
    ExperimentSpec,
    exact_false_equal,
    exhaustive_correctness,
    monte_carlo,
)

logging.getLogger(__name__).addHandler(logging.NullHandler())

__all__ = [
    "AttackReport",
    "BellCode",
    "BitPair",
    "ConfigurationError",
    "ExperimentKind",
    "ExperimentReport",
    "ExperimentSpec",
    "GroupSequence",
    "InterceptResend",
    "KeyRing",
    "MalformedMessageError",
    "NoEve",
    "Party",
    "ProtocolConfig",
    "QpcError",
    "SecretInput",
    "StateCollapseError",
    "StateVector",
    "Transcript",
    "Variant",
    "Verdict",
    "active_attack",
    "build_upsilon",
    "exact_false_equal",
    "exhaustive_correctness",
    "from_groups",
    "monte_carlo",
    "party_view",
    "passive_attack",
    "run_protocol",
    "simulate_qkd",
    "to_groups",
]
