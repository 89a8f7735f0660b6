"""
Primitive objects: two-bit words and secrets, the six-qubit carrier state,
decoy photons, and the shared key sequences.
"""

from qpclab.primitives.encoding import (
    BitPair,
    SecretInput,
    GroupSequence,
    to_groups,
    from_groups,
    xor,
    bell_code_bits,
    bit_sum,
)
from qpclab.primitives.quantum import (
    Basis,
    BellCode,
    DecoyPhoton,
    StateVector,
    z_measure_pair,
    bell_measure_pair,
    measure_decoy,
)
from qpclab.primitives.factories import build_upsilon, basis_state, bell_state, new_decoy
from qpclab.primitives.keys import KeyRing, Party, simulate_qkd, party_view

__all__ = [
    "BitPair",
    "SecretInput",
    "GroupSequence",
    "to_groups",
    "from_groups",
    "xor",
    "bell_code_bits",
    "bit_sum",
    "Basis",
    "BellCode",
    "DecoyPhoton",
    "StateVector",
    "z_measure_pair",
    "bell_measure_pair",
    "measure_decoy",
    "build_upsilon",
    "basis_state",
    "bell_state",
    "new_decoy",
    "KeyRing",
    "Party",
    "simulate_qkd",
    "party_view",
]
