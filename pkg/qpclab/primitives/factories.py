from __future__ import annotations

import numpy as np

from qpclab.primitives.quantum import Basis, BellCode, DecoyPhoton, StateVector

UPSILON_QUBITS = 6
UPSILON_AMPLITUDE = 1 / np.sqrt(32)

# Kets of the six-qubit carrier state with amplitude +1/sqrt(32).
UPSILON_POSITIVE_KETS: tuple[str, ...] = (
    "000000", "111111", "000011", "111100", "000101",
    "111010", "000110", "111001", "001001", "110110",
    "001111", "110000", "010001", "101110", "010010",
    "101101", "011000", "100111", "011101", "100010",
)

# Kets with amplitude -1/sqrt(32).
UPSILON_NEGATIVE_KETS: tuple[str, ...] = (
    "010100", "101011", "010111", "101000", "011011", "100100",
    "001010", "110101", "001100", "110011", "011110", "100001",
)


def build_upsilon() -> StateVector:
    """
    Create the six-qubit carrier state used by the comparison protocol.

    The state is an equal-weight superposition of 32 kets. Twenty carry
    amplitude +1/sqrt(32) and twelve carry -1/sqrt(32); the remaining 32
    basis states have amplitude 0. Grouping the kets by their last two
    qubits shows the structure the protocol relies on: whenever qubits
    (0, 1) read M_A and qubits (2, 3) read M_B, qubits (4, 5) are left in
    the Bell state whose code is M_A xor M_B.

    Returns
    -------
    StateVector
        The normalized six-qubit state.

    Examples
    --------
    >>> upsilon = build_upsilon()
    >>> round(upsilon.amplitude("000000").real, 6)
    0.176777
    >>> round(upsilon.amplitude("010100").real, 6)
    -0.176777
    >>> upsilon.amplitude("000001")
    0j
    """
    amplitudes = np.zeros(2**UPSILON_QUBITS, dtype=complex)
    for ket in UPSILON_POSITIVE_KETS:
        amplitudes[int(ket, 2)] = UPSILON_AMPLITUDE
    for ket in UPSILON_NEGATIVE_KETS:
        amplitudes[int(ket, 2)] = -UPSILON_AMPLITUDE

    return StateVector(amplitudes)


def basis_state(num_qubits: int, ket: str | int) -> StateVector:
    """
    Create a computational basis state.

    Parameters
    ----------
    num_qubits : int
        Number of qubits.
    ket : str or int
        The basis label, either as a bit string such as '0101' or as an
        amplitude index.

    Raises
    ------
    ValueError
        If num_qubits < 1 or the label does not fit.

    Examples
    --------
    >>> print(basis_state(2, "01"))
    +1.000000|01>
    """
    if isinstance(num_qubits, bool) or not isinstance(num_qubits, int) or num_qubits < 1:
        raise ValueError(f"Number of qubits must be a positive integer. Got {num_qubits!r}.")

    index = int(ket, 2) if isinstance(ket, str) else ket
    if isinstance(ket, str) and len(ket) != num_qubits:
        raise ValueError(f"Ket label {ket!r} does not have {num_qubits} digits.")
    if not 0 <= index < 2**num_qubits:
        raise ValueError(f"Basis index {index} is out of range for {num_qubits} qubits.")

    amplitudes = np.zeros(2**num_qubits, dtype=complex)
    amplitudes[index] = 1.0
    return StateVector(amplitudes)


def bell_state(code: BellCode) -> StateVector:
    """
    Create one of the four two-qubit Bell states.

    Examples
    --------
    >>> print(bell_state(BellCode.PHI_PLUS))
    +0.707107|00> +0.707107|11>
    """
    if not isinstance(code, BellCode):
        raise TypeError(f"Expected a BellCode. Got {type(code).__name__}.")

    return StateVector(code.vector)


def new_decoy(rng: np.random.Generator) -> DecoyPhoton:
    """
    Prepare a decoy photon uniformly at random from |0>, |1>, |+>, |->.

    Parameters
    ----------
    rng : numpy.random.Generator
        Source of randomness.

    Returns
    -------
    DecoyPhoton
        The prepared photon.
    """
    basis = Basis.Z if rng.integers(2) == 0 else Basis.X
    return DecoyPhoton(basis, int(rng.integers(2)))
