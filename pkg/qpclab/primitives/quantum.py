from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator

import numpy as np

from qpclab.errors import StateCollapseError
from qpclab.primitives.encoding import BitPair

NORM_TOLERANCE = 1e-9
_ZERO_BRANCH = 1e-15
_SQRT2_INV = 1 / np.sqrt(2)
_HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV


class BellCode(Enum):
    """
    The four Bell states, valued by their agreed two-bit code.

    phi+ <-> 00, psi+ <-> 01, psi- <-> 10, phi- <-> 11.
    """

    PHI_PLUS = 0
    PSI_PLUS = 1
    PSI_MINUS = 2
    PHI_MINUS = 3

    @property
    def vector(self) -> np.ndarray:
        """The state in the two-qubit computational basis (00, 01, 10, 11)."""
        return _BELL_VECTORS[self]

    def __str__(self) -> str:
        return _BELL_LABELS[self]


_BELL_VECTORS: dict[BellCode, np.ndarray] = {
    BellCode.PHI_PLUS: np.array([1, 0, 0, 1], dtype=complex) * _SQRT2_INV,
    BellCode.PHI_MINUS: np.array([1, 0, 0, -1], dtype=complex) * _SQRT2_INV,
    BellCode.PSI_PLUS: np.array([0, 1, 1, 0], dtype=complex) * _SQRT2_INV,
    BellCode.PSI_MINUS: np.array([0, 1, -1, 0], dtype=complex) * _SQRT2_INV,
}

_BELL_LABELS = {
    BellCode.PHI_PLUS: "phi+",
    BellCode.PHI_MINUS: "phi-",
    BellCode.PSI_PLUS: "psi+",
    BellCode.PSI_MINUS: "psi-",
}


class Basis(Enum):
    """Single-qubit measurement bases: Z = {|0>, |1>}, X = {|+>, |->}."""

    Z = "Z"
    X = "X"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class DecoyPhoton:
    """
    A single decoy photon, kept as a classical record of how it was prepared.

    Decoys are product states, so they are not appended to any state
    vector. In the Z basis bit 0/1 means |0>/|1>; in the X basis it means
    |+>/|->.

    Parameters
    ----------
    basis : Basis
        The preparation basis.
    bit : int
        The prepared value, 0 or 1.
    """

    basis: Basis
    bit: int

    def __post_init__(self) -> None:
        if not isinstance(self.basis, Basis):
            raise TypeError(f"Decoy basis must be a Basis. Got {type(self.basis).__name__}.")

        if self.bit not in (0, 1):
            raise ValueError(f"Decoy bit must be 0 or 1. Got {self.bit!r}.")

    def __str__(self) -> str:
        if self.basis is Basis.Z:
            return f"|{self.bit}>"

        return "|+>" if self.bit == 0 else "|->"


class StateVector:
    """
    A pure state of a small register of qubits.

    Holds 2**num_qubits complex amplitudes. Qubit 0 is the leftmost symbol
    of a ket and the most significant bit of the amplitude index, so the
    amplitude of |000001> on six qubits sits at index 1.

    Parameters
    ----------
    amplitudes : array-like of complex
        The amplitudes. The length must be a power of two and the squared
        magnitudes must sum to 1 within 1e-9.

    Attributes
    ----------
    amplitudes : numpy.ndarray
        Read-only complex amplitude array.
    num_qubits : int
        Number of qubits in the register.

    Raises
    ------
    ValueError
        If the length is not a power of two or the state is not normalized.

    Examples
    --------
    >>> psi = StateVector([1, 0, 0, 0])
    >>> psi.num_qubits
    2
    >>> psi.norm
    1.0
    """

    def __init__(self, amplitudes: np.ndarray | list[complex]) -> None:
        data = np.array(amplitudes, dtype=complex).reshape(-1)
        size = data.shape[0]
        if size < 2 or size & (size - 1):
            raise ValueError(
                f"A state vector needs 2**n amplitudes with n >= 1. Got {size}."
            )

        norm = float(np.sum(np.abs(data) ** 2))
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise ValueError(
                f"State vector is not normalized: squared magnitudes sum to {norm!r}."
            )

        data.setflags(write=False)
        self.amplitudes = data
        self.num_qubits = size.bit_length() - 1

    def __getitem__(self, index: int) -> complex:
        return complex(self.amplitudes[index])

    def __len__(self) -> int:
        return self.amplitudes.shape[0]

    def __iter__(self) -> Iterator[complex]:
        return (complex(a) for a in self.amplitudes)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StateVector):
            return NotImplemented

        return self.num_qubits == other.num_qubits and bool(
            np.allclose(self.amplitudes, other.amplitudes, atol=1e-12)
        )

    def __str__(self) -> str:
        terms = [
            f"{amp.real:+.6f}|{format(i, f'0{self.num_qubits}b')}>"
            for i, amp in enumerate(self.amplitudes)
            if abs(amp) > 1e-12
        ]
        return " ".join(terms)

    def __repr__(self) -> str:
        return f"StateVector(num_qubits={self.num_qubits}, nonzero={self.support_size})"

    @property
    def norm(self) -> float:
        """Sum of the squared magnitudes of the amplitudes."""
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    @property
    def support_size(self) -> int:
        """Number of amplitudes with magnitude above 1e-12."""
        return int(np.count_nonzero(np.abs(self.amplitudes) > 1e-12))

    def index_of(self, ket: str) -> int:
        """
        Amplitude index of a ket label such as '010100'.

        Raises
        ------
        ValueError
            If the label has the wrong length or is not binary.
        """
        if len(ket) != self.num_qubits or any(ch not in "01" for ch in ket):
            raise ValueError(
                f"Ket label must be {self.num_qubits} binary digits. Got {ket!r}."
            )

        return int(ket, 2)

    def amplitude(self, ket: str) -> complex:
        """The amplitude of a ket label such as '000000'."""
        return self[self.index_of(ket)]

    def tensor(self) -> np.ndarray:
        """The amplitudes reshaped to one axis per qubit (a writable copy)."""
        return self.amplitudes.reshape([2] * self.num_qubits).copy()


def _validate_pair(state: StateVector, q_hi: int, q_lo: int) -> None:
    if not isinstance(state, StateVector):
        raise TypeError(f"Expected a StateVector. Got {type(state).__name__}.")

    for q in (q_hi, q_lo):
        if isinstance(q, bool) or not isinstance(q, int):
            raise TypeError(f"Qubit indices must be integers. Got {type(q).__name__}.")
        if not 0 <= q < state.num_qubits:
            raise ValueError(
                f"Qubit index {q} is out of range for a {state.num_qubits}-qubit state."
            )

    if q_hi == q_lo:
        raise ValueError(f"A pair measurement needs two distinct qubits. Got {q_hi} twice.")


def _pair_matrix(state: StateVector, q_hi: int, q_lo: int) -> np.ndarray:
    """Amplitudes as a 4 x rest matrix whose row index is (q_hi, q_lo)."""
    moved = np.moveaxis(state.tensor(), (q_hi, q_lo), (0, 1))
    return moved.reshape(4, -1)


def _from_pair_matrix(matrix: np.ndarray, num_qubits: int, q_hi: int, q_lo: int) -> StateVector:
    moved = matrix.reshape([2] * num_qubits)
    return StateVector(np.moveaxis(moved, (0, 1), (q_hi, q_lo)).reshape(-1))


def pair_probabilities(state: StateVector, q_hi: int, q_lo: int) -> np.ndarray:
    """
    Exact Z-basis outcome probabilities of a qubit pair.

    Entry k is the probability of reading the pair BitPair(k), with q_hi as
    the high bit. This is the marginal oracle the sampling tests use.
    """
    _validate_pair(state, q_hi, q_lo)
    return np.sum(np.abs(_pair_matrix(state, q_hi, q_lo)) ** 2, axis=1)


def marginal_probabilities(state: StateVector, qubits: list[int]) -> np.ndarray:
    """
    Exact Z-basis marginal distribution over any subset of qubits.

    Entry k is the probability of reading the bit string of k over
    ``qubits`` in the order given (first qubit most significant).
    """
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"Qubits must be distinct. Got {qubits}.")

    for q in qubits:
        if not 0 <= q < state.num_qubits:
            raise ValueError(
                f"Qubit index {q} is out of range for a {state.num_qubits}-qubit state."
            )

    k = len(qubits)
    moved = np.moveaxis(state.tensor(), qubits, list(range(k)))
    return np.sum(np.abs(moved.reshape(2**k, -1)) ** 2, axis=1)


def bell_probabilities(state: StateVector, q_hi: int, q_lo: int) -> dict[BellCode, float]:
    """Exact Bell-basis outcome probabilities of a qubit pair."""
    _validate_pair(state, q_hi, q_lo)
    matrix = _pair_matrix(state, q_hi, q_lo)
    return {
        code: float(np.sum(np.abs(code.vector.conj() @ matrix) ** 2))
        for code in BellCode
    }


def project_pair(state: StateVector, q_hi: int, q_lo: int, outcome: BitPair) -> StateVector:
    """
    Post-select a Z-basis outcome on a qubit pair and renormalize.

    Raises
    ------
    StateCollapseError
        If the outcome has zero probability.
    """
    _validate_pair(state, q_hi, q_lo)
    matrix = _pair_matrix(state, q_hi, q_lo)
    probability = float(np.sum(np.abs(matrix[outcome.value]) ** 2))
    if probability < _ZERO_BRANCH:
        raise StateCollapseError(
            f"Outcome {outcome} on qubits ({q_hi}, {q_lo}) has zero probability; "
            f"the state cannot be renormalized onto it."
        )

    collapsed = np.zeros_like(matrix)
    collapsed[outcome.value] = matrix[outcome.value] / np.sqrt(probability)
    return _from_pair_matrix(collapsed, state.num_qubits, q_hi, q_lo)


def z_measure_pair(
    state: StateVector, q_hi: int, q_lo: int, rng: np.random.Generator
) -> tuple[BitPair, StateVector]:
    """
    Measure two qubits in the Z basis.

    The outcome is drawn with Born probabilities from the pair's marginal
    distribution and the state collapses onto it. The first bit of the
    outcome is q_hi, the second q_lo.

    Parameters
    ----------
    state : StateVector
        The state to measure. Not modified.
    q_hi, q_lo : int
        Distinct qubit indices.
    rng : numpy.random.Generator
        Source of randomness.

    Returns
    -------
    tuple[BitPair, StateVector]
        The outcome and the renormalized post-measurement state.

    Raises
    ------
    ValueError
        If the indices are out of range or equal.
    StateCollapseError
        If renormalization hits a zero-probability branch.
    """
    probabilities = pair_probabilities(state, q_hi, q_lo)
    outcome = BitPair(int(rng.choice(4, p=probabilities / probabilities.sum())))
    return outcome, project_pair(state, q_hi, q_lo, outcome)


def bell_measure_pair(
    state: StateVector, q_hi: int, q_lo: int, rng: np.random.Generator
) -> tuple[BellCode, StateVector]:
    """
    Measure two qubits in the Bell basis.

    Projects the pair onto phi+, phi-, psi+ and psi-, draws the outcome with
    Born probabilities and leaves the pair in the observed Bell state.

    Returns
    -------
    tuple[BellCode, StateVector]
        The outcome and the renormalized post-measurement state.

    Raises
    ------
    ValueError
        If the indices are out of range or equal.
    StateCollapseError
        If renormalization hits a zero-probability branch.
    """
    _validate_pair(state, q_hi, q_lo)
    matrix = _pair_matrix(state, q_hi, q_lo)
    codes = list(BellCode)
    components = [code.vector.conj() @ matrix for code in codes]
    probabilities = np.array([np.sum(np.abs(c) ** 2) for c in components])
    choice = int(rng.choice(4, p=probabilities / probabilities.sum()))
    probability = probabilities[choice]
    if probability < _ZERO_BRANCH:
        raise StateCollapseError(
            f"Bell outcome {codes[choice]} on qubits ({q_hi}, {q_lo}) has zero probability."
        )

    collapsed = np.outer(codes[choice].vector, components[choice]) / np.sqrt(probability)
    return codes[choice], _from_pair_matrix(collapsed, state.num_qubits, q_hi, q_lo)


def measure_qubit(
    state: StateVector, qubit: int, basis: Basis, rng: np.random.Generator
) -> tuple[int, StateVector]:
    """
    Measure one qubit in the Z or X basis and collapse the state.

    In the X basis, outcome 0 means |+> and 1 means |->; the qubit is left
    in the observed eigenstate.
    """
    if not 0 <= qubit < state.num_qubits:
        raise ValueError(
            f"Qubit index {qubit} is out of range for a {state.num_qubits}-qubit state."
        )

    moved = np.moveaxis(state.tensor(), qubit, 0).reshape(2, -1)
    if basis is Basis.X:
        moved = _HADAMARD @ moved

    probabilities = np.sum(np.abs(moved) ** 2, axis=1)
    outcome = int(rng.choice(2, p=probabilities / probabilities.sum()))
    collapsed = np.zeros_like(moved)
    collapsed[outcome] = moved[outcome] / np.sqrt(probabilities[outcome])
    if basis is Basis.X:
        collapsed = _HADAMARD @ collapsed

    restored = np.moveaxis(collapsed.reshape([2] * state.num_qubits), 0, qubit)
    return outcome, StateVector(restored.reshape(-1))


def measure_decoy(photon: DecoyPhoton, basis: Basis, rng: np.random.Generator) -> int:
    """
    Measure a decoy photon in the given basis.

    A matching basis returns the prepared bit. A mismatched basis returns
    0 or 1 with probability 1/2 each.

    Examples
    --------
    >>> measure_decoy(DecoyPhoton(Basis.Z, 1), Basis.Z, np.random.default_rng(0))
    1
    """
    if photon.basis is basis:
        return photon.bit

    return int(rng.integers(2))
