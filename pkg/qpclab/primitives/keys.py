from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from qpclab.primitives.encoding import BitPair


class Party(Enum):
    """The three roles of the comparison protocol."""

    ALICE = "Alice"
    BOB = "Bob"
    TP = "TP"

    def __str__(self) -> str:
        return self.value

    @property
    def peer(self) -> Party:
        """The other participant (Alice <-> Bob)."""
        if self is Party.TP:
            raise ValueError("TP has no peer participant.")

        return Party.BOB if self is Party.ALICE else Party.ALICE


@dataclass(frozen=True)
class KeyRing:
    """
    The four shared key sequences of one protocol run.

    k_a and k_b are shared by Alice and Bob, k_ac by Alice and TP, and k_bc
    by Bob and TP. Both holders of a sequence hold the same copy.

    Raises
    ------
    ValueError
        If the sequences differ in length or are empty.
    """

    k_a: tuple[BitPair, ...]
    k_b: tuple[BitPair, ...]
    k_ac: tuple[BitPair, ...]
    k_bc: tuple[BitPair, ...]

    def __post_init__(self) -> None:
        lengths = {len(self.k_a), len(self.k_b), len(self.k_ac), len(self.k_bc)}
        if len(lengths) != 1:
            raise ValueError(
                f"All key sequences must have the same length. Got lengths {sorted(lengths)}."
            )

        if 0 in lengths:
            raise ValueError("Key sequences cannot be empty.")

    def __len__(self) -> int:
        return len(self.k_a)

    def __repr__(self) -> str:
        return f"KeyRing(length={len(self)})"


@dataclass(frozen=True)
class AliceKeys:
    """Alice's keys: the two shared with Bob and the one shared with TP."""

    k_a: tuple[BitPair, ...]
    k_b: tuple[BitPair, ...]
    k_ac: tuple[BitPair, ...]

    party = Party.ALICE

    @property
    def k_tp(self) -> tuple[BitPair, ...]:
        """The key shared with TP."""
        return self.k_ac

    @property
    def own_pad(self) -> tuple[BitPair, ...]:
        """The participant key Alice adds to her announcement (K_A)."""
        return self.k_a


@dataclass(frozen=True)
class BobKeys:
    """Bob's keys: the two shared with Alice and the one shared with TP."""

    k_a: tuple[BitPair, ...]
    k_b: tuple[BitPair, ...]
    k_bc: tuple[BitPair, ...]

    party = Party.BOB

    @property
    def k_tp(self) -> tuple[BitPair, ...]:
        """The key shared with TP."""
        return self.k_bc

    @property
    def own_pad(self) -> tuple[BitPair, ...]:
        """The participant key Bob adds to his announcement (K_B)."""
        return self.k_b


@dataclass(frozen=True)
class TPKeys:
    """TP's keys: one shared with each participant. Nothing about k_a or k_b."""

    k_ac: tuple[BitPair, ...]
    k_bc: tuple[BitPair, ...]

    party = Party.TP


ParticipantKeys = AliceKeys | BobKeys
KeyView = AliceKeys | BobKeys | TPKeys


def simulate_qkd(length: int, rng: np.random.Generator) -> KeyRing:
    """
    Stand in for key distribution with trusted shared randomness.

    Every element of the four sequences is drawn uniformly and
    independently from {00, 01, 10, 11}. Keys are meant to be generated
    fresh for every run.

    Parameters
    ----------
    length : int
        Number of groups ceil(N / 2). Must be at least 1.
    rng : numpy.random.Generator
        Source of randomness.

    Returns
    -------
    KeyRing
        The four key sequences.

    Raises
    ------
    ValueError
        If length < 1.
    """
    if isinstance(length, bool) or not isinstance(length, int) or length < 1:
        raise ValueError(f"Key length must be a positive integer. Got {length!r}.")

    draws = rng.integers(0, 4, size=(4, length))
    k_a, k_b, k_ac, k_bc = (tuple(BitPair(int(v)) for v in row) for row in draws)
    return KeyRing(k_a, k_b, k_ac, k_bc)


def party_view(ring: KeyRing, party: Party) -> KeyView:
    """
    The keys a party legitimately holds.

    Alice sees k_a, k_b, k_ac; Bob sees k_a, k_b, k_bc; TP sees k_ac, k_bc.
    The returned view has no attribute for the keys the party does not
    share.

    Examples
    --------
    >>> ring = simulate_qkd(2, np.random.default_rng(1))
    >>> hasattr(party_view(ring, Party.TP), "k_a")
    False
    """
    if party is Party.ALICE:
        return AliceKeys(ring.k_a, ring.k_b, ring.k_ac)
    if party is Party.BOB:
        return BobKeys(ring.k_a, ring.k_b, ring.k_bc)
    if party is Party.TP:
        return TPKeys(ring.k_ac, ring.k_bc)

    raise TypeError(f"Expected a Party. Got {type(party).__name__}.")
