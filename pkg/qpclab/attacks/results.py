from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Any

from qpclab.primitives.encoding import BitPair, GroupSequence, xor_sequences
from qpclab.primitives.keys import Party
from qpclab.protocol.results import Variant


@dataclass(frozen=True)
class AttackReport:
    """
    What an attacker recovered and how the attempt went.

    Attributes
    ----------
    attacker, victim : Party
        Who attacked whom.
    kind : str
        'passive' or 'active'.
    variant : Variant
        The protocol variant attacked.
    applicable : bool
        Whether the attack's recovery applies to the variant. Against the
        fixed variant only a bit count is public, so recovery does not.
    recovered_groups : GroupSequence or None
        The victim's groups as recovered, when applicable.
    recovered_secret : int or None
        The victim's secret as recovered, when applicable.
    ground_truth : int
        The victim's real secret, used only for scoring.
    detected : bool
        Whether any eavesdropping check of the run failed.
    candidate_count : int
        How many secrets remain consistent with the attacker's view.
        1 means the secret is fully determined.
    intercepted : tuple[BitPair, ...]
        The attacker's measurements of the victim's particles (M_AB for
        an active attacker; empty for a passive one).
    victim_measurements : tuple[BitPair, ...]
        The victim's own measurements of the same particles.
    """

    attacker: Party
    victim: Party
    kind: str
    variant: Variant
    applicable: bool
    recovered_groups: GroupSequence | None
    recovered_secret: int | None
    ground_truth: int
    detected: bool
    candidate_count: int
    intercepted: tuple[BitPair, ...] = ()
    victim_measurements: tuple[BitPair, ...] = ()

    @property
    def success(self) -> bool:
        """True iff the recovered secret equals the victim's secret."""
        return self.recovered_secret is not None and self.recovered_secret == self.ground_truth

    @property
    def collapse_consistent(self) -> bool:
        """True iff the victim re-measured exactly what the attacker measured."""
        return self.intercepted == self.victim_measurements

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "variant": str(self.variant),
            "attacker": str(self.attacker),
            "victim": str(self.victim),
            "applicable": self.applicable,
            "recovered_groups": None
            if self.recovered_groups is None
            else [str(g) for g in self.recovered_groups],
            "recovered_secret": self.recovered_secret,
            "ground_truth": self.ground_truth,
            "success": self.success,
            "detected": self.detected,
            "candidate_count": self.candidate_count,
            "intercepted": [str(m) for m in self.intercepted],
            "victim_measurements": [str(m) for m in self.victim_measurements],
        }

    def __str__(self) -> str:
        header = f"{self.kind} attack by {self.attacker} on {self.victim} ({self.variant})"
        if not self.applicable:
            return (
                f"{header}: not applicable, {self.candidate_count} candidate secrets remain; "
                f"detected {self.detected}"
            )

        return (
            f"{header}: recovered {self.recovered_secret}, actual {self.ground_truth}, "
            f"success {self.success}, detected {self.detected}"
        )

    def __repr__(self) -> str:
        return (
            f"AttackReport(kind={self.kind}, attacker={self.attacker}, applicable={self.applicable}, "
            f"recovered={self.recovered_secret}, success={self.success}, detected={self.detected})"
        )


def candidate_count(
    s: int,
    own_groups: GroupSequence,
    k_a: tuple[BitPair, ...],
    k_b: tuple[BitPair, ...],
) -> int:
    """
    Number of victim secrets consistent with a fixed-variant announcement.

    The attacker knows S = bit_sum(G_victim xor c) with c = G_own xor K_A
    xor K_B. Every 2g-bit string at Hamming distance S from c is a candidate,
    except that an odd-length secret pins its padding bit to 0.

    Examples
    --------
    >>> own = GroupSequence([BitPair(0)], 2)
    >>> candidate_count(1, own, (BitPair(0),), (BitPair(0),))
    2
    """
    c = xor_sequences(xor_sequences(own_groups.groups, k_a), k_b)
    free_bits = 2 * len(c)
    offset = 0
    if own_groups.n_bits % 2 == 1:
        free_bits -= 1
        offset = c[-1].lo

    if not 0 <= s - offset <= free_bits:
        return 0

    return comb(free_bits, s - offset)
