from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Union

from qpclab.primitives.encoding import BitPair
from qpclab.primitives.keys import Party
from qpclab.primitives.quantum import Basis


@dataclass(frozen=True)
class Receipt:
    """Confirmation that every particle of a sequence arrived."""

    sequence: str

    def to_dict(self) -> dict[str, Any]:
        return {"type": "receipt", "sequence": self.sequence}


@dataclass(frozen=True)
class DecoyAnnouncement:
    """The sender's disclosure of decoy positions and preparation bases."""

    positions: tuple[int, ...]
    bases: tuple[Basis, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "type": "decoy-announcement",
            "positions": list(self.positions),
            "bases": "".join(str(b) for b in self.bases),
        }


@dataclass(frozen=True)
class DecoyOutcomes:
    """The receiver's measurement results on the announced decoy positions."""

    positions: tuple[int, ...]
    bits: tuple[int, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "type": "decoy-outcomes",
            "positions": list(self.positions),
            "bits": "".join(str(b) for b in self.bits),
        }


@dataclass(frozen=True)
class PairAnnouncement:
    """A labelled sequence of two-bit values, such as R_A, R_B or R."""

    label: str
    values: tuple[BitPair, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "type": "pairs",
            "label": self.label,
            "values": [str(v) for v in self.values],
        }


@dataclass(frozen=True)
class SumAnnouncement:
    """A labelled integer, used for the bit-count S of the fixed variant."""

    label: str
    value: int

    def to_dict(self) -> dict[str, Any]:
        return {"type": "sum", "label": self.label, "value": self.value}


MessageBody = Union[Receipt, DecoyAnnouncement, DecoyOutcomes, PairAnnouncement, SumAnnouncement]


@dataclass(frozen=True)
class ClassicalMessage:
    """
    A message on the public classical channel.

    The channel is reliable but not authenticated: claimed_sender is
    whatever the writer put there. Honest parties always write their own
    identity; an adversary with an interception hook can write any.

    Parameters
    ----------
    claimed_sender : Party
        The identity the message claims to come from.
    receiver : Party or None
        The addressee, or None for an announcement to both participants.
    body : MessageBody
        The payload.
    """

    claimed_sender: Party
    receiver: Party | None
    body: MessageBody

    def to_dict(self) -> dict[str, Any]:
        return {
            "from": str(self.claimed_sender),
            "to": "*" if self.receiver is None else str(self.receiver),
            "body": self.body.to_dict(),
        }

    def __str__(self) -> str:
        to = "all" if self.receiver is None else self.receiver
        return f"{self.claimed_sender} -> {to}: {self.body.to_dict()}"
