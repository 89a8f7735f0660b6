from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from qpclab.primitives.encoding import BitPair, GroupSequence, group_count
from qpclab.primitives.keys import AliceKeys, BobKeys, KeyView, Party, TPKeys
from qpclab.protocol.channel import CheckResult
from qpclab.protocol.messages import ClassicalMessage, PairAnnouncement, SumAnnouncement


class Variant(Enum):
    """The two comparison rules: the original XOR rule and the sum-based fix."""

    ORIGINAL = "original"
    FIXED = "fixed"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ProtocolConfig:
    """
    Parameters of one protocol run.

    Parameters
    ----------
    variant : Variant
        Which comparison rule TP and the participants apply.
    n_bits : int
        Bit length N of both secrets. Must be at least 1.
    decoy_count : int, optional
        Decoy photons inserted into each TP -> participant sequence.
        Defaults to the payload length 2 * ceil(N / 2). Must be at least 1.
    threshold : float
        Tolerated decoy error rate in [0, 1].
    seed : int
        Seed of the run's random stream. Must be non-negative.
    max_attempts : int
        How many times a run may restart after a failed check.

    Raises
    ------
    ValueError
        If any field is out of range.
    """

    variant: Variant = Variant.ORIGINAL
    n_bits: int = 4
    decoy_count: int | None = None
    threshold: float = 0.0
    seed: int = 0
    max_attempts: int = 1

    def __post_init__(self) -> None:
        if not isinstance(self.variant, Variant):
            raise TypeError(f"variant must be a Variant. Got {type(self.variant).__name__}.")

        for name in ("n_bits", "seed", "max_attempts"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise TypeError(f"{name} must be an integer. Got {type(value).__name__}.")

        if self.n_bits < 1:
            raise ValueError(f"n_bits must be at least 1. Got {self.n_bits}.")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative. Got {self.seed}.")
        if self.max_attempts < 1:
            raise ValueError(f"max_attempts must be at least 1. Got {self.max_attempts}.")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold must be an error rate in [0, 1]. Got {self.threshold}.")

        if self.decoy_count is None:
            object.__setattr__(self, "decoy_count", 2 * group_count(self.n_bits))
        elif isinstance(self.decoy_count, bool) or not isinstance(self.decoy_count, int):
            raise TypeError(f"decoy_count must be an integer. Got {type(self.decoy_count).__name__}.")
        elif self.decoy_count < 1:
            raise ValueError(
                f"decoy_count must be at least 1. Got {self.decoy_count}. "
                f"Every quantum sequence is checked for eavesdropping."
            )

    @property
    def group_count(self) -> int:
        return group_count(self.n_bits)

    def to_dict(self) -> dict[str, Any]:
        return {
            "variant": str(self.variant),
            "n_bits": self.n_bits,
            "decoy_count": self.decoy_count,
            "threshold": self.threshold,
            "seed": self.seed,
            "max_attempts": self.max_attempts,
        }


class VerdictKind(Enum):
    EQUAL = "Equal"
    NOT_EQUAL = "NotEqual"
    ABORTED = "Aborted"


@dataclass(frozen=True)
class Verdict:
    """
    The outcome of a comparison. Aborted verdicts carry a reason.

    Examples
    --------
    >>> str(Verdict.aborted("check failed"))
    'Aborted (check failed)'
    """

    kind: VerdictKind
    reason: str | None = None

    @classmethod
    def equal(cls) -> Verdict:
        return cls(VerdictKind.EQUAL)

    @classmethod
    def not_equal(cls) -> Verdict:
        return cls(VerdictKind.NOT_EQUAL)

    @classmethod
    def aborted(cls, reason: str) -> Verdict:
        return cls(VerdictKind.ABORTED, reason)

    @property
    def is_equal(self) -> bool:
        return self.kind is VerdictKind.EQUAL

    @property
    def is_aborted(self) -> bool:
        return self.kind is VerdictKind.ABORTED

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind.value, "reason": self.reason}

    def __str__(self) -> str:
        if self.reason is None:
            return self.kind.value
        return f"{self.kind.value} ({self.reason})"


def _pairs(values: tuple[BitPair, ...] | None) -> list[str] | None:
    return None if values is None else [str(v) for v in values]


def _keys_to_dict(keys: KeyView) -> dict[str, list[str]]:
    names = ["k_a", "k_b", "k_ac", "k_bc"]
    return {name: _pairs(getattr(keys, name)) for name in names if hasattr(keys, name)}


@dataclass
class PartyRecord:
    """
    Everything one party knows privately after a run.

    Attributes
    ----------
    party : Party
        Whose record this is.
    keys : KeyView
        The keys the party holds.
    groups : GroupSequence or None
        The party's secret groups (participants only).
    measurements : tuple[BitPair, ...]
        M_A or M_B for a participant, M_C for TP.
    announced : tuple[BitPair, ...]
        What the party announced: R_A or R_B for a participant, R for TP
        in the original variant.
    announced_sum : int or None
        S, announced by TP in the fixed variant.
    computed : tuple[BitPair, ...] or None
        R' computed by a participant in the original variant.
    computed_sum : int or None
        S' computed by a participant in the fixed variant.
    conclusion : Verdict or None
        The participant's own verdict.
    """

    party: Party
    keys: KeyView
    groups: GroupSequence | None = None
    measurements: tuple[BitPair, ...] = ()
    announced: tuple[BitPair, ...] = ()
    announced_sum: int | None = None
    computed: tuple[BitPair, ...] | None = None
    computed_sum: int | None = None
    conclusion: Verdict | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "party": str(self.party),
            "keys": _keys_to_dict(self.keys),
            "groups": None if self.groups is None else _pairs(self.groups.groups),
            "measurements": _pairs(self.measurements),
            "announced": _pairs(self.announced),
            "announced_sum": self.announced_sum,
            "computed": _pairs(self.computed),
            "computed_sum": self.computed_sum,
            "conclusion": None if self.conclusion is None else self.conclusion.to_dict(),
        }


def find_pairs(messages: list[ClassicalMessage] | tuple[ClassicalMessage, ...], label: str) -> tuple[BitPair, ...] | None:
    """The values of the last public pair announcement with the given label."""
    for message in reversed(messages):
        if isinstance(message.body, PairAnnouncement) and message.body.label == label:
            return message.body.values
    return None


def find_sum(messages: list[ClassicalMessage] | tuple[ClassicalMessage, ...], label: str) -> int | None:
    """The value of the last public sum announcement with the given label."""
    for message in reversed(messages):
        if isinstance(message.body, SumAnnouncement) and message.body.label == label:
            return message.body.value
    return None


@dataclass(frozen=True)
class PartyView:
    """
    A party's legitimate view of a finished run: the public channel log,
    its own keys and its own private record. Nothing else.
    """

    party: Party
    variant: Variant
    keys: KeyView
    record: PartyRecord
    messages: tuple[ClassicalMessage, ...]

    def public_pairs(self, label: str) -> tuple[BitPair, ...] | None:
        return find_pairs(self.messages, label)

    def public_sum(self, label: str) -> int | None:
        return find_sum(self.messages, label)


@dataclass
class Transcript:
    """
    The full record of one protocol run.

    Holds the configuration, the public classical log of the final attempt,
    every party's private record, the eavesdropping checks of every attempt,
    and the verdict.

    Attributes
    ----------
    config : ProtocolConfig
        The run parameters, including its seed.
    messages : list[ClassicalMessage]
        Every classical message delivered in the final attempt, in order.
    records : dict[Party, PartyRecord]
        Private records keyed by party.
    verdict : Verdict
        The outcome of the comparison.
    checks : list[CheckResult]
        The eavesdropping checks of all attempts, in order.
    attempts : int
        How many attempts the run took.
    """

    config: ProtocolConfig
    messages: list[ClassicalMessage]
    records: dict[Party, PartyRecord]
    verdict: Verdict
    checks: list[CheckResult] = field(default_factory=list)
    attempts: int = 1

    @property
    def announcements(self) -> list[ClassicalMessage]:
        """The value announcements (R_A, R_B, R or S), without check traffic."""
        return [
            m for m in self.messages if isinstance(m.body, (PairAnnouncement, SumAnnouncement))
        ]

    def view_for(self, party: Party) -> PartyView:
        """The legitimate view of one party."""
        record = self.records[party]
        return PartyView(party, self.config.variant, record.keys, record, tuple(self.messages))

    def audit(self) -> list[str]:
        """
        Recompute every announced value from the announcing party's record.

        Returns
        -------
        list[str]
            One line per value that does not satisfy its defining equation.
            Empty for a consistent transcript. Values a run never reached
            (an aborted run has no announcements) are not checked.
        """
        from qpclab.protocol.steps import (
            participant_announce,
            tp_combine_fixed,
            tp_combine_original,
            verdict_fixed,
            verdict_original,
        )

        violations: list[str] = []

        for party, label in ((Party.ALICE, "R_A"), (Party.BOB, "R_B")):
            record = self.records.get(party)
            if record is None or not record.announced:
                continue

            keys = record.keys
            assert isinstance(keys, (AliceKeys, BobKeys))
            for i, (value, g, m) in enumerate(zip(record.announced, record.groups, record.measurements)):
                expected = participant_announce(g, m, keys.k_tp[i], keys.own_pad[i])
                if value != expected:
                    violations.append(f"{label}[{i}] = {value}, expected {expected}")

            public = find_pairs(self.messages, label)
            if public is not None and public != record.announced:
                violations.append(f"public {label} differs from {party}'s record")

        tp = self.records.get(Party.TP)
        r_a = find_pairs(self.messages, "R_A")
        r_b = find_pairs(self.messages, "R_B")
        if tp is not None and tp.measurements and r_a is not None and r_b is not None:
            tp_keys = tp.keys
            assert isinstance(tp_keys, TPKeys)
            if self.config.variant is Variant.ORIGINAL and tp.announced:
                for i, value in enumerate(tp.announced):
                    expected = tp_combine_original(
                        r_a[i], r_b[i], tp_keys.k_ac[i], tp_keys.k_bc[i], tp.measurements[i]
                    )
                    if value != expected:
                        violations.append(f"R[{i}] = {value}, expected {expected}")
            elif self.config.variant is Variant.FIXED and tp.announced_sum is not None:
                expected_sum = tp_combine_fixed(r_a, r_b, tp_keys.k_ac, tp_keys.k_bc, tp.measurements)
                if tp.announced_sum != expected_sum:
                    violations.append(f"S = {tp.announced_sum}, expected {expected_sum}")

        for party in (Party.ALICE, Party.BOB):
            record = self.records.get(party)
            if record is None:
                continue

            if record.computed is not None:
                r = find_pairs(self.messages, "R")
                if r is not None:
                    expected_r, _ = verdict_original(r, record.keys.k_a, record.keys.k_b)
                    if record.computed != expected_r:
                        violations.append(f"{party}'s R' does not match R xor K_A xor K_B")

            if record.computed_sum is not None:
                s = find_sum(self.messages, "S")
                if s is not None:
                    expected_s, _ = verdict_fixed(s, record.keys.k_a, record.keys.k_b)
                    if record.computed_sum != expected_s:
                        violations.append(f"{party}'s S' does not match bit_sum(K_A xor K_B)")

        return violations

    def to_dict(self) -> dict[str, Any]:
        return {
            "config": self.config.to_dict(),
            "attempts": self.attempts,
            "checks": [c.to_dict() for c in self.checks],
            "messages": [m.to_dict() for m in self.messages],
            "records": {str(p): self.records[p].to_dict() for p in Party if p in self.records},
            "verdict": self.verdict.to_dict(),
        }

    def __str__(self) -> str:
        """
        Return a walkthrough of the run: checks, announcements and verdict.

        Examples
        --------
        >>> print(transcript)  # doctest: +SKIP
        original run, N=4, seed 1 (1 attempt)

        check TP->Alice: 0/4 errors, pass
        check TP->Bob: 0/4 errors, pass
        Alice -> TP: {'type': 'pairs', 'label': 'R_A', 'values': ['10', '01']}
        ...
        Verdict: Equal
        """
        attempts = "attempt" if self.attempts == 1 else "attempts"
        lines = [
            f"{self.config.variant} run, N={self.config.n_bits}, seed {self.config.seed} "
            f"({self.attempts} {attempts})",
            "",
        ]
        lines += [str(c) for c in self.checks]
        lines += [str(m) for m in self.announcements]
        lines += ["", f"Verdict: {self.verdict}"]
        return "\n".join(lines)

    def __repr__(self) -> str:
        return (
            f"Transcript(variant={self.config.variant}, n_bits={self.config.n_bits}, "
            f"seed={self.config.seed}, attempts={self.attempts}, verdict={self.verdict})"
        )
