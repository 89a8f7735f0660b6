from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from qpclab.analysis.statistics import CONFIDENCE, Tally
from qpclab.primitives.encoding import BitPair, group_count
from qpclab.primitives.keys import Party
from qpclab.protocol.channel import EveModel
from qpclab.protocol.results import Variant

# Campaigns that enumerate every difference pattern stop at 4**4 patterns.
MAX_PATTERN_GROUPS = 4


class ExperimentKind(Enum):
    """The experiment campaigns the engine runs."""

    CORRECTNESS = "correctness"
    PASSIVE_ATTACK = "passive-attack"
    ACTIVE_ATTACK = "active-attack"
    EVE_DETECTION = "eve-detection"
    FIXED_FALSE_EQUAL = "fixed-false-equal"
    TP_VIEW = "tp-view"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ExperimentSpec:
    """
    Parameters of a Monte Carlo campaign.

    Parameters
    ----------
    kind : ExperimentKind
        What to measure.
    n_bits : int
        Bit length of the compared secrets.
    trials : int
        Number of independent trials. Must be at least 1.
    seed : int
        Master seed; trial t uses the stream seeded with (seed, t).
    variant : Variant
        Protocol variant.
    eve : EveModel, optional
        Eavesdropper for EVE_DETECTION. Defaults to intercept-resend on
        the TP -> Alice link.
    decoy_count : int, optional
        Decoys per sequence; the protocol default when None.
    threshold : float
        Tolerated decoy error rate.
    differences : tuple of BitPair tuples, optional
        Difference patterns for FIXED_FALSE_EQUAL; every pattern valid for
        n_bits when None.
    x, y : int
        The fixed secrets of a TP_VIEW campaign.
    attacker : Party
        The active attacker for ACTIVE_ATTACK.

    Raises
    ------
    ValueError
        If trials < 1, n_bits < 1, x or y does not fit in n_bits, a
        difference pattern has the wrong number of groups, or a
        FIXED_FALSE_EQUAL campaign over more than MAX_PATTERN_GROUPS groups
        names no patterns.
    """

    kind: ExperimentKind
    n_bits: int
    trials: int
    seed: int
    variant: Variant = Variant.ORIGINAL
    eve: EveModel | None = None
    decoy_count: int | None = None
    threshold: float = 0.0
    differences: tuple[tuple[BitPair, ...], ...] | None = None
    x: int = 0
    y: int = 0
    attacker: Party = Party.BOB

    def __post_init__(self) -> None:
        if not isinstance(self.kind, ExperimentKind):
            raise TypeError(f"kind must be an ExperimentKind. Got {type(self.kind).__name__}.")
        if self.trials < 1:
            raise ValueError(f"An experiment needs at least one trial. Got {self.trials}.")
        if self.n_bits < 1:
            raise ValueError(f"n_bits must be at least 1. Got {self.n_bits}.")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative. Got {self.seed}.")
        for name, value in (("x", self.x), ("y", self.y)):
            if not 0 <= value < 2**self.n_bits:
                raise ValueError(
                    f"Secret {name}={value} does not fit in {self.n_bits} bits; "
                    f"expected 0 to {2**self.n_bits - 1}."
                )

        groups = group_count(self.n_bits)
        if (
            self.kind is ExperimentKind.FIXED_FALSE_EQUAL
            and self.differences is None
            and groups > MAX_PATTERN_GROUPS
        ):
            raise ValueError(
                f"{self.n_bits}-bit secrets have {4**groups} difference patterns, too many to "
                f"sweep at once (limit {MAX_PATTERN_GROUPS} groups). Name the patterns to test."
            )

        if self.differences is not None:
            for d in self.differences:
                if len(d) != groups:
                    raise ValueError(
                        f"Difference pattern {[str(p) for p in d]} has {len(d)} groups; "
                        f"{self.n_bits}-bit secrets have {groups}."
                    )

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": str(self.kind),
            "n_bits": self.n_bits,
            "trials": self.trials,
            "seed": self.seed,
            "variant": str(self.variant),
            "eve": None if self.eve is None else repr(self.eve),
            "decoy_count": self.decoy_count,
            "threshold": self.threshold,
            "differences": None
            if self.differences is None
            else [" ".join(str(p) for p in d) for d in self.differences],
            "x": self.x,
            "y": self.y,
            "attacker": str(self.attacker),
        }


@dataclass
class ExperimentReport:
    """
    The tallies of a campaign, with rates, confidence half-widths and the
    exact values where an oracle exists.

    Attributes
    ----------
    spec : ExperimentSpec
        What was run.
    tallies : list[Tally]
        One entry per tallied outcome, in a fixed order.
    p_values : dict[str, float]
        Chi-square p-values of uniformity audits, keyed by audited value.
    findings : list[dict]
        Individual cases worth listing, such as each observed false Equal
        of an exhaustive sweep.
    seeds : tuple[int, ...]
        The seeds of an exhaustive sweep; empty for Monte Carlo campaigns.
    confidence : float
        Confidence level of the half-widths.
    """

    spec: ExperimentSpec
    tallies: list[Tally]
    p_values: dict[str, float] = field(default_factory=dict)
    findings: list[dict[str, Any]] = field(default_factory=list)
    seeds: tuple[int, ...] = ()
    confidence: float = CONFIDENCE

    @property
    def counts(self) -> dict[str, int]:
        return {t.outcome: t.count for t in self.tallies}

    @property
    def rates(self) -> dict[str, float]:
        return {t.outcome: t.rate for t in self.tallies}

    @property
    def oracle_values(self) -> dict[str, float]:
        return {t.outcome: t.oracle for t in self.tallies if t.oracle is not None}

    def tally(self, outcome: str) -> Tally:
        """The tally of one outcome."""
        for t in self.tallies:
            if t.outcome == outcome:
                return t
        raise KeyError(f"No outcome {outcome!r} in this report.")

    def to_dict(self) -> dict[str, Any]:
        return {
            "spec": self.spec.to_dict(),
            "seeds": list(self.seeds),
            "confidence": self.confidence,
            "tallies": [t.to_dict() for t in self.tallies],
            "p_values": dict(self.p_values),
            "findings": list(self.findings),
        }

    def __str__(self) -> str:
        lines = [
            f"{self.spec.kind} experiment, {self.spec.variant}, N={self.spec.n_bits}, "
            f"{self.spec.trials} trials, seed {self.spec.seed}",
            "",
        ]
        lines += [str(t) for t in self.tallies]
        lines += [f"chi-square p-value {key}: {value:.6f}" for key, value in self.p_values.items()]
        if self.findings:
            lines.append(f"{len(self.findings)} findings")
        return "\n".join(lines)

    def __repr__(self) -> str:
        return (
            f"ExperimentReport(kind={self.spec.kind}, trials={self.spec.trials}, "
            f"outcomes={len(self.tallies)})"
        )
