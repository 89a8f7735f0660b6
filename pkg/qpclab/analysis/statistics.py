from __future__ import annotations

from dataclasses import dataclass
from math import sqrt
from typing import Any, Sequence

from scipy.stats import chisquare, norm

CONFIDENCE = 0.99


def half_width(count: int, trials: int, confidence: float = CONFIDENCE) -> float:
    """
    Normal-approximation binomial confidence half-width of count / trials.

    Examples
    --------
    >>> round(half_width(5000, 10000), 4)
    0.0129
    """
    if trials < 1:
        raise ValueError(f"trials must be at least 1. Got {trials}.")

    p = count / trials
    z = float(norm.ppf(0.5 + confidence / 2))
    return z * sqrt(p * (1 - p) / trials)


def uniformity_pvalue(counts: Sequence[int]) -> float:
    """Chi-square p-value of observed counts against the uniform law."""
    return float(chisquare(list(counts)).pvalue)


@dataclass(frozen=True)
class Tally:
    """
    One tallied outcome of an experiment.

    Attributes
    ----------
    outcome : str
        Name of the outcome, such as 'aborted' or 'false_equal[d=11]'.
    count : int
        How many trials showed the outcome.
    trials : int
        How many trials could show it.
    oracle : float or None
        The exact probability, where one is known.
    """

    outcome: str
    count: int
    trials: int
    oracle: float | None = None
    confidence: float = CONFIDENCE

    def __post_init__(self) -> None:
        if not 0 <= self.count <= self.trials:
            raise ValueError(
                f"Tally {self.outcome!r} counts {self.count} of {self.trials} trials."
            )

    @property
    def rate(self) -> float:
        return self.count / self.trials if self.trials else 0.0

    @property
    def half_width(self) -> float:
        return half_width(self.count, self.trials, self.confidence) if self.trials else 0.0

    def within(self, sigmas: float = 3.0) -> bool:
        """Whether the rate lies within `sigmas` standard errors of the oracle."""
        if self.oracle is None or not self.trials:
            return True

        sigma = sqrt(self.oracle * (1 - self.oracle) / self.trials)
        return abs(self.rate - self.oracle) <= sigmas * sigma + 1e-12

    def to_dict(self) -> dict[str, Any]:
        return {
            "outcome": self.outcome,
            "count": self.count,
            "trials": self.trials,
            "rate": self.rate,
            "half_width": self.half_width,
            "oracle": self.oracle,
        }

    def __str__(self) -> str:
        oracle = "" if self.oracle is None else f"  (exact {self.oracle:.6f})"
        return (
            f"{self.outcome}: {self.count}/{self.trials} = {self.rate:.6f} "
            f"+- {self.half_width:.6f}{oracle}"
        )
