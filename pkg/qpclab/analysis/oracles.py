from __future__ import annotations

from fractions import Fraction
from typing import Iterable

import numpy as np
from scipy.stats import binom

from qpclab.primitives.encoding import BitPair, SecretInput, to_groups, xor_sequences
from qpclab.primitives.factories import UPSILON_AMPLITUDE
from qpclab.primitives.quantum import StateVector
from qpclab.protocol.results import Variant

MAX_ENUMERATION_GROUPS = 10
INTERCEPT_RESEND_ERROR = 0.25

# DELTA[d][b] = popcount(d ^ b) - popcount(b): how one group's difference
# d moves TP's bit count away from the participants' for key difference b.
DELTA = np.array(
    [[bin(d ^ b).count("1") - bin(b).count("1") for b in range(4)] for d in range(4)],
    dtype=np.int64,
)


def exact_false_equal(d: Iterable[BitPair]) -> Fraction:
    """
    Exact probability that the fixed variant declares Equal for a
    difference pattern.

    With d = G_A xor G_B and b = K_A xor K_B uniform over all 4**g values,
    TP announces S = bit_sum(d xor b) and the participants compare it with
    S' = bit_sum(b). Every b is enumerated and the fraction with S == S'
    returned. The all-zero pattern gives 1: equal secrets always pass.

    Parameters
    ----------
    d : Iterable[BitPair]
        The difference pattern, one pair per group.

    Returns
    -------
    Fraction
        The probability of an Equal verdict.

    Raises
    ------
    ValueError
        If d is empty or has more than MAX_ENUMERATION_GROUPS groups.

    Examples
    --------
    >>> exact_false_equal([BitPair.parse("11")])
    Fraction(1, 2)
    >>> exact_false_equal([BitPair.parse("01")])
    Fraction(0, 1)
    """
    groups = tuple(d)
    if not groups:
        raise ValueError("A difference pattern needs at least one group.")
    if len(groups) > MAX_ENUMERATION_GROUPS:
        raise ValueError(
            f"Enumerating 4**{len(groups)} key differences is too costly; "
            f"the limit is {MAX_ENUMERATION_GROUPS} groups. Use a Monte Carlo campaign."
        )

    totals = np.zeros(1, dtype=np.int64)
    for group in groups:
        totals = (totals[:, None] + DELTA[group.value][None, :]).ravel()

    return Fraction(int(np.count_nonzero(totals == 0)), 4 ** len(groups))


def equal_probability(x: SecretInput, y: SecretInput, variant: Variant) -> Fraction:
    """
    Exact probability of an Equal verdict on an honest run.

    The original variant is exact: 1 if x == y, else 0. The fixed variant
    passes unequal secrets with exact_false_equal of their group difference.
    """
    if x == y:
        return Fraction(1)
    if variant is Variant.ORIGINAL:
        return Fraction(0)

    return exact_false_equal(xor_sequences(to_groups(x).groups, to_groups(y).groups))


def allowed_errors(decoys: int, threshold: float) -> int:
    """The largest error count k with k / decoys <= threshold."""
    return max(k for k in range(decoys + 1) if k / decoys <= threshold)


def detection_probability(
    decoys: int, threshold: float = 0.0, error_rate: float = INTERCEPT_RESEND_ERROR
) -> float:
    """
    Probability that a check on `decoys` disturbed decoys fails.

    Each decoy shows an error independently with probability error_rate
    (1/4 under intercept-resend in a random basis). The check fails when
    more than allowed_errors(decoys, threshold) errors occur. For threshold
    0 this is 1 - (1 - error_rate)**decoys.

    Raises
    ------
    ValueError
        If decoys < 1.

    Examples
    --------
    >>> round(detection_probability(20), 4)
    0.9968
    """
    if decoys < 1:
        raise ValueError(f"A check needs at least one decoy. Got {decoys}.")

    return float(binom.sf(allowed_errors(decoys, threshold), decoys, error_rate))


def abort_probability(
    decoys: int, threshold: float, watched_links: int, error_rate: float = INTERCEPT_RESEND_ERROR
) -> float:
    """Probability that at least one of the watched links' checks fails."""
    passed = 1.0 - detection_probability(decoys, threshold, error_rate)
    return 1.0 - passed**watched_links


def amplitude_census(state: StateVector, magnitude: float = UPSILON_AMPLITUDE) -> dict[str, float]:
    """
    Count the positive, negative and zero amplitudes of a state.

    Returns the counts together with the largest deviation of a nonzero
    amplitude from +-magnitude and the largest stray imaginary part.
    """
    values = state.amplitudes
    nonzero = np.abs(values) > magnitude / 2
    real = values.real[nonzero]
    return {
        "nonzero": int(np.count_nonzero(nonzero)),
        "positive": int(np.count_nonzero(real > 0)),
        "negative": int(np.count_nonzero(real < 0)),
        "max_error": float(
            max(
                np.max(np.abs(np.abs(real) - magnitude), initial=0.0),
                np.max(np.abs(values.imag), initial=0.0),
                np.max(np.abs(values[~nonzero]), initial=0.0),
            )
        ),
    }
