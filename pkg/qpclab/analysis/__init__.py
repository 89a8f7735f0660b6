"""
Exact oracles and seeded Monte Carlo campaigns.
"""

from qpclab.analysis.experiments import (
    difference_patterns,
    exhaustive_correctness,
    monte_carlo,
    random_secret,
    trial_rng,
)
from qpclab.analysis.oracles import (
    abort_probability,
    allowed_errors,
    amplitude_census,
    detection_probability,
    equal_probability,
    exact_false_equal,
)
from qpclab.analysis.results import ExperimentKind, ExperimentReport, ExperimentSpec
from qpclab.analysis.statistics import CONFIDENCE, Tally, half_width, uniformity_pvalue

__all__ = [
    "CONFIDENCE",
    "ExperimentKind",
    "ExperimentReport",
    "ExperimentSpec",
    "Tally",
    "abort_probability",
    "allowed_errors",
    "amplitude_census",
    "detection_probability",
    "difference_patterns",
    "equal_probability",
    "exact_false_equal",
    "exhaustive_correctness",
    "half_width",
    "monte_carlo",
    "random_secret",
    "trial_rng",
    "uniformity_pvalue",
]
