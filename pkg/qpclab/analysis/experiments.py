from __future__ import annotations

import logging
from itertools import product
from typing import Callable, Sequence

import numpy as np

from qpclab.analysis.oracles import (
    INTERCEPT_RESEND_ERROR,
    MAX_ENUMERATION_GROUPS,
    abort_probability,
    equal_probability,
    exact_false_equal,
)
from qpclab.analysis.results import ExperimentKind, ExperimentReport, ExperimentSpec
from qpclab.analysis.statistics import Tally, uniformity_pvalue
from qpclab.attacks.active import active_attack
from qpclab.attacks.passive import run_passive_attack
from qpclab.errors import ConfigurationError
from qpclab.primitives.encoding import (
    ALL_PAIRS,
    BitPair,
    SecretInput,
    group_count,
    to_groups,
    xor_sequences,
)
from qpclab.primitives.keys import Party, simulate_qkd
from qpclab.protocol.channel import InterceptResend, NoEve
from qpclab.protocol.results import ProtocolConfig, Variant, VerdictKind
from qpclab.protocol.run import run_protocol
from qpclab.protocol.steps import participant_announce, tp_combine_fixed, verdict_fixed

logger = logging.getLogger(__name__)

MAX_EXHAUSTIVE_BITS = 8


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """The random stream of one trial, independent of how trials are scheduled."""
    return np.random.default_rng([seed, trial])


def random_secret(rng: np.random.Generator, n_bits: int) -> SecretInput:
    bits = rng.integers(0, 2, size=n_bits)
    return SecretInput(sum(int(b) << j for j, b in enumerate(bits)), n_bits)


def _run_config(spec: ExperimentSpec, rng: np.random.Generator) -> ProtocolConfig:
    return ProtocolConfig(
        variant=spec.variant,
        n_bits=spec.n_bits,
        decoy_count=spec.decoy_count,
        threshold=spec.threshold,
        seed=int(rng.integers(np.iinfo(np.int64).max)),
    )


def _enumerable(n_bits: int) -> bool:
    return group_count(n_bits) <= MAX_ENUMERATION_GROUPS


def difference_patterns(n_bits: int) -> list[tuple[BitPair, ...]]:
    """
    Every group difference G_A xor G_B two n_bits secrets can have.

    For odd n_bits the padding bit of the last group is always 0.
    """
    patterns = product(ALL_PAIRS, repeat=group_count(n_bits))
    if n_bits % 2 == 0:
        return list(patterns)
    return [d for d in patterns if d[-1].lo == 0]


def _pattern_name(d: Sequence[BitPair]) -> str:
    text = " ".join(str(p) for p in d)
    if all(p.value == 0 for p in d):
        return f"equal[d={text}]"
    return f"false_equal[d={text}]"


def _correctness(spec: ExperimentSpec) -> ExperimentReport:
    same = different = complete = sound = 0
    expected_sound = 0.0
    for t in range(spec.trials):
        rng = trial_rng(spec.seed, t)
        x = random_secret(rng, spec.n_bits)
        y = x if rng.integers(2) == 0 else random_secret(rng, spec.n_bits)
        verdict = run_protocol(x, y, _run_config(spec, rng)).verdict
        if x == y:
            same += 1
            complete += verdict.is_equal
        else:
            different += 1
            sound += verdict.kind is VerdictKind.NOT_EQUAL
            if _enumerable(spec.n_bits):
                expected_sound += float(1 - equal_probability(x, y, spec.variant))

    sound_oracle = expected_sound / different if different and _enumerable(spec.n_bits) else None
    return ExperimentReport(
        spec,
        [
            Tally("completeness", complete, same, 1.0),
            Tally("soundness", sound, different, sound_oracle),
        ],
    )


def _passive_attack(spec: ExperimentSpec) -> ExperimentReport:
    successes = {Party.BOB: 0, Party.ALICE: 0}
    for t in range(spec.trials):
        rng = trial_rng(spec.seed, t)
        x, y = random_secret(rng, spec.n_bits), random_secret(rng, spec.n_bits)
        _, reports = run_passive_attack(x, y, _run_config(spec, rng))
        for report in reports:
            successes[report.attacker] += report.success

    oracle = 1.0 if spec.variant is Variant.ORIGINAL else 0.0
    return ExperimentReport(
        spec,
        [Tally(f"success[{p}]", n, spec.trials, oracle) for p, n in successes.items()],
    )


def _active_attack(spec: ExperimentSpec) -> ExperimentReport:
    success = detected = consistent = 0
    for t in range(spec.trials):
        rng = trial_rng(spec.seed, t)
        x, y = random_secret(rng, spec.n_bits), random_secret(rng, spec.n_bits)
        _, report = active_attack(x, y, _run_config(spec, rng), spec.attacker)
        success += report.success
        detected += report.detected
        consistent += report.collapse_consistent

    return ExperimentReport(
        spec,
        [
            Tally("success", success, spec.trials, 1.0 if spec.variant is Variant.ORIGINAL else 0.0),
            Tally("detected", detected, spec.trials, 0.0),
            Tally("collapse_consistent", consistent, spec.trials, 1.0),
        ],
    )


def _eve_detection(spec: ExperimentSpec) -> ExperimentReport:
    eve = spec.eve if spec.eve is not None else InterceptResend()
    aborted = errors = decoys = 0
    for t in range(spec.trials):
        rng = trial_rng(spec.seed, t)
        x, y = random_secret(rng, spec.n_bits), random_secret(rng, spec.n_bits)
        transcript = run_protocol(x, y, _run_config(spec, rng), eve=eve)
        aborted += transcript.verdict.is_aborted
        for check in transcript.checks:
            if check.receiver in eve.links:
                errors += check.errors
                decoys += check.decoys

    abort_oracle: float | None = None
    error_oracle: float | None = None
    if isinstance(eve, NoEve):
        abort_oracle = error_oracle = 0.0
    elif type(eve) is InterceptResend:
        watched = len(eve.links & {Party.ALICE, Party.BOB})
        decoy_count = ProtocolConfig(n_bits=spec.n_bits, decoy_count=spec.decoy_count).decoy_count
        assert decoy_count is not None
        abort_oracle = abort_probability(decoy_count, spec.threshold, watched)
        error_oracle = INTERCEPT_RESEND_ERROR

    return ExperimentReport(
        spec,
        [
            Tally("aborted", aborted, spec.trials, abort_oracle),
            Tally("decoy_error", errors, decoys, error_oracle),
        ],
    )


def _fixed_false_equal(spec: ExperimentSpec) -> ExperimentReport:
    patterns = list(spec.differences) if spec.differences is not None else difference_patterns(spec.n_bits)
    groups = group_count(spec.n_bits)
    equal = [0] * len(patterns)
    for t in range(spec.trials):
        rng = trial_rng(spec.seed, t)
        g_a = to_groups(random_secret(rng, spec.n_bits)).groups
        ring = simulate_qkd(groups, rng)
        m_a, m_b = (tuple(BitPair(int(v)) for v in row) for row in rng.integers(0, 4, size=(2, groups)))
        m_c = xor_sequences(m_a, m_b)
        r_a = [participant_announce(g_a[i], m_a[i], ring.k_ac[i], ring.k_a[i]) for i in range(groups)]
        for j, d in enumerate(patterns):
            g_b = xor_sequences(g_a, d)
            r_b = [participant_announce(g_b[i], m_b[i], ring.k_bc[i], ring.k_b[i]) for i in range(groups)]
            s = tp_combine_fixed(r_a, r_b, ring.k_ac, ring.k_bc, m_c)
            _, verdict = verdict_fixed(s, ring.k_a, ring.k_b)
            equal[j] += verdict.is_equal

    return ExperimentReport(
        spec,
        [
            Tally(
                _pattern_name(d),
                equal[j],
                spec.trials,
                float(exact_false_equal(d)) if groups <= MAX_ENUMERATION_GROUPS else None,
            )
            for j, d in enumerate(patterns)
        ],
    )


def _tp_view(spec: ExperimentSpec) -> ExperimentReport:
    if spec.variant is not Variant.ORIGINAL:
        raise ConfigurationError("The TP view audit applies to the original variant's R announcement.")

    x, y = SecretInput(spec.x, spec.n_bits), SecretInput(spec.y, spec.n_bits)
    groups = group_count(spec.n_bits)
    counts = np.zeros((groups, 4), dtype=np.int64)
    for t in range(spec.trials):
        rng = trial_rng(spec.seed, t)
        transcript = run_protocol(x, y, _run_config(spec, rng))
        for i, value in enumerate(transcript.records[Party.TP].announced):
            counts[i, value.value] += 1

    tallies = [
        Tally(f"R[{i + 1}]={pair}", int(counts[i, pair.value]), spec.trials, 0.25)
        for i in range(groups)
        for pair in ALL_PAIRS
    ]
    p_values = {f"R[{i + 1}]": uniformity_pvalue(counts[i]) for i in range(groups)}
    return ExperimentReport(spec, tallies, p_values=p_values)


CAMPAIGNS: dict[ExperimentKind, Callable[[ExperimentSpec], ExperimentReport]] = {
    ExperimentKind.CORRECTNESS: _correctness,
    ExperimentKind.PASSIVE_ATTACK: _passive_attack,
    ExperimentKind.ACTIVE_ATTACK: _active_attack,
    ExperimentKind.EVE_DETECTION: _eve_detection,
    ExperimentKind.FIXED_FALSE_EQUAL: _fixed_false_equal,
    ExperimentKind.TP_VIEW: _tp_view,
}


def monte_carlo(spec: ExperimentSpec) -> ExperimentReport:
    """
    Run a seeded Monte Carlo campaign.

    Trial t draws everything it needs (secrets, run seed, keys) from the
    stream seeded with (spec.seed, t), so a report depends only on the
    spec, never on the order trials run in.

    Parameters
    ----------
    spec : ExperimentSpec
        The campaign to run.

    Returns
    -------
    ExperimentReport
        Tallies with rates, 99% half-widths and exact values where known.

    Examples
    --------
    >>> spec = ExperimentSpec(ExperimentKind.FIXED_FALSE_EQUAL, n_bits=2, trials=1000, seed=3)
    >>> report = monte_carlo(spec)
    >>> report.tally("false_equal[d=11]").oracle
    0.5
    """
    logger.info("%s campaign: %d trials, seed %d", spec.kind, spec.trials, spec.seed)
    report = CAMPAIGNS[spec.kind](spec)
    logger.info("%s campaign finished: %s", spec.kind, report.counts)
    return report


def exhaustive_correctness(
    n_bits: int, variant: Variant, seeds: Sequence[int]
) -> ExperimentReport:
    """
    Run the protocol on every pair of n_bits secrets, once per seed.

    Tallies completeness (Equal when X == Y) and soundness (NotEqual when
    X != Y). For the original variant it also counts verdicts that
    disagree with X == Y, which the exact comparison rule makes 0. For the
    fixed variant it tallies false Equals against the mean exact
    probability and lists each one as a finding with its own exact
    probability.

    Raises
    ------
    ValueError
        If n_bits exceeds MAX_EXHAUSTIVE_BITS or no seed is given.
    """
    if not 1 <= n_bits <= MAX_EXHAUSTIVE_BITS:
        raise ValueError(
            f"Exhaustive sweeps cover 1 to {MAX_EXHAUSTIVE_BITS} bits. Got {n_bits}."
        )
    seeds = tuple(seeds)
    if not seeds:
        raise ValueError("An exhaustive sweep needs at least one seed.")

    secrets = [SecretInput(v, n_bits) for v in range(2**n_bits)]
    spec = ExperimentSpec(
        ExperimentKind.CORRECTNESS,
        n_bits=n_bits,
        trials=len(secrets) ** 2 * len(seeds),
        seed=seeds[0],
        variant=variant,
    )
    logger.info("exhaustive %s sweep: N=%d, %d seeds", variant, n_bits, len(seeds))

    same = different = complete = sound = false_equal = violations = 0
    expected_false_equal = 0.0
    findings = []
    for seed in seeds:
        config = ProtocolConfig(variant, n_bits, seed=seed)
        for x, y in product(secrets, repeat=2):
            verdict = run_protocol(x, y, config).verdict
            violations += verdict.is_equal != (x == y)
            if x == y:
                same += 1
                complete += verdict.is_equal
                continue

            different += 1
            sound += verdict.kind is VerdictKind.NOT_EQUAL
            false_equal += verdict.is_equal
            probability = float(equal_probability(x, y, variant))
            expected_false_equal += probability
            if verdict.is_equal:
                findings.append({"x": x.value, "y": y.value, "seed": seed, "oracle": probability})

    tallies = [Tally("completeness", complete, same, 1.0)]
    if variant is Variant.ORIGINAL:
        tallies += [
            Tally("soundness", sound, different, 1.0),
            Tally("violations", violations, spec.trials, 0.0),
        ]
    else:
        mean = expected_false_equal / different if different else 0.0
        tallies += [
            Tally("soundness", sound, different, 1.0 - mean),
            Tally("false_equal", false_equal, different, mean),
        ]

    return ExperimentReport(spec, tallies, findings=findings, seeds=seeds)
