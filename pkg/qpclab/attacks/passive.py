from __future__ import annotations

from qpclab.attacks.results import AttackReport, candidate_count
from qpclab.primitives.encoding import GroupSequence, SecretInput, from_groups, xor_sequences
from qpclab.primitives.keys import Party
from qpclab.protocol.results import PartyView, ProtocolConfig, Transcript, Variant
from qpclab.protocol.run import run_protocol
from qpclab.protocol.steps import verdict_original


def passive_attack(view: PartyView, own_groups: GroupSequence, ground_truth: int) -> AttackReport:
    """
    Recover the other participant's groups from a legitimate view.

    In the original variant the public R, stripped of the participant keys
    both participants share, is R' = G_A xor G_B. Adding the attacker's own
    groups leaves the victim's. Nothing beyond the public log, the
    attacker's keys and the attacker's groups is used.

    In the fixed variant only the bit count S is public, so recovery does
    not apply; the report instead counts the secrets consistent with S.

    Parameters
    ----------
    view : PartyView
        The attacker's view of a finished run. The attacker must be Alice
        or Bob.
    own_groups : GroupSequence
        The attacker's own groups.
    ground_truth : int
        The victim's secret, used only to score the recovery.

    Returns
    -------
    AttackReport
        The recovery and its score.

    Raises
    ------
    ValueError
        If the view belongs to TP.
    """
    if view.party is Party.TP:
        raise ValueError("The passive attack is run by a participant, not TP.")

    keys = view.keys
    n_bits = own_groups.n_bits
    report = dict(
        attacker=view.party,
        victim=view.party.peer,
        kind="passive",
        variant=view.variant,
        ground_truth=ground_truth,
        detected=False,
    )

    r = view.public_pairs("R") if view.variant is Variant.ORIGINAL else None
    if r is None:
        s = view.public_sum("S")
        count = 2**n_bits if s is None else candidate_count(s, own_groups, keys.k_a, keys.k_b)
        return AttackReport(
            applicable=False,
            recovered_groups=None,
            recovered_secret=None,
            candidate_count=count,
            **report,
        )

    r_prime, _ = verdict_original(r, keys.k_a, keys.k_b)
    recovered = GroupSequence(xor_sequences(r_prime, own_groups.groups), n_bits)
    return AttackReport(
        applicable=True,
        recovered_groups=recovered,
        recovered_secret=from_groups(recovered).value,
        candidate_count=1,
        **report,
    )


def run_passive_attack(
    x: SecretInput, y: SecretInput, config: ProtocolConfig
) -> tuple[Transcript, list[AttackReport]]:
    """
    Run the protocol honestly, then let each participant attack the other.

    Returns
    -------
    tuple
        (transcript, [Bob's report on Alice, Alice's report on Bob]).
    """
    transcript = run_protocol(x, y, config)
    reports = []
    for attacker, victim_secret in ((Party.BOB, x), (Party.ALICE, y)):
        view = transcript.view_for(attacker)
        assert view.record.groups is not None
        reports.append(passive_attack(view, view.record.groups, victim_secret.value))

    return transcript, reports
