from __future__ import annotations

import logging

import numpy as np

from qpclab.attacks.results import AttackReport, candidate_count
from qpclab.primitives.encoding import (
    BitPair,
    GroupSequence,
    SecretInput,
    from_groups,
    xor_all,
)
from qpclab.primitives.keys import Party
from qpclab.protocol.channel import (
    CheckResult,
    ParticleStore,
    QuantumMessage,
    Slot,
    insert_decoys,
    run_check,
)
from qpclab.protocol.messages import ClassicalMessage, Receipt
from qpclab.protocol.parties import Participant, answer_decoys, measure_payload
from qpclab.protocol.results import ProtocolConfig, Transcript, Variant, find_pairs, find_sum
from qpclab.protocol.run import ProtocolHooks, RunContext, run_protocol

logger = logging.getLogger(__name__)


def deduce_mc(m_ab: BitPair, m_b: BitPair) -> BitPair:
    """
    TP's Bell code for a copy, deduced from its two Z outcomes.

    The three measurement codes of one carrier copy always xor to 00, so
    M_C = M_AB xor M_B.

    Examples
    --------
    >>> deduce_mc(BitPair(0), BitPair(1))
    BitPair('01')
    """
    return m_ab ^ m_b


class Impersonator:
    """
    The attacker's endpoint for an intercepted sequence.

    It answers TP's check in the victim's name, measuring each announced
    decoy in its announced basis, and keeps the payload for later.
    """

    def __init__(
        self,
        victim: Party,
        message: QuantumMessage,
        store: ParticleStore,
        rng: np.random.Generator,
    ) -> None:
        self.victim = victim
        self.message = message
        self.store = store
        self.rng = rng
        self.positions: tuple[int, ...] = ()

    def confirm_receipt(self) -> ClassicalMessage:
        return ClassicalMessage(self.victim, self.message.sender, Receipt(self.message.label))

    def answer_check(self, announcement: ClassicalMessage) -> ClassicalMessage:
        outcomes = answer_decoys(self.message, announcement, self.store, self.rng)
        self.positions = outcomes.positions
        return ClassicalMessage(self.victim, announcement.claimed_sender, outcomes)

    def payload(self) -> tuple[Slot, ...]:
        return self.message.payload(self.positions)


class InterceptionHooks(ProtocolHooks):
    """
    Man-in-the-middle on the victim's sequence.

    The attacker takes delivery of the victim's sequence, completes TP's
    check as the victim, measures the payload in Z, mixes in fresh decoys
    and forwards the particles to the victim as TP, then checks the victim
    itself.
    """

    def __init__(self, attacker: Party) -> None:
        self.attacker = attacker
        self.victim = attacker.peer
        self.impersonator: Impersonator | None = None
        self.intercepted: tuple[BitPair, ...] = ()

    def intercept(
        self, message: QuantumMessage, target: Participant, context: RunContext
    ) -> Impersonator | None:
        if target.party is not self.victim:
            return None

        self.impersonator = Impersonator(self.victim, message, context.store, context.rng)
        self.intercepted = ()
        return self.impersonator

    def relay(self, target: Participant, context: RunContext) -> list[CheckResult]:
        assert self.impersonator is not None
        payload = self.impersonator.payload()
        self.intercepted = measure_payload(payload, context.store, context.rng)

        forwarded = insert_decoys(
            payload,
            context.config.decoy_count,
            context.rng,
            sender=Party.TP,
            receiver=self.victim,
            label=self.impersonator.message.label,
            owner=self.attacker,
        )
        target.receive(context.channel.send(forwarded))
        assert forwarded.record is not None
        return [run_check(forwarded.record, target, context.config.threshold, context.channel)]


def _recover(transcript: Transcript, attacker: Party, intercepted: tuple[BitPair, ...]) -> GroupSequence | None:
    record = transcript.records[attacker]
    keys = record.keys
    r = find_pairs(transcript.messages, "R")
    if r is None or len(intercepted) != len(r) or len(record.measurements) != len(r):
        return None

    victim_pad = keys.k_a if attacker is Party.BOB else keys.k_b
    groups = [
        xor_all(r[i], keys.k_tp[i], deduce_mc(m, record.measurements[i]), record.announced[i], victim_pad[i], m)
        for i, m in enumerate(intercepted)
    ]
    try:
        return GroupSequence(groups, transcript.config.n_bits)
    except ValueError:
        # Padding bit came out 1: the particles were disturbed on the way.
        return None


def active_attack(
    x: SecretInput,
    y: SecretInput,
    config: ProtocolConfig,
    attacker: Party = Party.BOB,
) -> tuple[Transcript, AttackReport]:
    """
    Run the protocol with one participant acting as a man in the middle.

    With Bob as the attacker: Bob intercepts S_A*, confirms receipt and
    completes TP's check as Alice, Z-measures the payload to get M_AB,
    forwards it with fresh decoys to Alice as TP and checks her himself.
    Alice's measurement then reproduces M_AB exactly. Once R is public Bob
    computes G_A = R xor K_BC xor M_C xor R_B xor K_A xor M_AB, with M_C
    deduced as M_AB xor M_B. Alice as the attacker mirrors this on S_B*.

    Against the fixed variant the interception still runs, so detection is
    measured, but recovery does not apply; the report counts the secrets
    consistent with S instead.

    Parameters
    ----------
    x, y : SecretInput
        Alice's and Bob's secrets.
    config : ProtocolConfig
        Run parameters.
    attacker : Party
        Party.BOB (default) or Party.ALICE.

    Returns
    -------
    tuple
        (transcript, report).

    Raises
    ------
    ValueError
        If the attacker is TP.
    """
    if attacker is Party.TP:
        raise ValueError("The active attack is run by a participant, not TP.")

    hooks = InterceptionHooks(attacker)
    transcript = run_protocol(x, y, config, hooks=hooks)
    victim = attacker.peer
    ground_truth = (x if victim is Party.ALICE else y).value
    detected = any(not check.passed for check in transcript.checks)
    record = transcript.records[attacker]
    victim_record = transcript.records[victim]
    assert record.groups is not None

    recovered = None
    count = 2**config.n_bits
    if config.variant is Variant.ORIGINAL:
        recovered = _recover(transcript, attacker, hooks.intercepted)
        if recovered is not None:
            count = 1
    else:
        s = find_sum(transcript.messages, "S")
        if s is not None:
            count = candidate_count(s, record.groups, record.keys.k_a, record.keys.k_b)

    report = AttackReport(
        attacker=attacker,
        victim=victim,
        kind="active",
        variant=config.variant,
        applicable=config.variant is Variant.ORIGINAL,
        recovered_groups=recovered,
        recovered_secret=None if recovered is None else from_groups(recovered).value,
        ground_truth=ground_truth,
        detected=detected,
        candidate_count=count,
        intercepted=hooks.intercepted,
        victim_measurements=victim_record.measurements,
    )
    logger.debug("%s", report)
    return transcript, report
