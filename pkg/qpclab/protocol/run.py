from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from qpclab.errors import MalformedMessageError
from qpclab.primitives.encoding import SecretInput
from qpclab.primitives.keys import AliceKeys, BobKeys, Party, TPKeys, party_view, simulate_qkd
from qpclab.protocol.channel import (
    Channel,
    CheckResult,
    DecoyReceiver,
    EveModel,
    ParticleStore,
    QuantumMessage,
    run_check,
)
from qpclab.protocol.messages import ClassicalMessage
from qpclab.protocol.parties import Participant, ThirdParty
from qpclab.protocol.results import PartyRecord, ProtocolConfig, Transcript, Verdict

logger = logging.getLogger(__name__)


@dataclass
class RunContext:
    """The shared machinery of one attempt, handed to protocol hooks."""

    config: ProtocolConfig
    store: ParticleStore
    channel: Channel
    rng: np.random.Generator


class ProtocolHooks:
    """
    Adversarial participation in a run.

    The base class does nothing. Subclasses override any of the three
    hooks; the active attacks are built from these alone.
    """

    def intercept(
        self, message: QuantumMessage, target: Participant, context: RunContext
    ) -> DecoyReceiver | None:
        """
        Take delivery of a TP -> participant sequence in the target's place.

        Return the endpoint that answers TP's check, or None to let the
        target receive the sequence.
        """
        return None

    def relay(self, target: Participant, context: RunContext) -> list[CheckResult]:
        """
        Deliver something to a target whose sequence was intercepted.

        Called once TP's check of the intercepted sequence has passed.
        Returns the checks run against the target.
        """
        return []

    def rewrite(self, message: ClassicalMessage) -> ClassicalMessage:
        """Rewrite a classical message in flight."""
        return message


class _Aborted(Exception):
    pass


def _check_inputs(x: SecretInput, y: SecretInput, config: ProtocolConfig) -> None:
    for name, secret in (("x", x), ("y", y)):
        if not isinstance(secret, SecretInput):
            raise TypeError(f"{name} must be a SecretInput. Got {type(secret).__name__}.")

    if not x.n_bits == y.n_bits == config.n_bits:
        raise ValueError(
            f"Both secrets must have the configured bit length {config.n_bits}. "
            f"Got {x.n_bits} and {y.n_bits}."
        )


def _attempt(
    x: SecretInput,
    y: SecretInput,
    config: ProtocolConfig,
    rng: np.random.Generator,
    eve: EveModel | None,
    hooks: ProtocolHooks,
    checks: list[CheckResult],
) -> tuple[Channel, dict[Party, PartyRecord], Verdict]:
    ring = simulate_qkd(config.group_count, rng)
    alice_keys, bob_keys, tp_keys = (party_view(ring, p) for p in Party)
    assert isinstance(alice_keys, AliceKeys) and isinstance(bob_keys, BobKeys)
    assert isinstance(tp_keys, TPKeys)

    tp = ThirdParty(tp_keys, rng, config.decoy_count)
    channel = Channel(tp.store, rng, eve, hooks.rewrite)
    context = RunContext(config, tp.store, channel, rng)
    participants = {
        Party.ALICE: Participant(Party.ALICE, x, alice_keys, tp.store, rng),
        Party.BOB: Participant(Party.BOB, y, bob_keys, tp.store, rng),
    }

    def records() -> dict[Party, PartyRecord]:
        return {
            Party.ALICE: participants[Party.ALICE].record(),
            Party.BOB: participants[Party.BOB].record(),
            Party.TP: tp.record(),
        }

    def require(results: list[CheckResult]) -> None:
        checks.extend(results)
        for result in results:
            if not result.passed:
                raise _Aborted(
                    f"eavesdropping check failed on {result.link}: "
                    f"{result.errors}/{result.decoys} errors"
                )

    try:
        for party, participant in participants.items():
            sent = tp.dispatch(party)
            delivered = channel.send(sent)
            assert isinstance(delivered, QuantumMessage)

            endpoint = hooks.intercept(delivered, participant, context)
            if endpoint is None:
                participant.receive(delivered)
                endpoint = participant

            assert sent.record is not None
            require([run_check(sent.record, endpoint, config.threshold, channel)])
            if endpoint is not participant:
                require(hooks.relay(participant, context))

        for participant in participants.values():
            participant.measure()

        for participant in participants.values():
            tp.collect(channel.post(participant.announce()))

        tp.measure()
        broadcast = channel.post(tp.combine(config.variant))
        verdicts = [p.conclude(broadcast, config.variant) for p in participants.values()]
    except _Aborted as abort:
        return channel, records(), Verdict.aborted(str(abort))
    except MalformedMessageError as error:
        return channel, records(), Verdict.aborted(f"malformed message: {error}")

    return channel, records(), verdicts[0]


def run_protocol(
    x: SecretInput,
    y: SecretInput,
    config: ProtocolConfig,
    eve: EveModel | None = None,
    hooks: ProtocolHooks | None = None,
) -> Transcript:
    """
    Run the comparison protocol end to end.

    Keys are distributed, TP prepares the carrier copies and sends S_A and
    S_B with decoys mixed in, each sequence is checked for eavesdropping,
    Alice and then Bob measure and announce, TP Bell-measures S_C, combines
    and broadcasts, and both participants conclude. A failed check or a
    malformed message aborts the attempt; up to config.max_attempts
    attempts are made with fresh keys, states and decoys.

    Parameters
    ----------
    x, y : SecretInput
        Alice's and Bob's secrets.
    config : ProtocolConfig
        Variant, bit length, decoy count, threshold, seed and attempts.
    eve : EveModel, optional
        An eavesdropper on the channel.
    hooks : ProtocolHooks, optional
        Adversarial participation, as used by the active attacks.

    Returns
    -------
    Transcript
        The full record of the run. Identical arguments give an identical
        transcript.

    Raises
    ------
    ValueError
        If the secrets' bit lengths differ from config.n_bits.

    Examples
    --------
    >>> config = ProtocolConfig(Variant.ORIGINAL, n_bits=4, seed=1)
    >>> str(run_protocol(SecretInput(6, 4), SecretInput(6, 4), config).verdict)
    'Equal'
    """
    _check_inputs(x, y, config)
    hooks = hooks or ProtocolHooks()
    rng = np.random.default_rng(config.seed)
    checks: list[CheckResult] = []

    for attempt in range(1, config.max_attempts + 1):
        channel, records, verdict = _attempt(x, y, config, rng, eve, hooks, checks)
        if not verdict.is_aborted or attempt == config.max_attempts:
            break
        logger.debug("attempt %d aborted (%s); restarting", attempt, verdict.reason)

    logger.debug("run seed=%d finished after %d attempt(s): %s", config.seed, attempt, verdict)
    return Transcript(config, channel.log, records, verdict, checks, attempt)
