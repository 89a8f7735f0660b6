from __future__ import annotations

import numpy as np

from qpclab.errors import MalformedMessageError
from qpclab.primitives.encoding import BitPair, SecretInput, bell_code_bits, to_groups
from qpclab.primitives.keys import ParticipantKeys, Party, TPKeys
from qpclab.primitives.quantum import DecoyPhoton, measure_decoy
from qpclab.protocol.channel import (
    ParticleRef,
    ParticleStore,
    QuantumMessage,
    Slot,
    insert_decoys,
)
from qpclab.protocol.messages import (
    ClassicalMessage,
    DecoyAnnouncement,
    DecoyOutcomes,
    PairAnnouncement,
    Receipt,
    SumAnnouncement,
)
from qpclab.protocol.results import PartyRecord, Variant, Verdict
from qpclab.protocol.steps import (
    participant_announce,
    tp_combine_fixed,
    tp_combine_original,
    tp_prepare,
    verdict_fixed,
    verdict_original,
)

ANNOUNCEMENT_LABELS = {Party.ALICE: "R_A", Party.BOB: "R_B"}
SEQUENCE_LABELS = {Party.ALICE: "S_A*", Party.BOB: "S_B*"}


def answer_decoys(
    message: QuantumMessage,
    announcement: ClassicalMessage,
    store: ParticleStore,
    rng: np.random.Generator,
) -> DecoyOutcomes:
    """
    Measure the announced slots of a held sequence in the announced bases.

    Raises
    ------
    MalformedMessageError
        If the announcement is not a decoy announcement or names a slot
        the sequence does not have.
    """
    body = announcement.body
    if not isinstance(body, DecoyAnnouncement) or len(body.positions) != len(body.bases):
        raise MalformedMessageError(f"Expected a decoy announcement. Got {announcement}.")

    bits = []
    for position, basis in zip(body.positions, body.bases):
        if not 0 <= position < len(message.slots):
            raise MalformedMessageError(
                f"Decoy position {position} is outside a sequence of {len(message.slots)} slots."
            )

        slot = message.slots[position]
        if isinstance(slot, DecoyPhoton):
            bits.append(measure_decoy(slot, basis, rng))
        else:
            bits.append(store.measure(slot, basis, rng))

    return DecoyOutcomes(body.positions, tuple(bits))


def measure_payload(
    payload: tuple[Slot, ...], store: ParticleStore, rng: np.random.Generator
) -> tuple[BitPair, ...]:
    """
    Z-measure a payload two particles at a time.

    Raises
    ------
    MalformedMessageError
        If the payload has an odd length or holds something other than
        carrier particles.
    """
    if len(payload) % 2 != 0:
        raise MalformedMessageError(f"Payload of {len(payload)} particles cannot be paired.")

    outcomes = []
    for i in range(0, len(payload), 2):
        hi, lo = payload[i], payload[i + 1]
        if not (isinstance(hi, ParticleRef) and isinstance(lo, ParticleRef)):
            raise MalformedMessageError("Payload holds a photon where a carrier particle belongs.")
        outcomes.append(store.z_measure(hi, lo, rng))

    return tuple(outcomes)


class Participant:
    """
    Alice or Bob, following the protocol honestly.

    A participant holds a secret, its key view and whatever sequence it was
    delivered. It confirms receipt, answers the eavesdropping check, measures
    its payload, announces its masked groups and concludes from TP's
    announcement.

    Parameters
    ----------
    party : Party
        Party.ALICE or Party.BOB.
    secret : SecretInput
        The participant's secret.
    keys : ParticipantKeys
        The participant's key view.
    store : ParticleStore
        The run's particles.
    rng : numpy.random.Generator
        The run's random stream.
    """

    def __init__(
        self,
        party: Party,
        secret: SecretInput,
        keys: ParticipantKeys,
        store: ParticleStore,
        rng: np.random.Generator,
    ) -> None:
        if party is Party.TP:
            raise ValueError("TP is not a participant.")

        self.party = party
        self.secret = secret
        self.groups = to_groups(secret)
        self.keys = keys
        self.store = store
        self.rng = rng
        self.inbox: QuantumMessage | None = None
        self.decoy_positions: tuple[int, ...] = ()
        self.measurements: tuple[BitPair, ...] = ()
        self.announced: tuple[BitPair, ...] = ()
        self.computed: tuple[BitPair, ...] | None = None
        self.computed_sum: int | None = None
        self.conclusion: Verdict | None = None

    @property
    def label(self) -> str:
        return ANNOUNCEMENT_LABELS[self.party]

    def receive(self, message: QuantumMessage) -> None:
        self.inbox = message
        self.decoy_positions = ()

    def _held(self) -> QuantumMessage:
        if self.inbox is None:
            raise MalformedMessageError(f"{self.party} has not received a sequence.")
        return self.inbox

    def confirm_receipt(self) -> ClassicalMessage:
        held = self._held()
        return ClassicalMessage(self.party, held.sender, Receipt(held.label))

    def answer_check(self, announcement: ClassicalMessage) -> ClassicalMessage:
        held = self._held()
        outcomes = answer_decoys(held, announcement, self.store, self.rng)
        self.decoy_positions = outcomes.positions
        return ClassicalMessage(self.party, announcement.claimed_sender, outcomes)

    def measure(self) -> tuple[BitPair, ...]:
        """Measure the payload left after the check, one group per copy."""
        payload = self._held().payload(self.decoy_positions)
        if len(payload) != 2 * len(self.groups):
            raise MalformedMessageError(
                f"{self.party} expected {2 * len(self.groups)} payload particles. "
                f"Got {len(payload)}."
            )

        self.measurements = measure_payload(payload, self.store, self.rng)
        return self.measurements

    def announce(self) -> ClassicalMessage:
        self.announced = tuple(
            participant_announce(g, m, k_tp, k_pad)
            for g, m, k_tp, k_pad in zip(
                self.groups, self.measurements, self.keys.k_tp, self.keys.own_pad
            )
        )
        return ClassicalMessage(self.party, Party.TP, PairAnnouncement(self.label, self.announced))

    def conclude(self, message: ClassicalMessage, variant: Variant) -> Verdict:
        """
        Draw the verdict from TP's broadcast.

        Raises
        ------
        MalformedMessageError
            If the broadcast is not the announcement the variant expects.
        """
        body = message.body
        if variant is Variant.ORIGINAL:
            if not (isinstance(body, PairAnnouncement) and body.label == "R"):
                raise MalformedMessageError(f"Expected TP's R announcement. Got {message}.")
            if len(body.values) != len(self.groups):
                raise MalformedMessageError(
                    f"R has {len(body.values)} groups; {len(self.groups)} were compared."
                )
            self.computed, self.conclusion = verdict_original(
                body.values, self.keys.k_a, self.keys.k_b
            )
        else:
            if not (isinstance(body, SumAnnouncement) and body.label == "S"):
                raise MalformedMessageError(f"Expected TP's S announcement. Got {message}.")
            self.computed_sum, self.conclusion = verdict_fixed(
                body.value, self.keys.k_a, self.keys.k_b
            )

        return self.conclusion

    def record(self) -> PartyRecord:
        return PartyRecord(
            party=self.party,
            keys=self.keys,
            groups=self.groups,
            measurements=self.measurements,
            announced=self.announced,
            computed=self.computed,
            computed_sum=self.computed_sum,
            conclusion=self.conclusion,
        )

    def __repr__(self) -> str:
        return f"Participant({self.party}, groups={self.groups})"


class ThirdParty:
    """
    The semi-honest third party.

    TP prepares the carrier copies, sends S_A and S_B with decoys mixed in,
    checks both sequences, Bell-measures S_C, combines the participants'
    announcements with its keys and broadcasts the result.

    Parameters
    ----------
    keys : TPKeys
        TP's key view.
    rng : numpy.random.Generator
        The run's random stream.
    decoy_count : int
        Decoys per outgoing sequence.
    """

    party = Party.TP

    def __init__(self, keys: TPKeys, rng: np.random.Generator, decoy_count: int) -> None:
        self.keys = keys
        self.rng = rng
        self.decoy_count = decoy_count
        self.store, s_a, s_b, self.s_c = tp_prepare(len(keys.k_ac))
        self.outgoing = {Party.ALICE: s_a, Party.BOB: s_b}
        self.received: dict[Party, tuple[BitPair, ...]] = {}
        self.measurements: tuple[BitPair, ...] = ()
        self.announced: tuple[BitPair, ...] = ()
        self.announced_sum: int | None = None

    def dispatch(self, receiver: Party) -> QuantumMessage:
        """The sequence for one participant, with decoys mixed in."""
        return insert_decoys(
            self.outgoing[receiver],
            self.decoy_count,
            self.rng,
            sender=Party.TP,
            receiver=receiver,
            label=SEQUENCE_LABELS[receiver],
        )

    def collect(self, message: ClassicalMessage) -> None:
        """
        Accept a participant's announcement.

        Raises
        ------
        MalformedMessageError
            If the message is not the announcement its sender owes.
        """
        sender = message.claimed_sender
        body = message.body
        expected = ANNOUNCEMENT_LABELS.get(sender)
        if not (isinstance(body, PairAnnouncement) and body.label == expected):
            raise MalformedMessageError(f"Expected {expected} from {sender}. Got {message}.")
        if len(body.values) != len(self.keys.k_ac):
            raise MalformedMessageError(
                f"{expected} has {len(body.values)} groups. Expected {len(self.keys.k_ac)}."
            )

        self.received[sender] = body.values

    def measure(self) -> tuple[BitPair, ...]:
        """Bell-measure the particle pairs of S_C, one per copy."""
        self.measurements = tuple(
            bell_code_bits(self.store.bell_measure(self.s_c[i], self.s_c[i + 1], self.rng))
            for i in range(0, len(self.s_c), 2)
        )
        return self.measurements

    def combine(self, variant: Variant) -> ClassicalMessage:
        """Combine both announcements and build the broadcast."""
        r_a, r_b = self.received[Party.ALICE], self.received[Party.BOB]
        if variant is Variant.ORIGINAL:
            self.announced = tuple(
                tp_combine_original(r_a[i], r_b[i], self.keys.k_ac[i], self.keys.k_bc[i], m_c)
                for i, m_c in enumerate(self.measurements)
            )
            return ClassicalMessage(Party.TP, None, PairAnnouncement("R", self.announced))

        self.announced_sum = tp_combine_fixed(
            r_a, r_b, self.keys.k_ac, self.keys.k_bc, self.measurements
        )
        return ClassicalMessage(Party.TP, None, SumAnnouncement("S", self.announced_sum))

    def record(self) -> PartyRecord:
        return PartyRecord(
            party=Party.TP,
            keys=self.keys,
            measurements=self.measurements,
            announced=self.announced,
            announced_sum=self.announced_sum,
        )

    def __repr__(self) -> str:
        return f"ThirdParty(copies={len(self.store)}, decoys={self.decoy_count})"
