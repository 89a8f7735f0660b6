from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, replace
from typing import Any, Callable, Iterable, Protocol

import numpy as np

from qpclab.errors import ConfigurationError, MalformedMessageError
from qpclab.primitives.encoding import BitPair
from qpclab.primitives.factories import new_decoy
from qpclab.primitives.keys import Party
from qpclab.primitives.quantum import (
    Basis,
    BellCode,
    DecoyPhoton,
    StateVector,
    bell_measure_pair,
    measure_decoy,
    measure_qubit,
    z_measure_pair,
)
from qpclab.protocol.messages import (
    ClassicalMessage,
    DecoyAnnouncement,
    DecoyOutcomes,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class ParticleRef:
    """
    A reference to one qubit of one carrier copy held in a ParticleStore.

    copy and qubit are 0-based; ParticleRef(0, 0) is p_1^1, the first
    qubit of the first copy.
    """

    copy: int
    qubit: int

    def __str__(self) -> str:
        return f"p{self.copy + 1}.{self.qubit + 1}"


Slot = ParticleRef | DecoyPhoton


class ParticleStore:
    """
    The physical particles of one protocol run.

    Holds one StateVector per carrier copy. Measurements replace the copy
    with its collapsed state, so whoever measures a particle first fixes
    what later measurements see. A store belongs to a single run.

    Parameters
    ----------
    states : Iterable[StateVector]
        The carrier copies, in order.
    """

    def __init__(self, states: Iterable[StateVector]) -> None:
        self.states: list[StateVector] = list(states)

    def __len__(self) -> int:
        return len(self.states)

    def __repr__(self) -> str:
        return f"ParticleStore(copies={len(self.states)})"

    def _check_pair(self, hi: ParticleRef, lo: ParticleRef) -> None:
        if not (isinstance(hi, ParticleRef) and isinstance(lo, ParticleRef)):
            raise MalformedMessageError(
                f"Expected two particle references. Got {hi!r} and {lo!r}."
            )

        if hi.copy != lo.copy:
            raise MalformedMessageError(
                f"Particles {hi} and {lo} belong to different carrier copies."
            )

    def z_measure(self, hi: ParticleRef, lo: ParticleRef, rng: np.random.Generator) -> BitPair:
        """Measure two particles of one copy in the Z basis."""
        self._check_pair(hi, lo)
        outcome, collapsed = z_measure_pair(self.states[hi.copy], hi.qubit, lo.qubit, rng)
        self.states[hi.copy] = collapsed
        return outcome

    def bell_measure(self, hi: ParticleRef, lo: ParticleRef, rng: np.random.Generator) -> BellCode:
        """Measure two particles of one copy in the Bell basis."""
        self._check_pair(hi, lo)
        outcome, collapsed = bell_measure_pair(self.states[hi.copy], hi.qubit, lo.qubit, rng)
        self.states[hi.copy] = collapsed
        return outcome

    def measure(self, ref: ParticleRef, basis: Basis, rng: np.random.Generator) -> int:
        """Measure a single particle in the Z or X basis."""
        outcome, collapsed = measure_qubit(self.states[ref.copy], ref.qubit, basis, rng)
        self.states[ref.copy] = collapsed
        return outcome


@dataclass(frozen=True)
class DecoyRecord:
    """
    The sender's private record of where decoys went and how they were made.

    Attributes
    ----------
    sender : Party
        The identity the quantum sequence was sent under.
    receiver : Party
        The intended receiver.
    owner : Party
        The party that actually prepared the decoys and keeps this record.
    positions : tuple[int, ...]
        Slot indices of the decoys, ascending.
    photons : tuple[DecoyPhoton, ...]
        The prepared photons, aligned with positions.
    """

    sender: Party
    receiver: Party
    owner: Party
    positions: tuple[int, ...]
    photons: tuple[DecoyPhoton, ...]

    def __len__(self) -> int:
        return len(self.positions)


@dataclass(frozen=True)
class QuantumMessage:
    """
    A particle sequence on the quantum channel: payload particles with
    decoy photons mixed in.

    The record is present only on the sender's copy; in_transit() strips
    it, so the channel and anything listening on it see slots alone.
    """

    sender: Party
    receiver: Party
    label: str
    slots: tuple[Slot, ...]
    record: DecoyRecord | None = None

    def in_transit(self) -> QuantumMessage:
        """The message as it travels: slots only, no sender record."""
        return replace(self, record=None)

    def payload(self, decoy_positions: Iterable[int]) -> tuple[Slot, ...]:
        """The slots left after removing the given decoy positions."""
        removed = set(decoy_positions)
        return tuple(slot for i, slot in enumerate(self.slots) if i not in removed)

    def __len__(self) -> int:
        return len(self.slots)

    def __repr__(self) -> str:
        return (
            f"QuantumMessage({self.label}: {self.sender} -> {self.receiver}, "
            f"slots={len(self.slots)})"
        )


def insert_decoys(
    payload: Iterable[ParticleRef],
    count: int,
    rng: np.random.Generator,
    sender: Party = Party.TP,
    receiver: Party = Party.ALICE,
    label: str = "S*",
    owner: Party | None = None,
) -> QuantumMessage:
    """
    Mix fresh decoy photons into a particle sequence at random positions.

    The decoy positions are a uniformly random subset of the final slot
    indices; payload order is preserved. The returned message carries the
    sender's record of positions and prepared states.

    Parameters
    ----------
    payload : Iterable[ParticleRef]
        The payload particles in order.
    count : int
        Number of decoys to insert. Must be >= 0.
    rng : numpy.random.Generator
        Source of randomness.
    sender, receiver : Party
        The endpoints the sequence is sent between.
    label : str
        Name of the sequence, used in receipts and logs.
    owner : Party, optional
        The party that really prepares the decoys. Defaults to sender.

    Returns
    -------
    QuantumMessage
        The mixed sequence with its decoy record.

    Raises
    ------
    ValueError
        If count is negative.
    """
    if isinstance(count, bool) or not isinstance(count, int) or count < 0:
        raise ValueError(f"Decoy count must be a non-negative integer. Got {count!r}.")

    payload = tuple(payload)
    total = len(payload) + count
    positions = tuple(sorted(int(p) for p in rng.choice(total, size=count, replace=False)))
    photons = tuple(new_decoy(rng) for _ in range(count))

    decoys = dict(zip(positions, photons))
    remaining = iter(payload)
    slots = tuple(decoys[i] if i in decoys else next(remaining) for i in range(total))

    record = DecoyRecord(sender, receiver, owner or sender, positions, photons)
    return QuantumMessage(sender, receiver, label, slots, record)


class EveModel(ABC):
    """
    An eavesdropper on the channel.

    An EveModel sits on a set of quantum links, named by the participant
    at the receiving end of a TP -> participant sequence, and may also
    rewrite classical messages.

    Subclasses
    ----------
    NoEve
        Delivers everything unmodified.
    InterceptResend
        Measures every photon on its links in a random basis and forwards
        the observed state.
    CustomEve
        Delegates to caller-supplied hooks.
    """

    def __init__(self, links: Iterable[Party] = (Party.ALICE,)) -> None:
        self.links = frozenset(links)

    def watches(self, message: QuantumMessage) -> bool:
        """Whether this eavesdropper sits on the link a message travels."""
        return message.receiver in self.links

    @abstractmethod
    def intercept_quantum(
        self, message: QuantumMessage, store: ParticleStore, rng: np.random.Generator
    ) -> QuantumMessage:
        """
        Act on a quantum message in transit and return what is delivered.

        Parameters
        ----------
        message : QuantumMessage
            The in-transit message (no sender record).
        store : ParticleStore
            The run's particles, for measuring payload slots.
        rng : numpy.random.Generator
            Source of randomness.
        """
        pass

    def intercept_classical(self, message: ClassicalMessage) -> ClassicalMessage:
        """Act on a classical message; the default delivers it unchanged."""
        return message

    @property
    def name(self) -> str:
        return type(self).__name__

    def __repr__(self) -> str:
        links = ",".join(sorted(str(p) for p in self.links))
        return f"{self.name}(links={links})"


class NoEve(EveModel):
    """No eavesdropper."""

    def __init__(self) -> None:
        super().__init__(links=())

    def intercept_quantum(
        self, message: QuantumMessage, store: ParticleStore, rng: np.random.Generator
    ) -> QuantumMessage:
        return message


class InterceptResend(EveModel):
    """
    Intercept-resend in a uniformly random basis.

    Every slot is measured in Z or X chosen with probability 1/2 and
    re-sent as the observed eigenstate of that basis. For a decoy measured
    back by the receiver in its preparation basis, this produces an error
    with probability 1/4. Payload particles are measured in the shared
    state, which collapses the carrier copy.
    """

    def intercept_quantum(
        self, message: QuantumMessage, store: ParticleStore, rng: np.random.Generator
    ) -> QuantumMessage:
        resent: list[Slot] = []
        for slot in message.slots:
            basis = Basis.Z if rng.integers(2) == 0 else Basis.X
            if isinstance(slot, DecoyPhoton):
                bit = measure_decoy(slot, basis, rng)
                resent.append(DecoyPhoton(basis, bit))
            else:
                store.measure(slot, basis, rng)
                resent.append(slot)

        logger.debug("intercept-resend on %s: %d slots", message.label, len(resent))
        return replace(message, slots=tuple(resent))


class CustomEve(EveModel):
    """
    An eavesdropper defined by hooks.

    Parameters
    ----------
    quantum_hook : callable, optional
        Receives (message, store, rng) and returns the message to deliver.
    classical_hook : callable, optional
        Receives a ClassicalMessage and returns the (possibly forged)
        replacement.
    links : Iterable[Party]
        The quantum links the quantum hook applies to.
    """

    def __init__(
        self,
        quantum_hook: Callable[[QuantumMessage, ParticleStore, np.random.Generator], QuantumMessage]
        | None = None,
        classical_hook: Callable[[ClassicalMessage], ClassicalMessage] | None = None,
        links: Iterable[Party] = (Party.ALICE, Party.BOB),
    ) -> None:
        super().__init__(links)
        self.quantum_hook = quantum_hook
        self.classical_hook = classical_hook

    def intercept_quantum(
        self, message: QuantumMessage, store: ParticleStore, rng: np.random.Generator
    ) -> QuantumMessage:
        if self.quantum_hook is None:
            return message

        return self.quantum_hook(message, store, rng)

    def intercept_classical(self, message: ClassicalMessage) -> ClassicalMessage:
        if self.classical_hook is None:
            return message

        return self.classical_hook(message)


def transmit(
    message: QuantumMessage | ClassicalMessage,
    eve: EveModel | None = None,
    store: ParticleStore | None = None,
    rng: np.random.Generator | None = None,
) -> QuantumMessage | ClassicalMessage:
    """
    Carry a message across the channel.

    Quantum messages lose their sender record on the way. With no
    eavesdropper, or one that does not sit on the message's link, the
    delivered message equals what was sent.

    Raises
    ------
    ValueError
        If an eavesdropper on a quantum link is given no store or rng.
    """
    if isinstance(message, ClassicalMessage):
        return message if eve is None else eve.intercept_classical(message)

    if not isinstance(message, QuantumMessage):
        raise TypeError(f"Cannot transmit a {type(message).__name__}.")

    in_transit = message.in_transit()
    if eve is None or not eve.watches(message):
        return in_transit

    if store is None or rng is None:
        raise ValueError("An eavesdropper on a quantum link needs the particle store and an rng.")

    return eve.intercept_quantum(in_transit, store, rng)


class DecoyReceiver(Protocol):
    """Anything that can sit at the receiving end of an eavesdropping check."""

    def confirm_receipt(self) -> ClassicalMessage: ...

    def answer_check(self, announcement: ClassicalMessage) -> ClassicalMessage: ...


@dataclass(frozen=True)
class CheckResult:
    """
    The outcome of one eavesdropping check.

    Attributes
    ----------
    sender, receiver : Party
        The claimed endpoints of the checked sequence.
    owner : Party
        The party that prepared the decoys and judged the check.
    decoys : int
        Number of decoys compared.
    errors : int
        Number of mismatches.
    threshold : float
        The tolerated error rate.
    """

    sender: Party
    receiver: Party
    owner: Party
    decoys: int
    errors: int
    threshold: float

    @property
    def error_rate(self) -> float:
        """
        Fraction of compared decoys that came back wrong.

        Returns
        -------
        float
            errors / decoys, in [0, 1]. Checks never run with zero decoys.
        """
        return self.errors / self.decoys

    @property
    def passed(self) -> bool:
        """Whether the error rate is at or below the threshold."""
        return self.error_rate <= self.threshold

    @property
    def link(self) -> str:
        """Label of the checked link, naming an impersonating owner when there is one."""
        if self.owner is self.sender:
            return f"{self.sender}->{self.receiver}"

        return f"{self.owner}(as {self.sender})->{self.receiver}"

    def to_dict(self) -> dict[str, Any]:
        return {
            "link": self.link,
            "decoys": self.decoys,
            "errors": self.errors,
            "error_rate": self.error_rate,
            "threshold": self.threshold,
            "passed": self.passed,
        }

    def __str__(self) -> str:
        status = "pass" if self.passed else "abort"
        return f"check {self.link}: {self.errors}/{self.decoys} errors, {status}"


class Channel:
    """
    The channel of one protocol run.

    Routes quantum sequences through the eavesdropper and keeps the public
    log of every classical message delivered. A channel belongs to one run
    and is used from a single thread.

    Parameters
    ----------
    store : ParticleStore
        The run's particles.
    rng : numpy.random.Generator
        The run's random stream.
    eve : EveModel, optional
        The eavesdropper, if any.
    rewrite : callable, optional
        An extra classical interception hook applied after eve, used by
        adversarial participants.
    """

    def __init__(
        self,
        store: ParticleStore,
        rng: np.random.Generator,
        eve: EveModel | None = None,
        rewrite: Callable[[ClassicalMessage], ClassicalMessage] | None = None,
    ) -> None:
        self.store = store
        self.rng = rng
        self.eve = eve
        self.rewrite = rewrite
        self.log: list[ClassicalMessage] = []

    def send(self, message: QuantumMessage) -> QuantumMessage:
        """Send a quantum sequence and return what arrives."""
        delivered = transmit(message, self.eve, self.store, self.rng)
        logger.debug("delivered %r", delivered)
        return delivered

    def post(self, message: ClassicalMessage) -> ClassicalMessage:
        """Publish a classical message and return what arrives."""
        delivered = transmit(message, self.eve)
        if self.rewrite is not None:
            delivered = self.rewrite(delivered)

        self.log.append(delivered)
        return delivered


def run_check(
    record: DecoyRecord,
    receiver: DecoyReceiver,
    threshold: float,
    channel: Channel,
) -> CheckResult:
    """
    Run the decoy-photon eavesdropping check for one delivered sequence.

    The receiver confirms receipt, the record owner announces the decoy
    positions and bases, the receiver measures each decoy in the announced
    basis and reports back, and the owner counts mismatches. The check
    passes when the error rate is at most threshold.

    Parameters
    ----------
    record : DecoyRecord
        The owner's private record for the sequence.
    receiver : DecoyReceiver
        Whoever holds the delivered sequence.
    threshold : float
        Tolerated error rate in [0, 1].
    channel : Channel
        The classical channel the exchange is posted on.

    Returns
    -------
    CheckResult
        Counts and verdict of the check.

    Raises
    ------
    ConfigurationError
        If the record holds no decoys.
    ValueError
        If threshold is outside [0, 1].
    MalformedMessageError
        If the receiver's answer does not cover the announced positions.
    """
    if len(record) == 0:
        raise ConfigurationError(
            "An eavesdropping check needs at least one decoy photon; the record has none."
        )

    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"Threshold must be an error rate in [0, 1]. Got {threshold}.")

    channel.post(receiver.confirm_receipt())

    announcement = ClassicalMessage(
        record.sender,
        record.receiver,
        DecoyAnnouncement(record.positions, tuple(p.basis for p in record.photons)),
    )
    answer = channel.post(receiver.answer_check(channel.post(announcement)))

    body = answer.body
    if not isinstance(body, DecoyOutcomes) or body.positions != record.positions:
        raise MalformedMessageError(
            f"Decoy answer does not match the announced positions: {answer}."
        )
    if len(body.bits) != len(record.positions):
        raise MalformedMessageError(
            f"Decoy answer must report one outcome per announced position. "
            f"Got {len(body.bits)} outcomes for {len(record.positions)} positions."
        )

    errors = sum(int(bit != photon.bit) for bit, photon in zip(body.bits, record.photons))
    result = CheckResult(record.sender, record.receiver, record.owner, len(record), errors, threshold)
    logger.debug("%s", result)
    return result
