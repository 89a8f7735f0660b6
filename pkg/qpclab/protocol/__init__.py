"""
The comparison protocol: channel, parties, step functions and runs.

The step functions in qpclab.protocol.steps are the pure arithmetic of the
protocol. Participant and ThirdParty wrap them into party state machines,
and run_protocol choreographs one complete run into a Transcript.
"""

from qpclab.protocol.channel import (
    Channel,
    CheckResult,
    CustomEve,
    DecoyReceiver,
    DecoyRecord,
    EveModel,
    InterceptResend,
    NoEve,
    ParticleRef,
    ParticleStore,
    QuantumMessage,
    insert_decoys,
    run_check,
    transmit,
)
from qpclab.protocol.messages import (
    ClassicalMessage,
    DecoyAnnouncement,
    DecoyOutcomes,
    PairAnnouncement,
    Receipt,
    SumAnnouncement,
)
from qpclab.protocol.parties import Participant, ThirdParty
from qpclab.protocol.results import (
    PartyRecord,
    PartyView,
    ProtocolConfig,
    Transcript,
    Variant,
    Verdict,
    VerdictKind,
)
from qpclab.protocol.run import ProtocolHooks, RunContext, run_protocol
from qpclab.protocol.steps import (
    participant_announce,
    tp_combine_fixed,
    tp_combine_original,
    tp_prepare,
    verdict_fixed,
    verdict_original,
)

__all__ = [
    "Channel",
    "CheckResult",
    "ClassicalMessage",
    "CustomEve",
    "DecoyAnnouncement",
    "DecoyOutcomes",
    "DecoyReceiver",
    "DecoyRecord",
    "EveModel",
    "InterceptResend",
    "NoEve",
    "PairAnnouncement",
    "ParticleRef",
    "ParticleStore",
    "Participant",
    "PartyRecord",
    "PartyView",
    "ProtocolConfig",
    "ProtocolHooks",
    "QuantumMessage",
    "Receipt",
    "RunContext",
    "SumAnnouncement",
    "ThirdParty",
    "Transcript",
    "Variant",
    "Verdict",
    "VerdictKind",
    "insert_decoys",
    "participant_announce",
    "run_check",
    "run_protocol",
    "tp_combine_fixed",
    "tp_combine_original",
    "tp_prepare",
    "transmit",
    "verdict_fixed",
    "verdict_original",
]
