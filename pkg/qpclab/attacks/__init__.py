"""
Attacks on the comparison protocol.

passive_attack works on a finished run's legitimate view; active_attack
runs the protocol with one participant intercepting the other's particles.
"""

from qpclab.attacks.active import (
    Impersonator,
    InterceptionHooks,
    active_attack,
    deduce_mc,
)
from qpclab.attacks.passive import passive_attack, run_passive_attack
from qpclab.attacks.results import AttackReport, candidate_count

__all__ = [
    "AttackReport",
    "Impersonator",
    "InterceptionHooks",
    "active_attack",
    "candidate_count",
    "deduce_mc",
    "passive_attack",
    "run_passive_attack",
]
