from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qpclab.errors import MalformedMessageError
from qpclab.primitives.encoding import BitPair, SecretInput, bit_sum, parse_pairs, to_groups, xor_all
from qpclab.primitives.keys import Party, party_view, simulate_qkd
from qpclab.primitives.quantum import DecoyPhoton
from qpclab.protocol.channel import CustomEve, InterceptResend, ParticleRef
from qpclab.protocol.messages import ClassicalMessage, DecoyOutcomes, PairAnnouncement, SumAnnouncement
from qpclab.protocol.parties import Participant
from qpclab.protocol.results import ProtocolConfig, Variant, Verdict, VerdictKind
from qpclab.protocol.run import ProtocolHooks, run_protocol
from qpclab.protocol.steps import (
    participant_announce,
    tp_combine_fixed,
    tp_combine_original,
    tp_prepare,
    verdict_fixed,
    verdict_original,
)


def run(x, y, variant=Variant.ORIGINAL, n_bits=4, seed=1, **kwargs):
    config = ProtocolConfig(variant, n_bits=n_bits, seed=seed, **kwargs)
    return run_protocol(SecretInput(x, n_bits), SecretInput(y, n_bits), config)


@st.composite
def secret_pairs(draw, max_bits=6):
    n_bits = draw(st.integers(min_value=1, max_value=max_bits))
    x = draw(st.integers(min_value=0, max_value=2**n_bits - 1))
    y = draw(st.one_of(st.just(x), st.integers(min_value=0, max_value=2**n_bits - 1)))
    return n_bits, x, y


class FlipFirstDecoys:
    """Quantum hook that corrupts every decoy of the first intercepted sequence."""

    def __init__(self):
        self.calls = 0

    def __call__(self, message, store, rng):
        self.calls += 1
        if self.calls > 1:
            return message
        slots = tuple(
            DecoyPhoton(s.basis, 1 - s.bit) if isinstance(s, DecoyPhoton) else s
            for s in message.slots
        )
        return replace(message, slots=slots)


# ==================== STEP FUNCTION TESTS ====================


class TestSteps:
    """Test the pure arithmetic of each protocol step."""

    def test_tp_prepare_splits_copies(self):
        store, s_a, s_b, s_c = tp_prepare(2)
        assert len(store) == 2
        assert s_a == (ParticleRef(0, 0), ParticleRef(0, 1), ParticleRef(1, 0), ParticleRef(1, 1))
        assert s_b[:2] == (ParticleRef(0, 2), ParticleRef(0, 3))
        assert s_c[-2:] == (ParticleRef(1, 4), ParticleRef(1, 5))

    def test_tp_prepare_needs_a_copy(self):
        with pytest.raises(ValueError):
            tp_prepare(0)

    def test_participant_announce(self):
        # 01 ^ 10 ^ 11 ^ 00 = 00
        assert participant_announce(BitPair(1), BitPair(2), BitPair(3), BitPair(0)) == BitPair(0)

    def test_combine_original_removes_measurements(self):
        # With M_C = M_A ^ M_B the combination is G_A ^ G_B ^ K_A ^ K_B.
        g_a, g_b, k_a, k_b, k_ac, k_bc = (BitPair(v) for v in (1, 3, 2, 0, 3, 1))
        m_a, m_b = BitPair(2), BitPair(1)
        r_a = participant_announce(g_a, m_a, k_ac, k_a)
        r_b = participant_announce(g_b, m_b, k_bc, k_b)
        r = tp_combine_original(r_a, r_b, k_ac, k_bc, m_a ^ m_b)
        assert r == xor_all(g_a, g_b, k_a, k_b)

    def test_verdict_original_equal(self):
        k_a, k_b = parse_pairs("01,10"), parse_pairs("11,11")
        r = tuple(a ^ b for a, b in zip(k_a, k_b))
        r_prime, verdict = verdict_original(r, k_a, k_b)
        assert r_prime == parse_pairs("00,00")
        assert verdict == Verdict.equal()

    def test_verdict_original_not_equal(self):
        zeros = parse_pairs("00,00")
        r_prime, verdict = verdict_original(parse_pairs("00,10"), zeros, zeros)
        assert r_prime == parse_pairs("00,10")
        assert verdict.kind is VerdictKind.NOT_EQUAL

    def test_verdict_original_length_mismatch_raises(self):
        with pytest.raises(ValueError):
            verdict_original(parse_pairs("00"), parse_pairs("00,00"), parse_pairs("00,00"))

    def test_verdict_original_empty_raises(self):
        with pytest.raises(ValueError):
            verdict_original((), (), ())

    def test_combine_fixed_counts_bits(self):
        zeros = parse_pairs("00,00")
        # a = 11, 01 -> S = 3
        assert tp_combine_fixed(parse_pairs("11,01"), zeros, zeros, zeros, zeros) == 3

    def test_combine_fixed_length_mismatch_raises(self):
        zeros = parse_pairs("00,00")
        with pytest.raises(ValueError):
            tp_combine_fixed(parse_pairs("00"), zeros, zeros, zeros, zeros)

    def test_verdict_fixed(self):
        k_a, k_b = parse_pairs("01,11"), parse_pairs("00,10")
        # K_A ^ K_B = 01, 01 -> S' = 2
        assert verdict_fixed(2, k_a, k_b) == (2, Verdict.equal())
        assert verdict_fixed(3, k_a, k_b) == (2, Verdict.not_equal())


# ==================== CONFIGURATION TESTS ====================


class TestProtocolConfig:
    """Test validation and defaults of run parameters."""

    def test_default_decoys_match_payload(self):
        assert ProtocolConfig(n_bits=4).decoy_count == 4
        assert ProtocolConfig(n_bits=5).decoy_count == 6

    def test_group_count(self):
        assert ProtocolConfig(n_bits=7).group_count == 4

    def test_zero_decoys_raises(self):
        with pytest.raises(ValueError):
            ProtocolConfig(decoy_count=0)

    def test_bad_threshold_raises(self):
        with pytest.raises(ValueError):
            ProtocolConfig(threshold=1.5)

    def test_negative_seed_raises(self):
        with pytest.raises(ValueError):
            ProtocolConfig(seed=-1)

    def test_zero_attempts_raises(self):
        with pytest.raises(ValueError):
            ProtocolConfig(max_attempts=0)

    def test_variant_must_be_enum(self):
        with pytest.raises(TypeError):
            ProtocolConfig(variant="original")

    def test_mismatched_secret_length_raises(self):
        with pytest.raises(ValueError):
            run_protocol(SecretInput(1, 3), SecretInput(1, 4), ProtocolConfig(n_bits=4))


class TestVerdict:
    """Test verdict rendering."""

    def test_str(self):
        assert str(Verdict.equal()) == "Equal"
        assert str(Verdict.not_equal()) == "NotEqual"
        assert str(Verdict.aborted("check failed")) == "Aborted (check failed)"

    def test_flags(self):
        assert Verdict.equal().is_equal
        assert Verdict.aborted("x").is_aborted
        assert not Verdict.not_equal().is_equal


# ==================== ORIGINAL VARIANT RUNS ====================


class TestOriginalRuns:
    """Test complete honest runs of the original variant."""

    def test_equal_secrets(self):
        assert run(6, 6).verdict == Verdict.equal()

    def test_unequal_secrets(self):
        assert run(6, 7).verdict == Verdict.not_equal()

    def test_both_participants_agree(self):
        transcript = run(9, 3, seed=4)
        alice = transcript.records[Party.ALICE].conclusion
        bob = transcript.records[Party.BOB].conclusion
        assert alice == bob == transcript.verdict

    def test_odd_bit_length(self):
        assert run(5, 5, n_bits=3).verdict.is_equal
        assert not run(5, 4, n_bits=3).verdict.is_equal

    def test_measurement_codes_cancel(self):
        transcript = run(12, 5, seed=8)
        m_a = transcript.records[Party.ALICE].measurements
        m_b = transcript.records[Party.BOB].measurements
        m_c = transcript.records[Party.TP].measurements
        assert all((a ^ b ^ c).value == 0 for a, b, c in zip(m_a, m_b, m_c))

    def test_r_is_masked_group_difference(self):
        transcript = run(12, 5, seed=8)
        g_a, g_b = to_groups(SecretInput(12, 4)), to_groups(SecretInput(5, 4))
        keys = transcript.records[Party.ALICE].keys
        expected = tuple(
            xor_all(g_a[i], g_b[i], keys.k_a[i], keys.k_b[i]) for i in range(len(g_a))
        )
        assert transcript.records[Party.TP].announced == expected

    def test_message_order(self):
        transcript = run(6, 6)
        # three check messages per sequence, then R_A, R_B and R
        assert len(transcript.messages) == 9
        labels = [m.body.label for m in transcript.announcements]
        assert labels == ["R_A", "R_B", "R"]
        assert transcript.messages[-1].receiver is None

    def test_checks_pass(self):
        transcript = run(6, 6)
        assert [c.link for c in transcript.checks] == ["TP->Alice", "TP->Bob"]
        assert all(c.passed and c.errors == 0 for c in transcript.checks)

    def test_same_config_same_transcript(self):
        assert run(3, 10, seed=42).to_dict() == run(3, 10, seed=42).to_dict()

    def test_different_seeds_draw_different_keys(self):
        first = run(3, 10, seed=1).records[Party.ALICE].keys
        second = run(3, 10, seed=2).records[Party.ALICE].keys
        assert first != second

    def test_audit_is_clean(self):
        assert run(3, 10, seed=5).audit() == []

    def test_audit_reports_tampered_record(self):
        transcript = run(3, 10, seed=5)
        record = transcript.records[Party.TP]
        flipped = (record.announced[0] ^ BitPair(1),) + record.announced[1:]
        transcript.records[Party.TP] = replace(record, announced=flipped)
        assert any(line.startswith("R[0]") for line in transcript.audit())

    @settings(max_examples=40, deadline=None)
    @given(secret_pairs(), st.integers(min_value=0, max_value=2**31))
    def test_verdict_is_exact(self, pair, seed):
        n_bits, x, y = pair
        transcript = run(x, y, n_bits=n_bits, seed=seed)
        assert transcript.verdict.is_equal == (x == y)
        assert not transcript.verdict.is_aborted
        assert transcript.audit() == []


# ==================== FIXED VARIANT RUNS ====================


class TestFixedRuns:
    """Test complete honest runs of the fixed variant."""

    def test_equal_secrets(self):
        assert run(6, 6, Variant.FIXED).verdict == Verdict.equal()

    def test_announces_only_a_sum(self):
        transcript = run(6, 9, Variant.FIXED, seed=3)
        broadcast = transcript.messages[-1]
        assert isinstance(broadcast.body, SumAnnouncement)
        assert broadcast.body.label == "S"
        assert transcript.records[Party.TP].announced == ()

    def test_sum_counts_masked_difference(self):
        transcript = run(6, 9, Variant.FIXED, seed=3)
        g_a, g_b = to_groups(SecretInput(6, 4)), to_groups(SecretInput(9, 4))
        keys = transcript.records[Party.BOB].keys
        expected = bit_sum(
            xor_all(g_a[i], g_b[i], keys.k_a[i], keys.k_b[i]) for i in range(len(g_a))
        )
        assert transcript.records[Party.TP].announced_sum == expected

    def test_audit_is_clean(self):
        assert run(6, 9, Variant.FIXED, seed=3).audit() == []

    @settings(max_examples=30, deadline=None)
    @given(secret_pairs(), st.integers(min_value=0, max_value=2**31))
    def test_equal_secrets_always_equal(self, pair, seed):
        n_bits, x, _ = pair
        assert run(x, x, Variant.FIXED, n_bits=n_bits, seed=seed).verdict.is_equal


# ==================== ABORTS AND RESTARTS ====================


class TestAborts:
    """Test failed checks, malformed messages and restarts."""

    def test_intercept_resend_aborts(self):
        # 40 decoys at threshold 0: the check passes with probability 0.75**40
        transcript = run(6, 6, decoy_count=40, seed=2)
        assert not transcript.verdict.is_aborted
        config = ProtocolConfig(n_bits=4, decoy_count=40, seed=2)
        attacked = run_protocol(SecretInput(6, 4), SecretInput(6, 4), config, eve=InterceptResend())
        assert attacked.verdict.is_aborted
        assert "TP->Alice" in attacked.verdict.reason

    def test_eve_cannot_hide_by_dropping_outcomes(self):
        class Silencer(InterceptResend):
            def intercept_classical(self, message):
                if isinstance(message.body, DecoyOutcomes):
                    return replace(message, body=replace(message.body, bits=()))
                return message

        config = ProtocolConfig(n_bits=4, decoy_count=20, seed=0)
        for seed in range(20):
            transcript = run_protocol(
                SecretInput(6, 4), SecretInput(6, 4), replace(config, seed=seed), eve=Silencer()
            )
            assert transcript.verdict.is_aborted
            assert transcript.verdict.reason.startswith("malformed message")

    def test_aborted_run_has_no_announcements(self):
        eve = CustomEve(quantum_hook=FlipFirstDecoys(), links=[Party.ALICE])
        config = ProtocolConfig(n_bits=4, seed=0)
        transcript = run_protocol(SecretInput(1, 4), SecretInput(1, 4), config, eve=eve)
        assert transcript.verdict.is_aborted
        assert transcript.announcements == []
        assert transcript.audit() == []

    def test_restart_after_failed_check(self):
        eve = CustomEve(quantum_hook=FlipFirstDecoys(), links=[Party.ALICE])
        config = ProtocolConfig(n_bits=4, seed=0, max_attempts=3)
        transcript = run_protocol(SecretInput(1, 4), SecretInput(1, 4), config, eve=eve)
        assert transcript.attempts == 2
        assert transcript.verdict == Verdict.equal()
        assert [c.passed for c in transcript.checks] == [False, True, True]

    def test_every_attempt_aborted(self):
        eve = CustomEve(
            quantum_hook=lambda m, store, rng: replace(
                m,
                slots=tuple(
                    DecoyPhoton(s.basis, 1 - s.bit) if isinstance(s, DecoyPhoton) else s
                    for s in m.slots
                ),
            ),
            links=[Party.BOB],
        )
        config = ProtocolConfig(n_bits=2, seed=0, max_attempts=3)
        transcript = run_protocol(SecretInput(1, 2), SecretInput(1, 2), config, eve=eve)
        assert transcript.attempts == 3
        assert transcript.verdict.is_aborted
        assert len(transcript.checks) == 6

    def test_malformed_announcement_aborts(self):
        class Relabel(ProtocolHooks):
            def rewrite(self, message):
                body = message.body
                if isinstance(body, PairAnnouncement) and body.label == "R_A":
                    return ClassicalMessage(message.claimed_sender, message.receiver, replace(body, label="R_X"))
                return message

        config = ProtocolConfig(n_bits=4, seed=0)
        transcript = run_protocol(SecretInput(1, 4), SecretInput(1, 4), config, hooks=Relabel())
        assert transcript.verdict.is_aborted
        assert transcript.verdict.reason.startswith("malformed message")


# ==================== PARTY AND VIEW TESTS ====================


class TestParties:
    """Test participant state machines and legitimate views."""

    def test_tp_is_not_a_participant(self):
        ring = simulate_qkd(2, np.random.default_rng(0))
        store, *_ = tp_prepare(2)
        with pytest.raises(ValueError):
            Participant(Party.TP, SecretInput(1, 4), party_view(ring, Party.ALICE), store, np.random.default_rng(0))

    def test_conclude_rejects_wrong_broadcast(self):
        ring = simulate_qkd(2, np.random.default_rng(0))
        store, *_ = tp_prepare(2)
        alice = Participant(Party.ALICE, SecretInput(1, 4), party_view(ring, Party.ALICE), store, np.random.default_rng(0))
        broadcast = ClassicalMessage(Party.TP, None, SumAnnouncement("S", 0))
        with pytest.raises(MalformedMessageError):
            alice.conclude(broadcast, Variant.ORIGINAL)

    def test_measure_before_receipt_raises(self):
        ring = simulate_qkd(2, np.random.default_rng(0))
        store, *_ = tp_prepare(2)
        bob = Participant(Party.BOB, SecretInput(1, 4), party_view(ring, Party.BOB), store, np.random.default_rng(0))
        with pytest.raises(MalformedMessageError):
            bob.measure()

    def test_tp_view_has_no_participant_keys(self):
        view = run(6, 6).view_for(Party.TP)
        assert not hasattr(view.keys, "k_a")
        assert view.record.groups is None

    def test_view_exposes_public_values(self):
        transcript = run(6, 6)
        view = transcript.view_for(Party.BOB)
        assert view.public_pairs("R") == transcript.records[Party.TP].announced
        assert view.public_sum("S") is None

    def test_repr(self):
        assert repr(run(6, 6)).startswith("Transcript(variant=original, n_bits=4, seed=1")

    def test_str_walkthrough(self):
        text = str(run(6, 6))
        assert text.splitlines()[0] == "original run, N=4, seed 1 (1 attempt)"
        assert text.splitlines()[-1] == "Verdict: Equal"
        assert "check TP->Alice: 0/4 errors, pass" in text
