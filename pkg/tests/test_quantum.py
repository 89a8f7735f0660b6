import numpy as np
import pytest

from qpclab.errors import StateCollapseError
from qpclab.primitives.encoding import ALL_PAIRS, BitPair, bell_code_bits
from qpclab.primitives.factories import (
    UPSILON_AMPLITUDE,
    UPSILON_NEGATIVE_KETS,
    UPSILON_POSITIVE_KETS,
    basis_state,
    bell_state,
    build_upsilon,
    new_decoy,
)
from qpclab.primitives.quantum import (
    Basis,
    BellCode,
    DecoyPhoton,
    StateVector,
    bell_measure_pair,
    bell_probabilities,
    marginal_probabilities,
    measure_decoy,
    measure_qubit,
    pair_probabilities,
    project_pair,
    z_measure_pair,
)

PLUS = StateVector(np.array([1, 1]) / np.sqrt(2))

# ==================== STATE VECTOR TESTS ====================


class TestStateVector:
    """Test construction and validation of state vectors."""

    def test_num_qubits(self):
        assert StateVector([1, 0, 0, 0]).num_qubits == 2
        assert StateVector(np.eye(8)[3]).num_qubits == 3

    def test_norm(self):
        assert StateVector([0, 1]).norm == pytest.approx(1.0)

    def test_length_not_power_of_two_raises(self):
        with pytest.raises(ValueError):
            StateVector([1, 0, 0])

    def test_single_amplitude_raises(self):
        with pytest.raises(ValueError):
            StateVector([1])

    def test_unnormalized_raises(self):
        with pytest.raises(ValueError):
            StateVector([1, 1])

    def test_amplitudes_are_read_only(self):
        psi = StateVector([1, 0])
        with pytest.raises(ValueError):
            psi.amplitudes[0] = 0

    def test_index_of_uses_first_qubit_as_high_bit(self):
        psi = basis_state(6, "000001")
        assert psi.index_of("000001") == 1
        assert psi[1] == 1

    def test_index_of_bad_label_raises(self):
        with pytest.raises(ValueError):
            basis_state(2, "00").index_of("001")

    def test_equality(self):
        assert bell_state(BellCode.PHI_PLUS) == StateVector(np.array([1, 0, 0, 1]) / np.sqrt(2))
        assert bell_state(BellCode.PHI_PLUS) != bell_state(BellCode.PHI_MINUS)

    def test_str_lists_nonzero_terms(self):
        assert str(basis_state(2, "01")) == "+1.000000|01>"


# ==================== CARRIER STATE TESTS ====================


class TestUpsilon:
    """Test the amplitude pattern and correlations of the six-qubit carrier."""

    def test_thirty_two_nonzero_amplitudes(self):
        assert build_upsilon().support_size == 32

    def test_sign_pattern(self):
        upsilon = build_upsilon()
        for ket in UPSILON_POSITIVE_KETS:
            assert upsilon.amplitude(ket) == pytest.approx(UPSILON_AMPLITUDE, abs=1e-12)
        for ket in UPSILON_NEGATIVE_KETS:
            assert upsilon.amplitude(ket) == pytest.approx(-UPSILON_AMPLITUDE, abs=1e-12)

    def test_twenty_positive_twelve_negative(self):
        real = build_upsilon().amplitudes.real
        assert np.count_nonzero(real > 1e-12) == 20
        assert np.count_nonzero(real < -1e-12) == 12

    def test_kets_are_distinct(self):
        assert len(set(UPSILON_POSITIVE_KETS) | set(UPSILON_NEGATIVE_KETS)) == 32

    def test_is_normalized(self):
        assert build_upsilon().norm == pytest.approx(1.0, abs=1e-12)

    def test_known_amplitudes(self):
        upsilon = build_upsilon()
        # 1 / sqrt(32) = 0.1767767
        assert upsilon.amplitude("000000").real == pytest.approx(0.1767767, abs=1e-7)
        assert upsilon.amplitude("010100").real == pytest.approx(-0.1767767, abs=1e-7)
        assert upsilon.amplitude("000001") == 0

    def test_each_pair_marginal_is_uniform(self):
        upsilon = build_upsilon()
        for q_hi, q_lo in ((0, 1), (2, 3), (4, 5)):
            assert np.allclose(pair_probabilities(upsilon, q_hi, q_lo), 0.25)

    def test_first_four_qubits_are_uniform(self):
        # Two kets per (M_A, M_B) pattern: 2 / 32 each.
        assert np.allclose(marginal_probabilities(build_upsilon(), [0, 1, 2, 3]), 1 / 16)

    def test_remaining_pair_is_the_xor_bell_state(self):
        upsilon = build_upsilon()
        for m_a in ALL_PAIRS:
            for m_b in ALL_PAIRS:
                collapsed = project_pair(project_pair(upsilon, 0, 1, m_a), 2, 3, m_b)
                probabilities = bell_probabilities(collapsed, 4, 5)
                expected = BellCode((m_a ^ m_b).value)
                assert probabilities[expected] == pytest.approx(1.0)

    def test_sampled_rounds_satisfy_correlation(self):
        upsilon = build_upsilon()
        rng = np.random.default_rng(11)
        for _ in range(300):
            m_a, collapsed = z_measure_pair(upsilon, 0, 1, rng)
            m_b, collapsed = z_measure_pair(collapsed, 2, 3, rng)
            m_c, _ = bell_measure_pair(collapsed, 4, 5, rng)
            assert (m_a ^ m_b ^ bell_code_bits(m_c)).value == 0


# ==================== MEASUREMENT TESTS ====================


class TestZMeasurePair:
    """Test Z-basis pair measurement and collapse."""

    def test_basis_state_is_deterministic(self):
        rng = np.random.default_rng(0)
        outcome, after = z_measure_pair(basis_state(3, "101"), 0, 2, rng)
        assert outcome == BitPair.parse("11")
        assert after == basis_state(3, "101")

    def test_order_of_qubits_sets_bit_order(self):
        rng = np.random.default_rng(0)
        outcome, _ = z_measure_pair(basis_state(2, "10"), 1, 0, rng)
        assert outcome == BitPair.parse("01")

    def test_repeated_measurement_agrees(self):
        rng = np.random.default_rng(5)
        upsilon = build_upsilon()
        for _ in range(50):
            first, collapsed = z_measure_pair(upsilon, 2, 3, rng)
            second, _ = z_measure_pair(collapsed, 2, 3, rng)
            assert first == second

    def test_does_not_modify_input(self):
        upsilon = build_upsilon()
        z_measure_pair(upsilon, 0, 1, np.random.default_rng(1))
        assert upsilon == build_upsilon()

    def test_frequencies_match_marginal(self):
        rng = np.random.default_rng(2024)
        state = StateVector(np.array([np.sqrt(0.1), 0, np.sqrt(0.6), np.sqrt(0.3)]))
        counts = np.zeros(4)
        for _ in range(4000):
            outcome, _ = z_measure_pair(state, 0, 1, rng)
            counts[outcome.value] += 1
        # 3 sigma for p = 0.6 at 4000 trials is about 0.023
        assert np.allclose(counts / 4000, [0.1, 0.0, 0.6, 0.3], atol=0.03)

    @pytest.mark.slow
    def test_frequencies_within_three_sigma(self):
        rng = np.random.default_rng(2025)
        expected = np.array([0.1, 0.0, 0.6, 0.3])
        state = StateVector(np.sqrt(expected))
        counts = np.zeros(4)
        for _ in range(10_000):
            outcome, _ = z_measure_pair(state, 0, 1, rng)
            counts[outcome.value] += 1
        sigma = np.sqrt(expected * (1 - expected) / 10_000)
        assert counts[1] == 0
        assert np.all(np.abs(counts / 10_000 - expected) <= 3 * sigma)

    def test_equal_indices_raise(self):
        with pytest.raises(ValueError):
            z_measure_pair(build_upsilon(), 1, 1, np.random.default_rng(0))

    def test_out_of_range_index_raises(self):
        with pytest.raises(ValueError):
            z_measure_pair(build_upsilon(), 0, 6, np.random.default_rng(0))

    def test_projecting_onto_zero_branch_raises(self):
        with pytest.raises(StateCollapseError):
            project_pair(basis_state(2, "00"), 0, 1, BitPair.parse("11"))


class TestBellMeasurePair:
    """Test Bell-basis pair measurement."""

    def test_identifies_each_bell_state(self):
        rng = np.random.default_rng(0)
        for code in BellCode:
            outcome, after = bell_measure_pair(bell_state(code), 0, 1, rng)
            assert outcome is code
            assert after == bell_state(code)

    def test_product_state_probabilities(self):
        # |00> = (phi+ + phi-) / sqrt(2)
        probabilities = bell_probabilities(basis_state(2, "00"), 0, 1)
        assert probabilities[BellCode.PHI_PLUS] == pytest.approx(0.5)
        assert probabilities[BellCode.PHI_MINUS] == pytest.approx(0.5)
        assert probabilities[BellCode.PSI_PLUS] == pytest.approx(0.0)


class TestMeasureQubit:
    """Test single-qubit measurement in the Z and X bases."""

    def test_plus_state_in_x_basis_reads_zero(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            outcome, after = measure_qubit(PLUS, 0, Basis.X, rng)
            assert outcome == 0
            assert after == PLUS

    def test_x_outcome_is_repeatable(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            first, collapsed = measure_qubit(basis_state(1, "0"), 0, Basis.X, rng)
            second, _ = measure_qubit(collapsed, 0, Basis.X, rng)
            assert first == second

    def test_z_measurement_of_bell_pair_collapses_partner(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            first, collapsed = measure_qubit(bell_state(BellCode.PHI_PLUS), 0, Basis.Z, rng)
            second, _ = measure_qubit(collapsed, 1, Basis.Z, rng)
            assert first == second

    def test_out_of_range_raises(self):
        with pytest.raises(ValueError):
            measure_qubit(PLUS, 1, Basis.Z, np.random.default_rng(0))


# ==================== DECOY PHOTON TESTS ====================


class TestDecoys:
    """Test preparation and measurement of decoy photons."""

    def test_matching_basis_returns_prepared_bit(self):
        rng = np.random.default_rng(0)
        for basis in Basis:
            for bit in (0, 1):
                assert measure_decoy(DecoyPhoton(basis, bit), basis, rng) == bit

    def test_mismatched_basis_is_fair(self):
        rng = np.random.default_rng(9)
        ones = sum(measure_decoy(DecoyPhoton(Basis.Z, 0), Basis.X, rng) for _ in range(4000))
        assert ones / 4000 == pytest.approx(0.5, abs=0.03)

    def test_new_decoy_covers_four_states(self):
        rng = np.random.default_rng(1)
        seen = {(d.basis, d.bit) for d in (new_decoy(rng) for _ in range(200))}
        assert len(seen) == 4

    def test_str(self):
        assert str(DecoyPhoton(Basis.Z, 1)) == "|1>"
        assert str(DecoyPhoton(Basis.X, 1)) == "|->"

    def test_bad_bit_raises(self):
        with pytest.raises(ValueError):
            DecoyPhoton(Basis.Z, 2)

    def test_bad_basis_raises(self):
        with pytest.raises(TypeError):
            DecoyPhoton("Z", 0)
