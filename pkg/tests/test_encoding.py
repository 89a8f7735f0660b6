import pytest
from hypothesis import given, strategies as st

from qpclab.primitives.encoding import (
    ALL_PAIRS,
    ZERO_PAIR,
    BitPair,
    GroupSequence,
    SecretInput,
    bell_code_bits,
    bit_sum,
    from_groups,
    group_count,
    parse_pairs,
    to_groups,
    xor,
    xor_all,
    xor_sequences,
)
from qpclab.primitives.quantum import BellCode


@st.composite
def secrets(draw, max_bits=12):
    n_bits = draw(st.integers(min_value=1, max_value=max_bits))
    value = draw(st.integers(min_value=0, max_value=2**n_bits - 1))
    return SecretInput(value, n_bits)


pairs = st.sampled_from(ALL_PAIRS)

# ==================== BIT PAIR TESTS ====================


class TestBitPair:
    """Test construction, rendering and arithmetic of two-bit words."""

    def test_renders_high_bit_first(self):
        assert str(BitPair(1)) == "01"
        assert str(BitPair(2)) == "10"

    def test_repr(self):
        assert repr(BitPair(3)) == "BitPair('11')"

    def test_from_bits(self):
        assert BitPair.from_bits(1, 0) == BitPair(2)
        assert BitPair.from_bits(0, 1) == BitPair(1)

    def test_parse(self):
        assert BitPair.parse("10") == BitPair(2)

    def test_hi_lo_weight(self):
        pair = BitPair.parse("10")
        assert (pair.hi, pair.lo, pair.weight) == (1, 0, 1)
        assert BitPair.parse("11").weight == 2

    def test_xor(self):
        assert BitPair.parse("01") ^ BitPair.parse("11") == BitPair.parse("10")

    def test_value_out_of_range_raises(self):
        with pytest.raises(ValueError):
            BitPair(4)
        with pytest.raises(ValueError):
            BitPair(-1)

    def test_non_integer_raises(self):
        with pytest.raises(TypeError):
            BitPair(1.0)
        with pytest.raises(TypeError):
            BitPair(True)

    def test_bad_bits_raise(self):
        with pytest.raises(ValueError):
            BitPair.from_bits(2, 0)

    def test_bad_text_raises(self):
        for text in ("1", "012", "21", ""):
            with pytest.raises(ValueError):
                BitPair.parse(text)

    @given(pairs)
    def test_xor_with_itself_is_zero(self, pair):
        assert pair ^ pair == ZERO_PAIR

    @given(pairs, pairs)
    def test_xor_is_commutative(self, a, b):
        assert xor(a, b) == xor(b, a)

    @given(pairs)
    def test_parse_inverts_str(self, pair):
        assert BitPair.parse(str(pair)) == pair


# ==================== SECRET INPUT TESTS ====================


class TestSecretInput:
    """Test the validation and bit layout of secrets."""

    def test_bits_least_significant_first(self):
        # 6 = 0b0110 -> x_1..x_4 = 0, 1, 1, 0
        assert SecretInput(6, 4).bits == (0, 1, 1, 0)

    def test_group_count(self):
        assert SecretInput(0, 4).group_count == 2
        assert SecretInput(0, 5).group_count == 3
        assert SecretInput(0, 1).group_count == 1

    def test_equality_includes_bit_length(self):
        assert SecretInput(3, 4) == SecretInput(3, 4)
        assert SecretInput(3, 4) != SecretInput(3, 5)

    def test_value_too_large_raises(self):
        with pytest.raises(ValueError):
            SecretInput(16, 4)

    def test_negative_value_raises(self):
        with pytest.raises(ValueError):
            SecretInput(-1, 4)

    def test_zero_bits_raises(self):
        with pytest.raises(ValueError):
            SecretInput(0, 0)

    def test_non_integer_raises(self):
        with pytest.raises(TypeError):
            SecretInput(1.5, 4)
        with pytest.raises(TypeError):
            SecretInput(1, "4")


# ==================== GROUPING TESTS ====================


class TestGroups:
    """Test splitting secrets into two-bit groups and back."""

    def test_even_length(self):
        # x = (0, 1, 1, 0): G1 = (x1, x2) = 01, G2 = (x3, x4) = 10
        groups = to_groups(SecretInput(6, 4))
        assert [str(g) for g in groups] == ["01", "10"]

    def test_odd_length_is_padded(self):
        # 5 = 0b101 -> x = (1, 0, 1): G1 = 10, G2 = (1, pad 0) = 10
        groups = to_groups(SecretInput(5, 3))
        assert [str(g) for g in groups] == ["10", "10"]
        assert groups[-1].lo == 0

    def test_single_bit(self):
        assert to_groups(SecretInput(1, 1)).groups == (BitPair.parse("10"),)

    def test_from_groups_known_value(self):
        assert from_groups(GroupSequence([BitPair(1), BitPair(2)], 4)).value == 6

    def test_wrong_group_count_raises(self):
        with pytest.raises(ValueError):
            GroupSequence([BitPair(0)], 4)

    def test_nonzero_padding_raises(self):
        with pytest.raises(ValueError):
            GroupSequence([BitPair(0), BitPair(1)], 3)

    def test_non_pair_group_raises(self):
        with pytest.raises(TypeError):
            GroupSequence([0, 1], 4)

    def test_to_groups_requires_secret(self):
        with pytest.raises(TypeError):
            to_groups(6)

    @given(secrets())
    def test_from_groups_inverts_to_groups(self, secret):
        assert from_groups(to_groups(secret)) == secret

    @given(secrets())
    def test_group_count_is_ceiling(self, secret):
        assert len(to_groups(secret)) == group_count(secret.n_bits) == (secret.n_bits + 1) // 2

    @given(secrets())
    def test_bit_sum_counts_ones(self, secret):
        assert bit_sum(to_groups(secret)) == bin(secret.value).count("1")


# ==================== XOR AND SUM HELPERS ====================


class TestHelpers:
    """Test the sequence helpers shared by the protocol steps."""

    def test_xor_all_of_nothing_is_zero(self):
        assert xor_all() == ZERO_PAIR

    def test_xor_all(self):
        assert xor_all(BitPair(1), BitPair(2), BitPair(3)) == ZERO_PAIR

    def test_xor_sequences(self):
        a = (BitPair(1), BitPair(3))
        b = (BitPair(1), BitPair(1))
        assert xor_sequences(a, b) == (BitPair(0), BitPair(2))

    def test_xor_sequences_length_mismatch_raises(self):
        with pytest.raises(ValueError):
            xor_sequences((BitPair(0),), (BitPair(0), BitPair(1)))

    def test_bit_sum(self):
        assert bit_sum(parse_pairs("11,01")) == 3
        assert bit_sum([]) == 0

    def test_parse_pairs(self):
        assert parse_pairs("11, 01") == (BitPair(3), BitPair(1))

    def test_bell_code_bits(self):
        assert bell_code_bits(BellCode.PHI_PLUS) == BitPair.parse("00")
        assert bell_code_bits(BellCode.PSI_PLUS) == BitPair.parse("01")
        assert bell_code_bits(BellCode.PSI_MINUS) == BitPair.parse("10")
        assert bell_code_bits(BellCode.PHI_MINUS) == BitPair.parse("11")

    def test_bell_code_bits_requires_code(self):
        with pytest.raises(TypeError):
            bell_code_bits(0)

    @given(st.lists(pairs, min_size=1, max_size=8), st.lists(pairs, min_size=1, max_size=8))
    def test_xor_sequences_is_an_involution(self, a, b):
        n = min(len(a), len(b))
        a, b = a[:n], b[:n]
        assert xor_sequences(xor_sequences(a, b), b) == tuple(a)
