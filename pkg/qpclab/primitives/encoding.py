from __future__ import annotations

from dataclasses import dataclass
from math import ceil
from typing import TYPE_CHECKING, Iterable, Iterator, Sequence

if TYPE_CHECKING:
    from qpclab.primitives.quantum import BellCode


@dataclass(frozen=True, order=True)
class BitPair:
    """
    A two-bit classical word.

    Every two-bit quantity in the comparison protocol is a BitPair: the
    groups of a secret, the key elements, the measurement codes and the
    announced values. The pair is stored as an integer in {0, 1, 2, 3}
    whose high bit is written first, so BitPair(1) renders as '01'.

    Parameters
    ----------
    value : int
        The pair as an integer between 0 and 3.

    Raises
    ------
    TypeError
        If value is not an integer.
    ValueError
        If value is outside {0, 1, 2, 3}.

    Examples
    --------
    >>> BitPair(1) ^ BitPair(2)
    BitPair('11')
    >>> BitPair.from_bits(1, 0).value
    2
    """

    value: int

    def __post_init__(self) -> None:
        if isinstance(self.value, bool) or not isinstance(self.value, int):
            raise TypeError(
                f"BitPair value must be an integer. Got {type(self.value).__name__}."
            )

        if not 0 <= self.value <= 3:
            raise ValueError(
                f"BitPair value must be between 0 and 3. Got {self.value}. "
                f"A pair holds exactly two bits."
            )

    @classmethod
    def from_bits(cls, hi: int, lo: int) -> BitPair:
        """
        Build a pair from its two bits.

        Parameters
        ----------
        hi : int
            The first (high) bit, 0 or 1.
        lo : int
            The second (low) bit, 0 or 1.

        Returns
        -------
        BitPair
            The pair ``hi lo``.

        Raises
        ------
        ValueError
            If either bit is not 0 or 1.
        """
        if hi not in (0, 1) or lo not in (0, 1):
            raise ValueError(f"Bits must be 0 or 1. Got hi={hi}, lo={lo}.")

        return cls((hi << 1) | lo)

    @classmethod
    def parse(cls, text: str) -> BitPair:
        """
        Build a pair from its two-character rendering, such as '01'.

        Raises
        ------
        ValueError
            If text is not two characters from {'0', '1'}.
        """
        if len(text) != 2 or any(ch not in "01" for ch in text):
            raise ValueError(f"Expected two binary digits such as '01'. Got {text!r}.")

        return cls(int(text, 2))

    @property
    def hi(self) -> int:
        """The first (high) bit."""
        return self.value >> 1

    @property
    def lo(self) -> int:
        """The second (low) bit."""
        return self.value & 1

    @property
    def weight(self) -> int:
        """Number of 1-bits in the pair."""
        return self.hi + self.lo

    def __xor__(self, other: BitPair) -> BitPair:
        """
        Bitwise XOR of two pairs.

        Returns NotImplemented for anything but a BitPair.

        Examples
        --------
        >>> BitPair.parse("11") ^ BitPair.parse("01")
        BitPair('10')
        """
        if not isinstance(other, BitPair):
            return NotImplemented

        return BitPair(self.value ^ other.value)

    def __str__(self) -> str:
        return f"{self.hi}{self.lo}"

    def __repr__(self) -> str:
        return f"BitPair('{self}')"


ZERO_PAIR = BitPair(0)
ALL_PAIRS: tuple[BitPair, ...] = tuple(BitPair(v) for v in range(4))


class SecretInput:
    """
    A participant's secret: a non-negative integer of a declared bit length.

    The bits are numbered as in the comparison protocol: the secret equals
    the sum of x_j * 2**(j - 1) for j = 1..N, so x_1 is the least
    significant bit.

    Parameters
    ----------
    value : int
        The secret X. Must satisfy 0 <= value < 2**n_bits.
    n_bits : int
        The bit length N. Must be at least 1.

    Raises
    ------
    TypeError
        If value or n_bits is not an integer.
    ValueError
        If n_bits < 1 or value is out of range for n_bits.

    Examples
    --------
    >>> s = SecretInput(6, 4)
    >>> s.bits
    (0, 1, 1, 0)
    >>> s.group_count
    2
    """

    def __init__(self, value: int, n_bits: int) -> None:
        for name, item in (("value", value), ("n_bits", n_bits)):
            if isinstance(item, bool) or not isinstance(item, int):
                raise TypeError(
                    f"SecretInput {name} must be an integer. Got {type(item).__name__}."
                )

        if n_bits < 1:
            raise ValueError(
                f"Bit length must be at least 1. Got {n_bits}. "
                f"An empty comparison is meaningless."
            )

        if not 0 <= value < 2**n_bits:
            raise ValueError(
                f"Secret {value} does not fit in {n_bits} bits "
                f"(valid range is 0..{2**n_bits - 1})."
            )

        self.value = value
        self.n_bits = n_bits

    @property
    def bits(self) -> tuple[int, ...]:
        """The bits (x_1, ..., x_N), least significant first."""
        return tuple((self.value >> j) & 1 for j in range(self.n_bits))

    @property
    def group_count(self) -> int:
        """The number of two-bit groups, ceil(N / 2)."""
        return group_count(self.n_bits)

    def __eq__(self, other: object) -> bool:
        """Equal when both the value and the declared bit length agree."""
        if not isinstance(other, SecretInput):
            return NotImplemented

        return self.value == other.value and self.n_bits == other.n_bits

    def __hash__(self) -> int:
        return hash((self.value, self.n_bits))

    def __str__(self) -> str:
        return f"{self.value} ({self.n_bits} bits)"

    def __repr__(self) -> str:
        return f"SecretInput(value={self.value}, n_bits={self.n_bits})"


class GroupSequence:
    """
    The two-bit groups G^1 ... G^ceil(N/2) of a secret.

    Group i holds the bits (x_{2i-1}, x_{2i}) with x_{2i-1} as the high bit.
    When N is odd, the last group's low bit is the padding 0.

    Parameters
    ----------
    groups : Iterable[BitPair]
        The groups in order.
    n_bits : int
        The bit length N of the secret they encode.

    Raises
    ------
    TypeError
        If a group is not a BitPair.
    ValueError
        If the number of groups is not ceil(N / 2), or if the padding bit
        of an odd-length sequence is not 0.
    """

    def __init__(self, groups: Iterable[BitPair], n_bits: int) -> None:
        groups = tuple(groups)
        if not all(isinstance(g, BitPair) for g in groups):
            raise TypeError("GroupSequence can only hold BitPair groups")

        if isinstance(n_bits, bool) or not isinstance(n_bits, int) or n_bits < 1:
            raise ValueError(f"Bit length must be a positive integer. Got {n_bits!r}.")

        expected = group_count(n_bits)
        if len(groups) != expected:
            raise ValueError(
                f"A {n_bits}-bit secret has {expected} groups. Got {len(groups)}."
            )

        if n_bits % 2 == 1 and groups[-1].lo != 0:
            raise ValueError(
                f"The last group of an odd-length ({n_bits}-bit) secret must end "
                f"with the padding bit 0. Got {groups[-1]}."
            )

        self.groups = groups
        self.n_bits = n_bits

    def __getitem__(self, index: int) -> BitPair:
        """The group at `index`, counted from the least significant bits."""
        return self.groups[index]

    def __len__(self) -> int:
        return len(self.groups)

    def __iter__(self) -> Iterator[BitPair]:
        return iter(self.groups)

    def __eq__(self, other: object) -> bool:
        """
        Equal when the groups and the bit length agree.

        Two sequences with the same groups but different N are distinct,
        since an odd N pads its last group.
        """
        if not isinstance(other, GroupSequence):
            return NotImplemented

        return self.groups == other.groups and self.n_bits == other.n_bits

    def __hash__(self) -> int:
        return hash((self.groups, self.n_bits))

    def __str__(self) -> str:
        return "[" + ", ".join(str(g) for g in self.groups) + "]"

    def __repr__(self) -> str:
        return f"GroupSequence({self}, n_bits={self.n_bits})"


def group_count(n_bits: int) -> int:
    """Number of two-bit groups needed for an n_bits secret."""
    return ceil(n_bits / 2)


def to_groups(secret: SecretInput) -> GroupSequence:
    """
    Split a secret into its two-bit groups.

    Group i holds (x_{2i-1}, x_{2i}) with x_{2i-1} as the high bit. An odd
    bit length is padded with a trailing 0 in the last group.

    Parameters
    ----------
    secret : SecretInput
        The secret to split.

    Returns
    -------
    GroupSequence
        The ceil(N / 2) groups of the secret.

    Raises
    ------
    TypeError
        If secret is not a SecretInput.

    Examples
    --------
    >>> print(to_groups(SecretInput(6, 4)))
    [01, 10]
    >>> print(to_groups(SecretInput(5, 3)))
    [10, 10]
    """
    if not isinstance(secret, SecretInput):
        raise TypeError(f"Expected a SecretInput. Got {type(secret).__name__}.")

    bits = secret.bits + (0,)
    groups = [
        BitPair.from_bits(bits[2 * i], bits[2 * i + 1])
        for i in range(secret.group_count)
    ]
    return GroupSequence(groups, secret.n_bits)


def from_groups(groups: GroupSequence) -> SecretInput:
    """
    Reassemble a secret from its two-bit groups.

    This is the inverse of to_groups: from_groups(to_groups(s)) == s.

    Examples
    --------
    >>> from_groups(GroupSequence([BitPair(1), BitPair(2)], 4)).value
    6
    """
    value = 0
    for i, group in enumerate(groups):
        value |= group.hi << (2 * i)
        value |= group.lo << (2 * i + 1)

    return SecretInput(value, groups.n_bits)


def xor(a: BitPair, b: BitPair) -> BitPair:
    """
    Bitwise exclusive-or of two pairs.

    Examples
    --------
    >>> xor(BitPair.parse("01"), BitPair.parse("10"))
    BitPair('11')
    """
    return a ^ b


def xor_all(*pairs: BitPair) -> BitPair:
    """Exclusive-or of any number of pairs (00 for none)."""
    result = ZERO_PAIR
    for pair in pairs:
        result = result ^ pair

    return result


def xor_sequences(a: Sequence[BitPair], b: Sequence[BitPair]) -> tuple[BitPair, ...]:
    """
    Element-wise exclusive-or of two equal-length pair sequences.

    Raises
    ------
    ValueError
        If the sequences differ in length.
    """
    if len(a) != len(b):
        raise ValueError(
            f"Sequences must have equal length. Got {len(a)} and {len(b)}."
        )

    return tuple(x ^ y for x, y in zip(a, b))


def bell_code_bits(code: BellCode) -> BitPair:
    """
    The two-bit code agreed for a Bell state.

    phi+ -> 00, psi+ -> 01, psi- -> 10, phi- -> 11.

    Raises
    ------
    TypeError
        If code is not a BellCode.
    """
    from qpclab.primitives.quantum import BellCode

    if not isinstance(code, BellCode):
        raise TypeError(f"Expected a BellCode. Got {type(code).__name__}.")

    return BitPair(code.value)


def bit_sum(groups: Iterable[BitPair]) -> int:
    """
    Total number of 1-bits across a sequence of pairs.

    Examples
    --------
    >>> bit_sum([BitPair.parse("11"), BitPair.parse("01")])
    3
    """
    return sum(group.weight for group in groups)


def parse_pairs(text: str) -> tuple[BitPair, ...]:
    """Parse a comma separated list of pairs such as '11,01'."""
    return tuple(BitPair.parse(part.strip()) for part in text.split(",") if part.strip())
