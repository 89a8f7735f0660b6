from __future__ import annotations

from typing import Sequence

from qpclab.primitives.encoding import BitPair, bit_sum, xor_all, xor_sequences
from qpclab.primitives.factories import build_upsilon
from qpclab.protocol.channel import ParticleRef, ParticleStore
from qpclab.protocol.results import Verdict

Refs = tuple[ParticleRef, ...]


def tp_prepare(count: int) -> tuple[ParticleStore, Refs, Refs, Refs]:
    """
    Prepare the carrier copies and split them into three sequences.

    TP prepares count copies of the six-qubit carrier state. S_A takes
    qubits (0, 1) of every copy, S_B qubits (2, 3) and S_C qubits (4, 5),
    copy by copy in order.

    Parameters
    ----------
    count : int
        Number of copies, ceil(N / 2). Must be at least 1.

    Returns
    -------
    tuple
        (store, s_a, s_b, s_c), where store holds the copies.

    Raises
    ------
    ValueError
        If count < 1.

    Examples
    --------
    >>> store, s_a, s_b, s_c = tp_prepare(1)
    >>> [str(r) for r in s_a]
    ['p1.1', 'p1.2']
    """
    if isinstance(count, bool) or not isinstance(count, int) or count < 1:
        raise ValueError(f"TP must prepare at least one copy. Got {count!r}.")

    store = ParticleStore(build_upsilon() for _ in range(count))
    s_a, s_b, s_c = (
        tuple(ParticleRef(c, q) for c in range(count) for q in (first, first + 1))
        for first in (0, 2, 4)
    )
    return store, s_a, s_b, s_c


def participant_announce(g: BitPair, m: BitPair, k_tp: BitPair, k_peer: BitPair) -> BitPair:
    """
    A participant's announced value for one group: G xor M xor K_tp xor K_peer.

    k_tp is the key shared with TP (K_AC for Alice, K_BC for Bob) and
    k_peer the participant key added to the announcement (K_A for Alice,
    K_B for Bob).

    Examples
    --------
    >>> participant_announce(BitPair(1), BitPair(2), BitPair(3), BitPair(0))
    BitPair('00')
    """
    return xor_all(g, m, k_tp, k_peer)


def tp_combine_original(
    r_a: BitPair, r_b: BitPair, k_ac: BitPair, k_bc: BitPair, m_c: BitPair
) -> BitPair:
    """
    TP's combined value for one group in the original variant.

    R = R_A xor R_B xor K_AC xor K_BC xor M_C. On an honest run this equals
    G_A xor G_B xor K_A xor K_B, because the measurement codes of one
    carrier copy xor to 00.
    """
    return xor_all(r_a, r_b, k_ac, k_bc, m_c)


def _check_lengths(**sequences: Sequence[BitPair]) -> int:
    lengths = {name: len(seq) for name, seq in sequences.items()}
    if len(set(lengths.values())) != 1:
        raise ValueError(f"Sequences must have equal length. Got {lengths}.")

    length = next(iter(lengths.values()))
    if length == 0:
        raise ValueError("Sequences cannot be empty.")

    return length


def verdict_original(
    r_seq: Sequence[BitPair], k_a_seq: Sequence[BitPair], k_b_seq: Sequence[BitPair]
) -> tuple[tuple[BitPair, ...], Verdict]:
    """
    A participant's conclusion in the original variant.

    Removes the participant keys from TP's announcement,
    R'_i = R_i xor K_A_i xor K_B_i, and declares Equal iff every R'_i is 00.

    Returns
    -------
    tuple
        (R', verdict).

    Raises
    ------
    ValueError
        If the sequences are empty or differ in length.
    """
    _check_lengths(r=r_seq, k_a=k_a_seq, k_b=k_b_seq)
    r_prime = xor_sequences(xor_sequences(r_seq, k_a_seq), k_b_seq)
    if all(v.value == 0 for v in r_prime):
        return r_prime, Verdict.equal()

    return r_prime, Verdict.not_equal()


def tp_combine_fixed(
    r_a_seq: Sequence[BitPair],
    r_b_seq: Sequence[BitPair],
    k_ac_seq: Sequence[BitPair],
    k_bc_seq: Sequence[BitPair],
    m_c_seq: Sequence[BitPair],
) -> int:
    """
    TP's announced bit count in the fixed variant.

    Each a_i = R_A_i xor R_B_i xor K_AC_i xor K_BC_i xor M_C_i is computed
    as in the original variant, but only S = bit_sum(a) is announced.

    Raises
    ------
    ValueError
        If the sequences are empty or differ in length.

    Examples
    --------
    >>> z = [BitPair(0), BitPair(0)]
    >>> tp_combine_fixed(z, z, z, z, z)
    0
    """
    length = _check_lengths(r_a=r_a_seq, r_b=r_b_seq, k_ac=k_ac_seq, k_bc=k_bc_seq, m_c=m_c_seq)
    a = [
        tp_combine_original(r_a_seq[i], r_b_seq[i], k_ac_seq[i], k_bc_seq[i], m_c_seq[i])
        for i in range(length)
    ]
    return bit_sum(a)


def verdict_fixed(
    s: int, k_a_seq: Sequence[BitPair], k_b_seq: Sequence[BitPair]
) -> tuple[int, Verdict]:
    """
    A participant's conclusion in the fixed variant.

    S' = bit_sum(K_A xor K_B); the verdict is Equal iff S == S'.

    Returns
    -------
    tuple
        (S', verdict).

    Raises
    ------
    ValueError
        If the key sequences differ in length.
    """
    s_prime = bit_sum(xor_sequences(k_a_seq, k_b_seq))
    if s == s_prime:
        return s_prime, Verdict.equal()

    return s_prime, Verdict.not_equal()
