"""Bit-exact native reference implementation of the MAC algorithm.

Everything here works on plain Python ints masked to 32 bits.  The heavy
lifting (multiplications modulo 2^32-1 and 2^32-2, the PAT/BYT key
conditioning, prelude, main loop, coda, and the 256-block segmentation mode)
follows the published algorithm word for word and is validated against the
known-answer tables by the test suite and ``maa selftest``.

This is a reference and teaching artifact: the algorithm itself has been
withdrawn from the standards and offers no meaningful security.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple, Sequence

MASK32 = 0xFFFFFFFF

# The four conditioning constants.
A = 0x02040801
B = 0x00804021
C = 0xBFEF7FDF
D = 0x7DFEFBFF

# ISO buffer-pragmatics limit on message length, in blocks; overridable.
BLOCK_LIMIT = 1_000_000

# Mode-of-operation segment size, in blocks.
SEGMENT_BLOCKS = 256


class MaaError(ValueError):
    """Invalid input to the MAC computation."""


class MessageSizeError(MaaError):
    """Message exceeds the standard's block limit and override was not given."""


class MaaKey(NamedTuple):
    j: int
    k: int


class PreludeState(NamedTuple):
    x0: int
    y0: int
    v0: int
    w: int
    s: int
    t: int


class LoopState(NamedTuple):
    x: int
    y: int
    v: int


def cyc(w: int) -> int:
    """Circular left rotation by one bit."""
    w &= MASK32
    return ((w << 1) | (w >> 31)) & MASK32


def fix1(w: int) -> int:
    return ((w | A) & C) & MASK32


def fix2(w: int) -> int:
    return ((w | B) & D) & MASK32


def addc(a: int, b: int) -> tuple[int, int]:
    """32-bit addition returning (carry, sum mod 2^32)."""
    total = (a & MASK32) + (b & MASK32)
    return total >> 32, total & MASK32


def mul_full(a: int, b: int) -> tuple[int, int]:
    """Exact 64-bit product split into (high, low) blocks."""
    p = (a & MASK32) * (b & MASK32)
    return p >> 32, p & MASK32


def mul1(a: int, b: int) -> int:
    """Multiplication congruent to a*b modulo 2^32 - 1 (end-around carry)."""
    hi, lo = mul_full(a, b)
    carry, s = addc(hi, lo)
    return (s + carry) & MASK32


def mul2(a: int, b: int) -> int:
    """Multiplication congruent to a*b modulo 2^32 - 2 (carry counts double)."""
    hi, lo = mul_full(a, b)
    carry, dd = addc(hi, hi)
    f = (dd + 2 * carry) & MASK32
    carry2, s = addc(f, lo)
    return (s + 2 * carry2) & MASK32


def mul2a(a: int, b: int) -> int:
    """Cheaper variant of :func:`mul2`; the high-word doubling drops its carry."""
    hi, lo = mul_full(a, b)
    dd = (hi + hi) & MASK32
    carry, s = addc(dd, lo)
    return (s + 2 * carry) & MASK32


def _bytes_of(a: int, b: int) -> list[int]:
    a &= MASK32
    b &= MASK32
    return [
        (a >> 24) & 0xFF, (a >> 16) & 0xFF, (a >> 8) & 0xFF, a & 0xFF,
        (b >> 24) & 0xFF, (b >> 16) & 0xFF, (b >> 8) & 0xFF, b & 0xFF,
    ]


def pat(a: int, b: int) -> int:
    """8-bit code flagging which bytes of a||b equal 0x00 or 0xFF (MSB first)."""
    code = 0
    for byte in _bytes_of(a, b):
        code = (code << 1) | (1 if byte in (0x00, 0xFF) else 0)
    return code


def byt(a: int, b: int) -> tuple[int, int]:
    """Condition a block pair: flagged bytes are XORed with shifted PAT codes."""
    p = pat(a, b)
    out = []
    for i, byte in enumerate(_bytes_of(a, b)):
        if byte in (0x00, 0xFF):
            byte ^= (p >> (7 - i)) & 0xFF
        out.append(byte)
    a2 = (out[0] << 24) | (out[1] << 16) | (out[2] << 8) | out[3]
    b2 = (out[4] << 24) | (out[5] << 16) | (out[6] << 8) | out[7]
    return a2, b2


def q(octet: int) -> int:
    # (octet + 1) squared, computed over the 16-bit lift of the octet.
    h = (octet + 1) & 0xFFFF
    return (h * h) & MASK32


def prelude(key: MaaKey | tuple[int, int]) -> PreludeState:
    """Expand the key (J, K) into the six working blocks X0 Y0 V0 W S T."""
    j, k = key
    p = pat(j, k)
    jq, kq = byt(j, k)

    j1_2 = mul1(jq, jq)
    j1_4 = mul1(j1_2, j1_2)
    j1_6 = mul1(j1_2, j1_4)
    j1_8 = mul1(j1_2, j1_6)
    j2_2 = mul2(jq, jq)
    j2_4 = mul2(j2_2, j2_2)
    j2_6 = mul2(j2_2, j2_4)
    j2_8 = mul2(j2_2, j2_6)
    h4 = j1_4 ^ j2_4
    h6 = j1_6 ^ j2_6
    h8 = j1_8 ^ j2_8

    k1_2 = mul1(kq, kq)
    k1_4 = mul1(k1_2, k1_2)
    k1_5 = mul1(kq, k1_4)
    k1_7 = mul1(k1_2, k1_5)
    k1_9 = mul1(k1_2, k1_7)
    k2_2 = mul2(kq, kq)
    k2_4 = mul2(k2_2, k2_2)
    k2_5 = mul2(kq, k2_4)
    k2_7 = mul2(k2_2, k2_5)
    k2_9 = mul2(k2_2, k2_7)
    h0 = k1_5 ^ k2_5
    h5 = mul2(h0, q(p))
    h7 = k1_7 ^ k2_7
    h9 = k1_9 ^ k2_9

    x0, y0 = byt(h4, h5)
    v0, w = byt(h6, h7)
    s, t = byt(h8, h9)
    return PreludeState(x0, y0, v0, w, s, t)


def main_loop_step(state: LoopState, w: int, block: int) -> LoopState:
    """One iteration: rotate V, mix the message block into X and Y."""
    v = cyc(state.v)
    e = v ^ w
    xm = state.x ^ block
    ym = state.y ^ block
    x = mul1(xm, fix1((ym + e) & MASK32))
    y = mul2a(ym, fix2((xm + e) & MASK32))
    return LoopState(x, y, v)


def _check_message(msg: Sequence[int]) -> None:
    if len(msg) == 0:
        raise MaaError("message must contain at least one block")


def maa(key: MaaKey | tuple[int, int], msg: Sequence[int]) -> int:
    """Core MAC over an unsegmented message: prelude, main loop, coda."""
    _check_message(msg)
    pre = prelude(key)
    state = LoopState(pre.x0, pre.y0, pre.v0)
    for block in msg:
        state = main_loop_step(state, pre.w, block)
    state = main_loop_step(state, pre.w, pre.s)
    state = main_loop_step(state, pre.w, pre.t)
    return state.x ^ state.y


def mac(
    key: MaaKey | tuple[int, int],
    msg: Sequence[int],
    override_size_limit: bool = False,
) -> int:
    """Full MAC with the mode of operation: 256-block segments, chained.

    Each segment's result is prepended to the next segment's blocks; the MAC
    of the whole message is the result of the last segment.
    """
    _check_message(msg)
    if len(msg) > BLOCK_LIMIT and not override_size_limit:
        raise MessageSizeError(
            f"message has {len(msg)} blocks, over the {BLOCK_LIMIT}-block limit"
        )
    z = maa(key, msg[:SEGMENT_BLOCKS])
    for start in range(SEGMENT_BLOCKS, len(msg), SEGMENT_BLOCKS):
        segment = [z, *msg[start : start + SEGMENT_BLOCKS]]
        z = maa(key, segment)
    return z


def make_message(count: int, first: int, step: int) -> list[int]:
    """Arithmetic-progression message: b0 = first, b(i+1) = bi + step mod 2^32."""
    if count < 1:
        raise MaaError("message length must be at least 1 block")
    blocks = [first & MASK32]
    for _ in range(count - 1):
        blocks.append((blocks[-1] + step) & MASK32)
    return blocks


def pad_bytes_to_message(data: bytes | bytearray) -> list[int]:
    """Group bytes into big-endian blocks, padding with nulls to a multiple of 4.

    An empty input is rejected: the MAC of an empty message is undefined
    here, and no padding block is fabricated for it.
    """
    if len(data) == 0:
        raise MaaError("cannot build a message from zero bytes")
    data = bytes(data)
    if len(data) % 4:
        data += b"\x00" * (4 - len(data) % 4)
    return [int.from_bytes(data[i : i + 4], "big") for i in range(0, len(data), 4)]
