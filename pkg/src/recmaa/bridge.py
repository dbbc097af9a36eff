"""Bridge between native 32-bit values and their constructor-term form.

Blocks are synthesized directly as ``buildBlock (buildOctet (...bits...), ...)``
rather than through the named hexadecimal constants: only a couple of hundred
constants exist in the corpus, while differential testing needs arbitrary
values on both sides of the comparison.
"""

from __future__ import annotations

from typing import Sequence

from .terms import App, Spec, Term


def bit_term(spec: Spec, bit: int) -> Term:
    return App(spec.symbol("x1" if bit else "x0"), ())


def octet_term(spec: Spec, value: int) -> Term:
    if not 0 <= value <= 0xFF:
        raise ValueError(f"octet out of range: {value}")
    bits = [bit_term(spec, (value >> (7 - i)) & 1) for i in range(8)]
    return App(spec.symbol("buildOctet"), bits)


def block_term(spec: Spec, value: int) -> Term:
    if not 0 <= value <= 0xFFFFFFFF:
        raise ValueError(f"block out of range: {value}")
    octets = [octet_term(spec, (value >> shift) & 0xFF) for shift in (24, 16, 8, 0)]
    return App(spec.symbol("buildBlock"), octets)


def key_term(spec: Spec, j: int, k: int) -> Term:
    return App(spec.symbol("buildKey"), [block_term(spec, j), block_term(spec, k)])


def message_term(spec: Spec, blocks: Sequence[int]) -> Term:
    """Non-empty block sequence as a cons chain ending in a unit message."""
    if not blocks:
        raise ValueError("message must contain at least one block")
    unit = spec.symbol("unitMessage")
    cons = spec.symbol("consMessage")
    term = App(unit, [block_term(spec, blocks[-1])])
    for value in reversed(blocks[:-1]):
        term = App(cons, [block_term(spec, value), term])
    return term


def mac_call_term(spec: Spec, j: int, k: int, blocks: Sequence[int]) -> Term:
    return App(spec.symbol("MAC"), [key_term(spec, j, k), message_term(spec, blocks)])


def maa_call_term(spec: Spec, j: int, k: int, blocks: Sequence[int]) -> Term:
    return App(spec.symbol("MAA"), [key_term(spec, j, k), message_term(spec, blocks)])


def bit_of_term(term: Term) -> int:
    if isinstance(term, App) and not term.args:
        if term.symbol.name == "x0":
            return 0
        if term.symbol.name == "x1":
            return 1
    raise ValueError(f"not a bit normal form: {term}")


def octet_of_term(term: Term) -> int:
    if not (isinstance(term, App) and term.symbol.name == "buildOctet"):
        raise ValueError(f"not an octet normal form: {term}")
    value = 0
    for arg in term.args:
        value = (value << 1) | bit_of_term(arg)
    return value


def block_of_term(term: Term) -> int:
    """Decode a ``buildBlock`` constructor normal form back to an int."""
    if not (isinstance(term, App) and term.symbol.name == "buildBlock"):
        raise ValueError(f"not a block normal form: {term}")
    value = 0
    for arg in term.args:
        value = (value << 8) | octet_of_term(arg)
    return value
