"""Known-answer and arithmetic-oracle suites.

``run_all`` executes, in order: the native known-answer suite (multiplication
tables, PAT/BYT conditioning including the corrected table rows, key
expansion, per-step main-loop traces, final MACs), the exhaustive 8-bit
adder and multiplier validation of the corpus circuits against wide-integer
arithmetic, the modular-congruence suites, and a mac-versus-maa consistency
sweep.  Well over 30,000 individual checks run in total.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from typing import Callable, Optional

from . import maaref
from .bridge import bit_term, octet_term
from .corpus import corpus_spec
from .engine import Budget, Engine, Status
from .terms import App

MASK32 = maaref.MASK32


@dataclass
class SuiteResult:
    name: str
    checks: int
    failures: list[str]
    millis: float

    @property
    def ok(self) -> bool:
        return not self.failures


# --- native known answers ----------------------------------------------------

# (function, inputs, expected) rows; everything is exact 32-bit equality.
_MUL_TABLE = [
    ("mul1", (0x0000000F, 0x0000000E), 0x000000D2),
    ("mul1", (0xFFFFFFF0, 0x0000000E), 0xFFFFFF2D),
    ("mul1", (0xFFFFFFF0, 0xFFFFFFF1), 0x000000D2),
    ("mul2", (0x0000000F, 0x0000000E), 0x000000D2),
    ("mul2", (0xFFFFFFF0, 0x0000000E), 0xFFFFFF3A),
    ("mul2", (0xFFFFFFF0, 0xFFFFFFF1), 0x000000B6),
    ("mul2a", (0x0000000F, 0x0000000E), 0x000000D2),
    ("mul2a", (0xFFFFFFF0, 0x0000000E), 0xFFFFFF3A),
    ("mul2a", (0x7FFFFFF0, 0xFFFFFFF1), 0x800000C2),
    ("mul2a", (0xFFFFFFF0, 0x7FFFFFF1), 0x000000C4),
]

_PAT_TABLE = [
    ((0x00000000, 0x00000000), 0xFF),
    ((0xFFFF00FF, 0xFFFFFFFF), 0xFF),
    ((0xAB00FFCD, 0xFFEF0001), 0x6A),
    # Corrected rows: PAT applies to the H-value pairs ...
    ((0x00000003, 0x00000060), 0xEE),
    ((0x00030000, 0x00060000), 0xBB),
    ((0x00000005, 0x80000002), 0xE6),
    # ... and gives 0x00 on the conditioned output pairs.
    ((0x01030703, 0x1D3B7760), 0x00),
    ((0x0103050B, 0x17065DBB), 0x00),
    ((0x01030705, 0x80397302), 0x00),
]

_BYT_TABLE = [
    ((0x00000000, 0x00000000), (0x0103070F, 0x1F3F7FFF)),
    ((0xFFFF00FF, 0xFFFFFFFF), (0xFEFC07F0, 0xE0C08000)),
    ((0xAB00FFCD, 0xFFEF0001), (0xAB01FCCD, 0xF2EF3501)),
    ((0x00000003, 0x00000060), (0x01030703, 0x1D3B7760)),
    ((0x00030000, 0x00060000), (0x0103050B, 0x17065DBB)),
    ((0x00000005, 0x80000002), (0x01030705, 0x80397302)),
]

# Single-block elementary steps from the worked banking-standard example.
_MISC_TABLE = [
    ("cyc", (0x00000003,), 0x00000006),
    ("cyc", (0xC4EB1AEB,), 0x89D635D7),
    ("cyc", (0x00000000,), 0x00000000),
    ("fix1", (0xFD297DA4,), 0xBF2D7D85),
    ("fix2", (0xAB6EED4A,), 0x29EEE96B),
    ("fix1", (0x00000000,), 0x02040801),
    ("mul1", (0x2BF8499A, 0xBF2D7D85), 0x0AD67E20),
    ("mul2a", (0x7DB2D9F4, 0x29EEE96B), 0x30261492),
    ("mul1", (0x00000007, 0x00000007), 0x00000031),
    ("mul2a", (0x00000006, 0x00000009), 0x00000036),
    ("mul1", (0xFFFFFFFC, 0x00000001), 0xFFFFFFFC),
    ("mul2a", (0xFFFFFFFD, 0x00000004), 0xFFFFFFFA),
    ("mul1", (0xFFFFFFF5, 0xFFFFFFFC), 0x0000001E),
    ("mul2a", (0xFFFFFFF4, 0x7FFFFFFC), 0x0000001E),
    ("mul1", (0x00000001, 0x00000003), 0x00000003),
    ("mul2a", (0x00000002, 0x00000001), 0x00000002),
    ("mul1", (0x00000002, 0x0000000A), 0x00000014),
    ("mul2a", (0x00000003, 0x00000003), 0x00000009),
    ("mul1", (0x00000016, 0x00000012), 0x0000018C),
    ("mul2a", (0x0000000B, 0x0000001B), 0x00000129),
]

# Key-expansion powers for the standalone table inputs 0x00000100 / 0x00000080.
def _key_power_checks() -> list[tuple[str, int, int]]:
    mul1, mul2 = maaref.mul1, maaref.mul2
    w = 0x00000100
    j1_2 = mul1(w, w); j1_4 = mul1(j1_2, j1_2)
    j1_6 = mul1(j1_2, j1_4); j1_8 = mul1(j1_2, j1_6)
    j2_2 = mul2(w, w); j2_4 = mul2(j2_2, j2_2)
    j2_6 = mul2(j2_2, j2_4); j2_8 = mul2(j2_2, j2_6)
    v = 0x00000080
    k1_2 = mul1(v, v); k1_4 = mul1(k1_2, k1_2); k1_5 = mul1(v, k1_4)
    k1_7 = mul1(k1_2, k1_5); k1_9 = mul1(k1_2, k1_7)
    k2_2 = mul2(v, v); k2_4 = mul2(k2_2, k2_2); k2_5 = mul2(v, k2_4)
    k2_7 = mul2(k2_2, k2_5); k2_9 = mul2(k2_2, k2_7)
    rows = [
        ("J1_2", j1_2, 0x00010000), ("J1_4", j1_4, 0x00000001),
        ("J1_6", j1_6, 0x00010000), ("J1_8", j1_8, 0x00000001),
        ("J2_2", j2_2, 0x00010000), ("J2_4", j2_4, 0x00000002),
        ("J2_6", j2_6, 0x00020000), ("J2_8", j2_8, 0x00000004),
        ("H4", j1_4 ^ j2_4, 0x00000003),
        ("H6", j1_6 ^ j2_6, 0x00030000),
        ("H8", j1_8 ^ j2_8, 0x00000005),
        ("K1_2", k1_2, 0x00004000), ("K1_4", k1_4, 0x10000000),
        ("K1_5", k1_5, 0x00000008), ("K1_7", k1_7, 0x00020000),
        ("K1_9", k1_9, 0x80000000),
        ("K2_2", k2_2, 0x00004000), ("K2_4", k2_4, 0x10000000),
        ("K2_5", k2_5, 0x00000010), ("K2_7", k2_7, 0x00040000),
        ("K2_9", k2_9, 0x00000002),
        ("H0", k1_5 ^ k2_5, 0x00000018),
        ("Q", maaref.q(0x01), 0x00000004),
        ("H5", mul2(k1_5 ^ k2_5, maaref.q(0x01)), 0x00000060),
        ("H7", k1_7 ^ k2_7, 0x00060000),
        ("H9", k1_9 ^ k2_9, 0x80000002),
    ]
    return rows


_PRELUDES = [
    ((0x00FF00FF, 0x00000000),
     (0x4A645A01, 0x50DEC930, 0x5CCA3239, 0xFECCAA6E, 0x51EDE9C7, 0x24B66FB5)),
    ((0x55555555, 0x5A35D667),
     (0x34ACF886, 0x7397C9AE, 0x7201F4DC, 0x2829040B, 0x9E2E7B36, 0x13647149)),
    ((0xE6A12F07, 0x9D15C437),
     (0x21D869BA, 0x7792F9D4, 0xC4EB1AEB, 0xF6A09667, 0x6D67E884, 0xA511987A)),
    ((0x80018001, 0x80018000),
     (0x204E80A7, 0x077788A2, 0x17A808FD, 0xFEA1D334, 0x76232E5F, 0x4FB1138A)),
]

# Two-block signatures (the four trace columns of the standard's table 5).
_MAA_TABLE = [
    ((0x00FF00FF, 0x00000000), [0x55555555, 0xAAAAAAAA], 0xF14D6E28),
    ((0x00FF00FF, 0x00000000), [0xAAAAAAAA, 0x55555555], 0xA93BD410),
    ((0x55555555, 0x5A35D667), [0x00000000, 0xFFFFFFFF], 0xB99A62DE),
    ((0x55555555, 0x5A35D667), [0xFFFFFFFF, 0x00000000], 0xA018C83B),
]

# Per-step (X, Y) values for those four traces, including the two coda steps.
_MAA_STEP_PAIRS = [
    ((0x00FF00FF, 0x00000000), [0x55555555, 0xAAAAAAAA],
     [(0x48B204D6, 0x5834A585), (0x4F998E01, 0xBE9F0917),
      (0x344925FC, 0xDB9102B0), (0x277B4B25, 0xD636250D)]),
    ((0x00FF00FF, 0x00000000), [0xAAAAAAAA, 0x55555555],
     [(0x6AEBACF8, 0x9DB15CF6), (0x270EEDAF, 0xB8142629),
      (0x29907CD8, 0xBA92DB12), (0x28EAD8B3, 0x81D10CA3)]),
    ((0x55555555, 0x5A35D667), [0x00000000, 0xFFFFFFFF],
     [(0x2FD76FFB, 0x550D91CE), (0xA70FC148, 0x1D10D8D3),
      (0xB1CC1CC5, 0x29C1485F), (0x288FC786, 0x9115A558)]),
    ((0x55555555, 0x5A35D667), [0xFFFFFFFF, 0x00000000],
     [(0x8DC8BBDE, 0xFE4E5BDD), (0xCBC865BA, 0x0297AF6F),
      (0x3CF3A7D2, 0x160EE9B5), (0xD0482465, 0x7050EC5E)]),
]

# 20 zero blocks, then the S and T coda steps, for the key 80018001 80018000.
_WALK_PAIRS = [
    (0x303FF4AA, 0x1277A6D4), (0x55DD063F, 0x4C49AAE0),
    (0x51AF3C1D, 0x5BC02502), (0xA44AAAC0, 0x63C70DBA),
    (0x4D53901A, 0x2E80AC30), (0x5F38EEF1, 0x2A6091AE),
    (0xF0239DD5, 0x3DD81AC6), (0xEB35B97F, 0x9372CDC6),
    (0x4DA124A1, 0xC6B1317E), (0x7F839576, 0x74B39176),
    (0x11A9D254, 0xD78634BC), (0xD8804CA5, 0xFDC1A8BA),
    (0x3F6F7248, 0x11AC46B8), (0xACBC13DD, 0x33D5A466),
    (0x4CE933E1, 0xC21A1846), (0xC1ED90DD, 0xCD959B46),
    (0x3CD54DEB, 0x613F8E2A), (0xBBA57835, 0x07C72EAA),
    (0xD7843FDC, 0x6AD6E8A4), (0x5EBA06C2, 0x91896CFA),
    (0x1D9C9655, 0x98D1CC75), (0x7BC180AB, 0xA0B87B77),
]

_MAC_TABLE = [
    ((0x80018001, 0x80018000), (20, 0x00000000, 0x00000000), 0xDB79FBDC),
    ((0x80018001, 0x80018000), (16, 0x00000000, 0x07050301), 0x8CE37709),
    ((0x80018001, 0x80018000), (256, 0x00000000, 0x07050301), 0x717153D5),
    ((0x80018001, 0x80018000), (4100, 0x00000000, 0x07050301), 0x7783C51D),
]

# The three published main-loop single-step examples.
_STEP_TABLE = [
    ((0x4A645A01, 0x50DEC930, 0x5CCA3239), 0xFECCAA6E, 0x55555555,
     (0x48B204D6, 0x5834A585)),
    ((0x34ACF886, 0x7397C9AE, 0x7201F4DC), 0x2829040B, 0x00000000,
     (0x2FD76FFB, 0x550D91CE)),
    ((0x204E80A7, 0x077788A2, 0x17A808FD), 0xFEA1D334, 0x00000000,
     (0x303FF4AA, 0x1277A6D4)),
]


def known_answer_suite() -> SuiteResult:
    t0 = time.perf_counter()
    checks = 0
    failures: list[str] = []

    def expect(label: str, got, want) -> None:
        nonlocal checks
        checks += 1
        if got != want:
            failures.append(f"{label}: got {got!r}, want {want!r}")

    for fn, args, want in _MUL_TABLE + _MISC_TABLE:
        expect(f"{fn}{tuple(hex(a) for a in args)}",
               getattr(maaref, fn)(*args), want)
    for (a, b), want in _PAT_TABLE:
        expect(f"pat({a:#010x}, {b:#010x})", maaref.pat(a, b), want)
    for (a, b), want in _BYT_TABLE:
        expect(f"byt({a:#010x}, {b:#010x})", maaref.byt(a, b), want)
    for label, got, want in _key_power_checks():
        expect(label, got, want)
    for key, want in _PRELUDES:
        expect(f"prelude({key[0]:#010x}, {key[1]:#010x})",
               tuple(maaref.prelude(key)), want)
    for (key, msg, want) in _MAA_TABLE:
        expect(f"maa(key={key[0]:#010x}..., {len(msg)} blocks)",
               maaref.maa(key, msg), want)
    for key, msg, pairs in _MAA_STEP_PAIRS:
        pre = maaref.prelude(key)
        state = maaref.LoopState(pre.x0, pre.y0, pre.v0)
        for i, (block, want) in enumerate(zip(msg + [pre.s, pre.t], pairs)):
            state = maaref.main_loop_step(state, pre.w, block)
            expect(f"trace key={key[0]:#010x} step {i + 1}",
                   (state.x, state.y), want)
    pre = maaref.prelude((0x80018001, 0x80018000))
    state = maaref.LoopState(pre.x0, pre.y0, pre.v0)
    walk = [0x00000000] * 20 + [pre.s, pre.t]
    for i, (block, want) in enumerate(zip(walk, _WALK_PAIRS)):
        state = maaref.main_loop_step(state, pre.w, block)
        expect(f"walk step {i + 1}", (state.x, state.y), want)
    for (st0, w, m, want) in _STEP_TABLE:
        got = maaref.main_loop_step(maaref.LoopState(*st0), w, m)
        expect(f"main_loop_step({st0[0]:#010x}...)", (got.x, got.y), want)
    for key, (count, first, step), want in _MAC_TABLE:
        msg = maaref.make_message(count, first, step)
        expect(f"mac({count} blocks)", maaref.mac(key, msg), want)
    return SuiteResult(
        "known-answers", checks, failures, (time.perf_counter() - t0) * 1000
    )


# --- exhaustive circuit validation (engine side) ------------------------------

def adder_exhaustive_suite(engine: Engine, budget: Optional[Budget] = None) -> SuiteResult:
    """All 2 * 65536 octet additions through the corpus ripple-carry adder."""
    t0 = time.perf_counter()
    spec = engine.spec
    add = spec.symbol("addOctetSum")
    eq = spec.symbol("eqOctetSum")
    build = spec.symbol("buildOctetSum")
    octets = [octet_term(spec, v) for v in range(256)]
    bits = [bit_term(spec, 0), bit_term(spec, 1)]
    failures: list[str] = []
    checks = 0
    for a in range(256):
        for b in range(256):
            for cin in (0, 1):
                total = a + b + cin
                expected = App(
                    build, [bits[total >> 8], octets[total & 0xFF]]
                )
                term = App(
                    eq, [App(add, [octets[a], octets[b], bits[cin]]), expected]
                )
                checks += 1
                if engine.eval_bool(term, budget) is not Status.PASS:
                    failures.append(f"addOctetSum({a:#04x}, {b:#04x}, {cin})")
    return SuiteResult(
        "adder-exhaustive", checks, failures, (time.perf_counter() - t0) * 1000
    )


def multiplier_exhaustive_suite(
    engine: Engine, budget: Optional[Budget] = None
) -> SuiteResult:
    """All 65536 octet products through the corpus shift-and-add multiplier."""
    t0 = time.perf_counter()
    spec = engine.spec
    mul = spec.symbol("mulOctet")
    eq = spec.symbol("eqHalf")
    build = spec.symbol("buildHalf")
    octets = [octet_term(spec, v) for v in range(256)]
    failures: list[str] = []
    checks = 0
    for a in range(256):
        for b in range(256):
            product = a * b
            expected = App(build, [octets[product >> 8], octets[product & 0xFF]])
            term = App(eq, [App(mul, [octets[a], octets[b]]), expected])
            checks += 1
            if engine.eval_bool(term, budget) is not Status.PASS:
                failures.append(f"mulOctet({a:#04x}, {b:#04x})")
    return SuiteResult(
        "multiplier-exhaustive", checks, failures, (time.perf_counter() - t0) * 1000
    )


# --- randomized congruence and consistency suites ------------------------------

def congruence_suite(name: str, seed: int = 1, count: int = 100_000) -> SuiteResult:
    """mul1 against mod 2^32-1, mul2 against mod 2^32-2, on random pairs."""
    t0 = time.perf_counter()
    rng = random.Random(seed)
    failures: list[str] = []
    fn = maaref.mul1 if name == "mul1" else maaref.mul2
    modulus = (1 << 32) - 1 if name == "mul1" else (1 << 32) - 2
    for _ in range(count):
        a = rng.getrandbits(32)
        b = rng.getrandbits(32)
        if fn(a, b) % modulus != (a * b) % modulus:
            failures.append(f"{name}({a:#010x}, {b:#010x})")
    return SuiteResult(
        f"congruence-{name}", count, failures, (time.perf_counter() - t0) * 1000
    )


def mul2a_agreement_suite(seed: int = 2, count: int = 50_000) -> SuiteResult:
    """mul2a matches mul2 (and the mod 2^32-2 congruence) while the product's
    high word stays below 2^31.

    The two functions differ exactly in the carry of the high-word doubling,
    so any input with a*b >= 2^63 separates them; the all-ones square is the
    simplest such witness (mul2a 0xFFFFFFFD, mul2 0xFFFFFFFF).  The published
    table rows for MUL2A all sit below that threshold and cannot separate
    the functions on their own.
    """
    t0 = time.perf_counter()
    rng = random.Random(seed)
    failures: list[str] = []
    checks = 0
    modulus = (1 << 32) - 2
    done = 0
    while done < count:
        a = rng.getrandbits(32)
        b = rng.getrandbits(32)
        if (a * b) >> 32 >= 1 << 31:
            continue
        done += 1
        checks += 1
        m2a = maaref.mul2a(a, b)
        if m2a != maaref.mul2(a, b) or m2a % modulus != (a * b) % modulus:
            failures.append(f"mul2a({a:#010x}, {b:#010x})")
    for a, b, want_2a, want_2 in [(0xFFFFFFFF, 0xFFFFFFFF, 0xFFFFFFFD, 0xFFFFFFFF)]:
        checks += 1
        if maaref.mul2a(a, b) != want_2a or maaref.mul2(a, b) != want_2:
            failures.append(f"distinguishing case mul2a/mul2({a:#010x}, {b:#010x})")
    return SuiteResult(
        "mul2a-agreement", checks, failures, (time.perf_counter() - t0) * 1000
    )


def mac_vs_maa_suite(seed: int = 3, count: int = 50) -> SuiteResult:
    """mac equals maa on messages short enough to fit one segment."""
    t0 = time.perf_counter()
    rng = random.Random(seed)
    failures: list[str] = []
    for _ in range(count):
        key = (rng.getrandbits(32), rng.getrandbits(32))
        msg = [rng.getrandbits(32) for _ in range(rng.randint(1, 256))]
        if maaref.mac(key, msg) != maaref.maa(key, msg):
            failures.append(f"key={key[0]:#010x}{key[1]:08x} len={len(msg)}")
    return SuiteResult(
        "mac-vs-maa", count, failures, (time.perf_counter() - t0) * 1000
    )


def run_all(
    backend: Optional[str] = None,
    progress: Optional[Callable[[SuiteResult], None]] = None,
) -> list[SuiteResult]:
    """Run every suite; the circuit suites share one warmed-up engine."""
    results = [known_answer_suite()]
    if progress:
        progress(results[-1])
    engine = Engine(corpus_spec(), backend=backend)
    for suite in (adder_exhaustive_suite, multiplier_exhaustive_suite):
        results.append(suite(engine))
        if progress:
            progress(results[-1])
    for fn in (
        lambda: congruence_suite("mul1"),
        lambda: congruence_suite("mul2"),
        mul2a_agreement_suite,
        mac_vs_maa_suite,
    ):
        results.append(fn())
        if progress:
            progress(results[-1])
    return results
