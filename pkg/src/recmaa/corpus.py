"""Access to the bundled specification corpus and validation vectors.

The corpus ships as seventeen source fragments (one per sort or function
group) that merge into a single specification with 13 sorts, 18 constructors,
644 defined symbols and 684 rules.  The vector file holds 203 Bool terms, one
per line, each expected to normalize to ``true``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib.resources import files
from pathlib import Path
from typing import Iterable, Optional

from .parser import ParseError, SourceFragment, parse_ground_term, parse_spec
from .terms import Spec, Term

ORIGINS = ("iso-table", "iso-8730", "supplementary")

_DATA = files("recmaa") / "data"

CORPUS_PART_NAMES = (
    "01_bool",
    "02_nat",
    "03_bit",
    "04_octet",
    "05_octetsum",
    "06_half",
    "07_halfsum",
    "08_block",
    "09_blocksum",
    "10_pair",
    "11_key",
    "12_message",
    "13_segmentedmessage",
    "14_maa_core_ops",
    "15_maa_mul_ops",
    "16_maa_key_ops",
    "17_maa_main",
)


def corpus_fragments() -> list[SourceFragment]:
    """The bundled fragments, in merge order."""
    out = []
    for name in CORPUS_PART_NAMES:
        res = _DATA / "corpus" / f"{name}.rec"
        out.append(SourceFragment(f"{name}.rec", res.read_text(encoding="utf-8")))
    return out


_cached_spec: Optional[Spec] = None


def corpus_spec() -> Spec:
    """Parse (once) and return the merged bundled specification."""
    global _cached_spec
    if _cached_spec is None:
        _cached_spec = parse_spec(corpus_fragments())
    return _cached_spec


def vectors_text() -> str:
    return (_DATA / "vectors.rec").read_text(encoding="utf-8")


@dataclass(frozen=True)
class VectorCase:
    """One validation case: a Bool term expected to normalize to ``true``."""

    id: str
    term: str  # source text
    origin: str  # "iso-table", "iso-8730" or "supplementary"


_META = re.compile(r"id=(\S+)(?:\s+origin=(\S+))?")


def parse_vector_file(
    text: str, spec: Spec, *, source: str = "<vectors>"
) -> list[tuple[VectorCase, Term]]:
    """Parse a vector file: one ground Bool term per line, ``#`` comments.

    Trailing comments of the form ``# id=NAME origin=KIND`` give a case a
    stable identity; unannotated lines are named after their line number.
    """
    cases: list[tuple[VectorCase, Term]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        code, _, comment = raw.partition("#")
        if not code.strip():
            continue
        meta = _META.search(comment)
        case_id = meta.group(1) if meta else f"line-{lineno}"
        origin = (meta.group(2) if meta and meta.group(2) else "supplementary")
        if origin not in ORIGINS:
            raise ParseError(
                f"unknown vector origin '{origin}'", lineno, 1, origin, source
            )
        term = parse_ground_term(code, spec, source=f"{source}:{lineno}")
        if term.sort != "Bool":
            raise ParseError(
                f"vector term has sort {term.sort}, expected Bool",
                lineno,
                1,
                case_id,
                source,
            )
        cases.append((VectorCase(case_id, code.strip(), origin), term))
    return cases


def load_vector_cases(
    path: str | Path | None = None, spec: Spec | None = None
) -> list[tuple[VectorCase, Term]]:
    """Load vector cases from a file, defaulting to the bundled 203 vectors."""
    if spec is None:
        spec = corpus_spec()
    if path is None:
        return parse_vector_file(vectors_text(), spec, source="vectors.rec")
    text = Path(path).read_text(encoding="utf-8")
    return parse_vector_file(text, spec, source=str(path))


def read_spec_paths(paths: Iterable[str | Path]) -> list[SourceFragment]:
    """Turn file or directory paths into fragments (directories: sorted ``*.rec``)."""
    fragments: list[SourceFragment] = []
    for p in paths:
        p = Path(p)
        if p.is_dir():
            for child in sorted(p.glob("*.rec")):
                fragments.append(
                    SourceFragment(str(child), child.read_text(encoding="utf-8"))
                )
        else:
            fragments.append(SourceFragment(str(p), p.read_text(encoding="utf-8")))
    return fragments
