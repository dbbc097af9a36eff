"""Term-rewriting toolkit and bit-exact MAC reference for ISO 8731-2.

The package has two halves that validate each other: a rewrite engine that
executes the bundled algebraic specification of the Message Authenticator
Algorithm, and a native 32-bit implementation of the same algorithm.  The
bundled corpus carries 203 known-answer vectors; ``crosscheck`` compares the
two halves on random inputs on top of that.
"""

from __future__ import annotations

from .analysis import (
    Diagnostic,
    SpecStats,
    check_all,
    check_ambiguity,
    check_constructor_discipline,
    check_variable_hygiene,
    spec_stats,
)
from .corpus import VectorCase, corpus_fragments, corpus_spec, load_vector_cases
from .engine import (
    Budget,
    BudgetExceeded,
    COMPILED_AVAILABLE,
    DEFAULT_BACKEND,
    Engine,
    NormalizeResult,
    Status,
)
from .parser import ParseError, SourceFragment, format_spec, parse_ground_term, parse_spec
from .terms import (
    App,
    Rule,
    Spec,
    SpecError,
    Symbol,
    Term,
    TermError,
    Var,
    apply_subst,
    format_term,
    match_term,
    sort_of_term,
    term_equal,
)

__version__ = "0.1.0"

__all__ = [
    "App",
    "Budget",
    "BudgetExceeded",
    "COMPILED_AVAILABLE",
    "DEFAULT_BACKEND",
    "Diagnostic",
    "Engine",
    "NormalizeResult",
    "ParseError",
    "Rule",
    "SourceFragment",
    "Spec",
    "SpecError",
    "SpecStats",
    "Status",
    "Symbol",
    "Term",
    "TermError",
    "Var",
    "VectorCase",
    "apply_subst",
    "check_all",
    "check_ambiguity",
    "check_constructor_discipline",
    "check_variable_hygiene",
    "corpus_fragments",
    "corpus_spec",
    "format_spec",
    "format_term",
    "load_vector_cases",
    "match_term",
    "parse_ground_term",
    "parse_spec",
    "sort_of_term",
    "spec_stats",
    "term_equal",
]
