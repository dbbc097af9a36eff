"""Ground-term normalization by leftmost-innermost rewriting.

Two interchangeable kernels execute the same machine: a pure-Python one and
a compiled (Cython) one.  The compiled kernel is selected at import when the
extension module built from ``_kernel.pyx`` is present; set the environment
variable ``RECMAA_BACKEND=pure`` (or ``compiled``) to force a choice, or
pass ``backend=`` to :class:`Engine`.

An :class:`Engine` owns a hash-consed term arena and a memoization cache
bound to one spec.  Results are deterministic regardless of cache state;
statistics of a run depend on what earlier runs already cached, so
reproducible statistics call for a fresh engine (or ``memo=False``).
"""

from __future__ import annotations

import os
from typing import Optional

from ..terms import App, Spec, SpecError, Term, TermError, Var
from ._compile import CompiledSpec
from ._pure import PureKernel
from ._types import (
    DEFAULT_MEMO_LIMIT,
    Budget,
    BudgetExceeded,
    NormalizeResult,
    Status,
)

try:
    from . import _kernel as _compiled  # type: ignore[attr-defined]
except ImportError:  # extension not built; pure fallback
    _compiled = None

COMPILED_AVAILABLE = _compiled is not None
DEFAULT_BACKEND = "compiled" if COMPILED_AVAILABLE else "pure"

__all__ = [
    "Budget",
    "BudgetExceeded",
    "COMPILED_AVAILABLE",
    "DEFAULT_BACKEND",
    "Engine",
    "NormalizeResult",
    "Status",
    "available_backends",
]


def available_backends() -> tuple[str, ...]:
    return ("pure", "compiled") if COMPILED_AVAILABLE else ("pure",)


def _resolve_backend(requested: Optional[str]) -> str:
    name = requested or os.environ.get("RECMAA_BACKEND") or DEFAULT_BACKEND
    if name not in ("pure", "compiled"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "compiled" and not COMPILED_AVAILABLE:
        raise ValueError("compiled backend requested but the extension is not built")
    return name


class Engine:
    """Normalizer for ground terms over one spec."""

    def __init__(
        self,
        spec: Spec,
        backend: Optional[str] = None,
        memo_limit: int = DEFAULT_MEMO_LIMIT,
    ):
        self.spec = spec
        self.backend = _resolve_backend(backend)
        self._cspec = CompiledSpec(spec)
        if self.backend == "compiled":
            self._kernel = _compiled.CompiledKernel(self._cspec, memo_limit)
        else:
            self._kernel = PureKernel(self._cspec, memo_limit)
        self._symbols = list(spec.symbols.values())
        true_sym = spec.symbols.get("true")
        self._true_id = (
            self._kernel.intern(self._cspec.sym_id["true"], ())
            if true_sym is not None and true_sym.arity == 0
            else None
        )

    # -- term <-> arena -------------------------------------------------------

    def _term_to_id(self, term: Term) -> int:
        sym_id = self._cspec.sym_id
        intern = self._kernel.intern
        seen: dict[int, int] = {}
        out: list[int] = []
        stack: list[tuple[Term, bool]] = [(term, False)]
        while stack:
            node, expanded = stack.pop()
            if isinstance(node, Var):
                raise TermError("only ground terms can be normalized")
            if not expanded:
                hit = seen.get(id(node))
                if hit is not None:
                    out.append(hit)
                    continue
                name = node.symbol.name
                if name not in sym_id or self.spec.symbols[name] != node.symbol:
                    raise SpecError(f"unknown symbol '{name}'")
                if node.args:
                    stack.append((node, True))
                    for a in reversed(node.args):
                        stack.append((a, False))
                    continue
                nid = intern(sym_id[name], ())
            else:
                k = len(node.args)
                ids = tuple(out[-k:])
                del out[-k:]
                nid = intern(sym_id[node.symbol.name], ids)
            seen[id(node)] = nid
            out.append(nid)
        return out[0]

    def _id_to_term(self, node_id: int) -> Term:
        kernel = self._kernel
        symbols = self._symbols
        cache: dict[int, Term] = {}
        out: list[Term] = []
        stack: list[tuple[int, bool]] = [(node_id, False)]
        while stack:
            nid, expanded = stack.pop()
            if not expanded:
                hit = cache.get(nid)
                if hit is not None:
                    out.append(hit)
                    continue
                args = kernel.args_of(nid)
                if args:
                    stack.append((nid, True))
                    for a in reversed(args):
                        stack.append((a, False))
                    continue
                term: Term = App(symbols[kernel.head_of(nid)], ())
            else:
                args = kernel.args_of(nid)
                k = len(args)
                built = out[-k:]
                del out[-k:]
                term = App(symbols[kernel.head_of(nid)], built)
            cache[nid] = term
            out.append(term)
        return out[0]

    # -- public API -------------------------------------------------------------

    def normalize(
        self,
        term: Term,
        budget: Optional[Budget] = None,
        memo: bool = True,
    ) -> NormalizeResult:
        """Normalize a ground term; raises :class:`BudgetExceeded` on blowup."""
        budget = budget or Budget()
        root = self._term_to_id(term)
        nf, rewrites, cond_evals, peak, stuck = self._kernel.normalize(
            root, budget.max_rewrites, budget.max_depth, memo
        )
        return NormalizeResult(
            normal_form=self._id_to_term(nf),
            rule_applications=rewrites,
            condition_evaluations=cond_evals,
            peak_term_size=peak,
            stuck=stuck,
        )

    def eval_bool(
        self,
        term: Term,
        budget: Optional[Budget] = None,
        memo: bool = True,
    ) -> Status:
        """Evaluate a Bool term to a vector status; never raises for outcomes."""
        if term.sort != "Bool":
            raise TermError(f"vector term has sort {term.sort}, expected Bool")
        budget = budget or Budget()
        root = self._term_to_id(term)
        try:
            nf, _, _, _, stuck = self._kernel.normalize(
                root, budget.max_rewrites, budget.max_depth, memo
            )
        except BudgetExceeded:
            return Status.BUDGET_EXCEEDED
        if stuck:
            return Status.STUCK
        return Status.PASS if nf == self._true_id else Status.FAIL

    def eval_bool_result(
        self,
        term: Term,
        budget: Optional[Budget] = None,
        memo: bool = True,
    ) -> tuple[Status, int]:
        """Like :meth:`eval_bool` but also reports rule applications."""
        if term.sort != "Bool":
            raise TermError(f"vector term has sort {term.sort}, expected Bool")
        budget = budget or Budget()
        root = self._term_to_id(term)
        try:
            nf, rewrites, _, _, stuck = self._kernel.normalize(
                root, budget.max_rewrites, budget.max_depth, memo
            )
        except BudgetExceeded as exc:
            return Status.BUDGET_EXCEEDED, exc.rule_applications
        if stuck:
            return Status.STUCK, rewrites
        status = Status.PASS if nf == self._true_id else Status.FAIL
        return status, rewrites
