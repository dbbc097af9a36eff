"""Compilation of a specification into the flat form both kernels execute.

Symbols become dense integer ids.  Rule sides become preorder integer
programs: values >= 0 are symbol ids (followed by their arguments), values
< 0 encode variable slots as -(slot + 1), slots numbered by first occurrence
in the left-hand side.  Rules are indexed by head symbol and, where the
first argument pattern starts with a constructor, bucketed by that
constructor for fast candidate selection.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..terms import App, Spec, Term, Var


@dataclass(frozen=True)
class CompiledRule:
    index: int  # declaration order, global
    head: int
    nvars: int
    lhs: tuple[int, ...]  # argument patterns, concatenated preorder
    rhs: tuple[int, ...]
    cond_left: Optional[tuple[int, ...]]
    cond_right: Optional[tuple[int, ...]]


@dataclass(frozen=True)
class HeadIndex:
    """Candidate rules for one defined symbol, in declaration order.

    ``buckets`` maps a first-argument head constructor to the candidate
    list; ``default`` holds the rules whose first argument is a variable
    (the only possible matches for an unlisted or non-constructor head).
    """

    buckets: dict[int, tuple[int, ...]]
    default: tuple[int, ...]
    all_rules: tuple[int, ...]


class CompiledSpec:
    def __init__(self, spec: Spec):
        self.spec = spec
        self.symbol_names: list[str] = list(spec.symbols.keys())
        self.sym_id: dict[str, int] = {n: i for i, n in enumerate(self.symbol_names)}
        syms = list(spec.symbols.values())
        self.arity: list[int] = [s.arity for s in syms]
        self.is_constructor: list[bool] = [s.constructor for s in syms]
        self.rules: list[CompiledRule] = []
        self.index: dict[int, HeadIndex] = {}
        self._compile_rules()

    def _flatten(self, term: Term, slots: dict[str, int], *, assign: bool) -> list[int]:
        out: list[int] = []
        stack: list[Term] = [term]
        while stack:
            t = stack.pop()
            if isinstance(t, Var):
                if t.name not in slots:
                    if not assign:
                        raise ValueError(f"unbound rule variable '{t.name}'")
                    slots[t.name] = len(slots)
                out.append(-(slots[t.name] + 1))
            else:
                out.append(self.sym_id[t.symbol.name])
                stack.extend(reversed(t.args))
        return out

    def _compile_rules(self) -> None:
        by_head: dict[int, list[CompiledRule]] = {}
        for rule in self.spec.rules:
            assert isinstance(rule.lhs, App)
            head = self.sym_id[rule.lhs.symbol.name]
            slots: dict[str, int] = {}
            lhs_prog: list[int] = []
            for arg in rule.lhs.args:
                lhs_prog.extend(self._flatten(arg, slots, assign=True))
            rhs_prog = self._flatten(rule.rhs, slots, assign=False)
            if rule.condition is not None:
                cl = tuple(self._flatten(rule.condition[0], slots, assign=False))
                cr = tuple(self._flatten(rule.condition[1], slots, assign=False))
            else:
                cl = cr = None
            compiled = CompiledRule(
                index=len(self.rules),
                head=head,
                nvars=len(slots),
                lhs=tuple(lhs_prog),
                rhs=tuple(rhs_prog),
                cond_left=cl,
                cond_right=cr,
            )
            self.rules.append(compiled)
            by_head.setdefault(head, []).append(compiled)

        for head, rules in by_head.items():
            if self.arity[head] == 0:
                self.index[head] = HeadIndex(
                    {}, tuple(r.index for r in rules), tuple(r.index for r in rules)
                )
                continue
            first_heads: set[int] = set()
            for r in rules:
                if r.lhs[0] >= 0:
                    first_heads.add(r.lhs[0])
            buckets: dict[int, tuple[int, ...]] = {}
            for c in first_heads:
                buckets[c] = tuple(
                    r.index for r in rules if r.lhs[0] < 0 or r.lhs[0] == c
                )
            default = tuple(r.index for r in rules if r.lhs[0] < 0)
            self.index[head] = HeadIndex(
                buckets, default, tuple(r.index for r in rules)
            )

    def candidates(self, head: int, first_arg_head: int | None) -> tuple[int, ...]:
        """Rule candidates for a redex, cheapest filter first."""
        idx = self.index.get(head)
        if idx is None:
            return ()
        if first_arg_head is None:
            return idx.all_rules
        got = idx.buckets.get(first_arg_head)
        if got is not None:
            return got
        return idx.default
