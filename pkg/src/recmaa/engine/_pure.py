"""Pure-Python leftmost-innermost normalization kernel.

Terms live in a per-kernel arena of hash-consed nodes, so structural
equality is id equality and memoization keys are plain ints.  The evaluator
is an explicit task machine (no native recursion): EVAL normalizes
arguments, BUILD reassembles a node, TRYRULE scans candidate rules in
declaration order, CONDCHECK resumes a conditional rule once both condition
sides reached normal form, and STORE records a memo entry.

The compiled kernel in ``_kernel.pyx`` executes the same machine over C
arrays; the two must stay behaviourally identical, statistics included.
"""

from __future__ import annotations

from ._compile import CompiledSpec
from ._types import BudgetExceeded, DEFAULT_MEMO_LIMIT

_NORMAL = 1
_HAS_DEFINED = 2

_SIZE_CAP = 1 << 62

# Task tags.
_EVAL = 0
_BUILD = 1
_TRYRULE = 2
_CONDCHECK = 3
_STORE = 4


def _match(
    pattern: tuple[int, ...],
    nvars: int,
    args: tuple[int, ...],
    nodes: list[tuple[int, tuple[int, ...]]],
) -> list[int] | None:
    """Match the concatenated argument patterns against normalized args."""
    bindings = [-1] * nvars
    stack = list(args)
    stack.reverse()
    for p in pattern:
        s = stack.pop()
        if p < 0:
            slot = -p - 1
            bound = bindings[slot]
            if bound < 0:
                bindings[slot] = s
            elif bound != s:  # hash-consed: id equality is structural equality
                return None
        else:
            head, sargs = nodes[s]
            if head != p:
                return None
            if sargs:
                stack.extend(reversed(sargs))
    return bindings


class PureKernel:
    backend = "pure"

    def __init__(self, cspec: CompiledSpec, memo_limit: int = DEFAULT_MEMO_LIMIT):
        self.cspec = cspec
        self.memo_limit = memo_limit
        self.nodes: list[tuple[int, tuple[int, ...]]] = []
        self.flags: list[int] = []
        self.sizes: list[int] = []
        self.intern_table: dict[tuple[int, tuple[int, ...]], int] = {}
        self.memo: dict[int, int] = {}
        self._peak = 0

    # -- arena ----------------------------------------------------------------

    def intern(self, head: int, args: tuple[int, ...]) -> int:
        key = (head, args)
        found = self.intern_table.get(key)
        if found is not None:
            return found
        node_id = len(self.nodes)
        self.nodes.append(key)
        self.flags.append(0)
        size = 1
        sizes = self.sizes
        for a in args:
            size += sizes[a]
        if size > _SIZE_CAP:
            size = _SIZE_CAP
        sizes.append(size)
        self.intern_table[key] = node_id
        if size > self._peak:
            self._peak = size
        return node_id

    def head_of(self, node: int) -> int:
        return self.nodes[node][0]

    def args_of(self, node: int) -> tuple[int, ...]:
        return self.nodes[node][1]

    def size_of(self, node: int) -> int:
        return self.sizes[node]

    def memo_len(self) -> int:
        return len(self.memo)

    def _instantiate(self, prog: tuple[int, ...], bindings: list[int]) -> int:
        """Build the instance of a rule side, reading the program backwards."""
        out: list[int] = []
        arity = self.cspec.arity
        intern = self.intern
        for i in range(len(prog) - 1, -1, -1):
            p = prog[i]
            if p < 0:
                out.append(bindings[-p - 1])
            else:
                k = arity[p]
                if k == 0:
                    out.append(intern(p, ()))
                else:
                    args = tuple(out[-k:][::-1])
                    del out[-k:]
                    out.append(intern(p, args))
        return out[0]

    # -- evaluation -------------------------------------------------------------

    def normalize(
        self,
        root: int,
        max_rewrites: int,
        max_depth: int,
        memo_on: bool,
    ) -> tuple[int, int, int, int, bool]:
        """Normalize ``root``; returns (nf, rewrites, cond_evals, peak, stuck)."""
        nodes = self.nodes
        flags = self.flags
        memo = self.memo
        memo_limit = self.memo_limit
        cspec = self.cspec
        rules = cspec.rules
        is_constructor = cspec.is_constructor
        candidates = cspec.candidates
        instantiate = self._instantiate

        self._peak = self.sizes[root]
        rewrites = 0
        cond_evals = 0

        tasks: list[tuple] = [(_EVAL, root)]
        vals: list[int] = []

        while tasks:
            if len(tasks) > max_depth:
                raise BudgetExceeded("depth", rewrites, cond_evals, self._peak)
            task = tasks.pop()
            tag = task[0]

            if tag == _EVAL:
                t2 = task[1]
                if flags[t2] & _NORMAL:
                    vals.append(t2)
                    continue
                if memo_on:
                    hit = memo.get(t2)
                    if hit is not None:
                        vals.append(hit)
                        continue
                head, args = nodes[t2]
                if args:
                    ready = True
                    for a in args:
                        if not flags[a] & _NORMAL:
                            ready = False
                            break
                    if not ready:
                        tasks.append((_BUILD, head, len(args)))
                        for a in reversed(args):
                            tasks.append((_EVAL, a))
                        continue
            elif tag == _BUILD:
                n = task[2]
                args = tuple(vals[-n:])
                del vals[-n:]
                t2 = self.intern(task[1], args)
                if flags[t2] & _NORMAL:
                    vals.append(t2)
                    continue
                if memo_on:
                    hit = memo.get(t2)
                    if hit is not None:
                        vals.append(hit)
                        continue
                head = task[1]
            elif tag == _TRYRULE:
                t2, k, cands = task[1], task[2], task[3]
                args = nodes[t2][1]
                fired = False
                while k < len(cands):
                    rule = rules[cands[k]]
                    bindings = _match(rule.lhs, rule.nvars, args, nodes)
                    if bindings is None:
                        k += 1
                        continue
                    if rule.cond_left is None:
                        rewrites += 1
                        if rewrites > max_rewrites:
                            raise BudgetExceeded(
                                "rewrites", rewrites, cond_evals, self._peak
                            )
                        if memo_on:
                            tasks.append((_STORE, t2))
                        tasks.append((_EVAL, instantiate(rule.rhs, bindings)))
                    else:
                        tasks.append((_CONDCHECK, t2, k, cands, bindings))
                        tasks.append((_EVAL, instantiate(rule.cond_right, bindings)))
                        tasks.append((_EVAL, instantiate(rule.cond_left, bindings)))
                    fired = True
                    break
                if not fired:
                    # Irreducible application of a defined symbol: stuck normal form.
                    f = _NORMAL | _HAS_DEFINED
                    flags[t2] |= f
                    if memo_on:
                        if len(memo) >= memo_limit:
                            memo.clear()
                        memo[t2] = t2
                    vals.append(t2)
                continue
            elif tag == _CONDCHECK:
                t2, k, cands, bindings = task[1], task[2], task[3], task[4]
                right_nf = vals.pop()
                left_nf = vals.pop()
                cond_evals += 1
                if left_nf == right_nf:
                    rule = rules[cands[k]]
                    rewrites += 1
                    if rewrites > max_rewrites:
                        raise BudgetExceeded(
                            "rewrites", rewrites, cond_evals, self._peak
                        )
                    if memo_on:
                        tasks.append((_STORE, t2))
                    tasks.append((_EVAL, instantiate(rule.rhs, bindings)))
                else:
                    tasks.append((_TRYRULE, t2, k + 1, cands))
                continue
            else:  # _STORE
                if len(memo) >= memo_limit:
                    memo.clear()
                memo[task[1]] = vals[-1]
                continue

            # t2 has normal arguments; reduce at the head.
            if is_constructor[head]:
                f = _NORMAL
                for a in args:
                    f |= flags[a] & _HAS_DEFINED
                flags[t2] |= f
                vals.append(t2)
                continue
            cands = candidates(head, nodes[args[0]][0] if args else None)
            tasks.append((_TRYRULE, t2, 0, cands))

        nf = vals[0]
        return nf, rewrites, cond_evals, self._peak, bool(flags[nf] & _HAS_DEFINED)
