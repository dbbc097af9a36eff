"""Static well-formedness checks over a parsed specification.

Three analyses: constructor discipline (rule left-hand sides are a defined
symbol applied to constructor patterns), variable hygiene, and ambiguity
(overlapping left-hand sides without mutually exclusive premises).  The
ambiguity check is syntactic on purpose: premises that are exclusive only
semantically draw a (possibly spurious) warning.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .terms import App, Rule, Spec, Term, Var, is_ground, iter_subterms, variables_of

ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" or "warning"
    code: str
    rule_indices: tuple[int, ...]
    message: str

    def __str__(self) -> str:
        rules = ",".join(str(i) for i in self.rule_indices)
        return f"{self.severity}[{self.code}] (rule {rules}): {self.message}"


@dataclass(frozen=True)
class SpecStats:
    sorts: int
    constructors: int
    defined_symbols: int
    rules: int
    conditional_rules: int


def spec_stats(spec: Spec) -> SpecStats:
    return SpecStats(
        sorts=len(spec.sorts),
        constructors=sum(1 for s in spec.symbols.values() if s.constructor),
        defined_symbols=sum(1 for s in spec.symbols.values() if not s.constructor),
        rules=len(spec.rules),
        conditional_rules=sum(1 for r in spec.rules if r.condition is not None),
    )


def check_constructor_discipline(spec: Spec) -> list[Diagnostic]:
    """Every rule must rewrite f(P1,...,Pn) with f defined and Pi constructor patterns."""
    out: list[Diagnostic] = []
    for rule in spec.rules:
        head = rule.lhs.symbol
        if head.constructor:
            out.append(
                Diagnostic(
                    ERROR,
                    "constructor-lhs",
                    (rule.origin_index,),
                    f"left-hand side is headed by the constructor '{head.name}'",
                )
            )
            continue
        bad = sorted(
            {
                t.symbol.name
                for arg in rule.lhs.args
                for t in iter_subterms(arg)
                if isinstance(t, App) and not t.symbol.constructor
            }
        )
        if bad:
            out.append(
                Diagnostic(
                    ERROR,
                    "defined-in-pattern",
                    (rule.origin_index,),
                    f"left-hand side pattern of '{head.name}' contains defined "
                    f"symbol(s): {', '.join(bad)}",
                )
            )
    return out


def check_variable_hygiene(spec: Spec) -> list[Diagnostic]:
    """Errors for free right-hand-side or condition variables, warnings for unused ones."""
    out: list[Diagnostic] = []
    for rule in spec.rules:
        lhs_vars = variables_of(rule.lhs)
        used = variables_of(rule.rhs)
        free = used - lhs_vars
        if free:
            out.append(
                Diagnostic(
                    ERROR,
                    "free-rhs-variable",
                    (rule.origin_index,),
                    f"right-hand side uses unbound variable(s): {', '.join(sorted(free))}",
                )
            )
        if rule.condition is not None:
            cond_vars = variables_of(rule.condition[0]) | variables_of(rule.condition[1])
            cfree = cond_vars - lhs_vars
            if cfree:
                out.append(
                    Diagnostic(
                        ERROR,
                        "free-condition-variable",
                        (rule.origin_index,),
                        f"condition uses unbound variable(s): {', '.join(sorted(cfree))}",
                    )
                )
            used |= cond_vars
        unused = lhs_vars - used
        if unused:
            out.append(
                Diagnostic(
                    WARNING,
                    "unused-variable",
                    (rule.origin_index,),
                    f"left-hand side variable(s) never used: {', '.join(sorted(unused))}",
                )
            )
    return out


# --- overlap detection -------------------------------------------------------


def _rename_vars(term: Term, tag: str) -> Term:
    """Prefix every variable name; used to keep two rules' variables apart."""
    out: list[Term] = []
    stack: list[tuple[Term, bool]] = [(term, False)]
    while stack:
        node, expanded = stack.pop()
        if isinstance(node, Var):
            out.append(Var(tag + node.name, node.sort))
            continue
        if not node.args:
            out.append(node)
            continue
        if expanded:
            k = len(node.args)
            args = out[-k:]
            del out[-k:]
            out.append(App(node.symbol, args))
        else:
            stack.append((node, True))
            for a in reversed(node.args):
                stack.append((a, False))
    return out[0]


def _unify(pairs: list[tuple[Term, Term]]) -> Optional[dict[str, Term]]:
    """Syntactic unification with occurs check; patterns only (small terms)."""
    subst: dict[str, Term] = {}

    def resolve(t: Term) -> Term:
        while isinstance(t, Var) and t.name in subst:
            t = subst[t.name]
        return t

    def occurs(name: str, t: Term) -> bool:
        stack = [t]
        while stack:
            cur = resolve(stack.pop())
            if isinstance(cur, Var):
                if cur.name == name:
                    return True
            else:
                stack.extend(cur.args)
        return False

    work = list(pairs)
    while work:
        a, b = work.pop()
        a = resolve(a)
        b = resolve(b)
        if a == b:
            continue
        if isinstance(a, Var):
            if occurs(a.name, b):
                return None
            subst[a.name] = b
        elif isinstance(b, Var):
            if occurs(b.name, a):
                return None
            subst[b.name] = a
        elif isinstance(a, App) and isinstance(b, App) and a.symbol == b.symbol:
            work.extend(zip(a.args, b.args))
        else:
            return None
    return subst


def _deep_apply(subst: dict[str, Term], term: Term) -> Term:
    """Apply a unifier exhaustively (bindings may mention other variables)."""
    out: list[Term] = []
    stack: list[tuple[Term, bool]] = [(term, False)]
    while stack:
        node, expanded = stack.pop()
        if isinstance(node, Var):
            bound = subst.get(node.name)
            if bound is None:
                out.append(node)
            else:
                stack.append((bound, False))
            continue
        if not node.args:
            out.append(node)
            continue
        if expanded:
            k = len(node.args)
            args = out[-k:]
            del out[-k:]
            out.append(App(node.symbol, args))
        else:
            stack.append((node, True))
            for a in reversed(node.args):
                stack.append((a, False))
    return out[0]


def _constructor_constant(term: Term) -> bool:
    return is_ground(term) and all(
        t.symbol.constructor for t in iter_subterms(term) if isinstance(t, App)
    )


def _exclusive_premises(r1: Rule, r2: Rule, unifier: dict[str, Term]) -> bool:
    """Recognize the 'same guard, distinct constant outcomes' pattern."""
    if r1.condition is None or r2.condition is None:
        return False
    left1 = _deep_apply(unifier, _rename_vars(r1.condition[0], "1_"))
    left2 = _deep_apply(unifier, _rename_vars(r2.condition[0], "2_"))
    if left1 != left2:
        return False
    right1, right2 = r1.condition[1], r2.condition[1]
    return (
        _constructor_constant(right1)
        and _constructor_constant(right2)
        and right1 != right2
    )


def check_ambiguity(spec: Spec) -> list[Diagnostic]:
    """Warn about rule pairs whose left-hand sides can match the same term.

    A pair is accepted without a warning when the overlap is guarded by
    mutually exclusive premises: identical condition left sides (up to the
    renaming induced by the overlap) and distinct constant right sides.
    """
    by_head: dict[str, list[Rule]] = {}
    for rule in spec.rules:
        by_head.setdefault(rule.lhs.symbol.name, []).append(rule)

    out: list[Diagnostic] = []
    for head, rules in by_head.items():
        for i in range(len(rules)):
            for j in range(i + 1, len(rules)):
                r1, r2 = rules[i], rules[j]
                lhs1 = _rename_vars(r1.lhs, "1_")
                lhs2 = _rename_vars(r2.lhs, "2_")
                unifier = _unify(list(zip(lhs1.args, lhs2.args)))
                if unifier is None:
                    continue
                if _exclusive_premises(r1, r2, unifier):
                    continue
                out.append(
                    Diagnostic(
                        WARNING,
                        "ambiguous-rules",
                        (r1.origin_index, r2.origin_index),
                        f"rules {r1.origin_index} and {r2.origin_index} for "
                        f"'{head}' can match the same term",
                    )
                )
    return out


def check_all(spec: Spec) -> list[Diagnostic]:
    """Run every analysis; diagnostics keep their originating order."""
    return (
        check_constructor_discipline(spec)
        + check_variable_hygiene(spec)
        + check_ambiguity(spec)
    )
