"""Many-sorted first-order terms, signatures, matching, and substitution.

Terms are immutable and freely shared between threads.  Deeply nested terms
are normal here (messages of a hundred thousand blocks), so every traversal
in this module uses an explicit stack instead of native recursion.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Union


class TermError(ValueError):
    """A term would violate its symbol's arity or sort contract."""


class UnboundVariableError(TermError):
    """A substitution was applied to a term with an unbound variable."""


class SpecError(ValueError):
    """A specification violates a structural invariant."""


_IDENT_CHARS = frozenset(
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_'\""
)


def is_identifier(name: str) -> bool:
    """Identifiers are non-empty and may contain letters, digits, _, ' and "."""
    return bool(name) and all(c in _IDENT_CHARS for c in name)


@dataclass(frozen=True)
class Symbol:
    """A function symbol: either a free constructor or a defined operation."""

    name: str
    arg_sorts: tuple[str, ...]
    result_sort: str
    constructor: bool = False

    @property
    def arity(self) -> int:
        return len(self.arg_sorts)

    def __repr__(self) -> str:
        kind = "cons" if self.constructor else "opns"
        sig = " ".join(self.arg_sorts)
        return f"Symbol({self.name} : {sig}{' ' if sig else ''}-> {self.result_sort} [{kind}])"


class Term:
    """Base class for :class:`Var` and :class:`App`."""

    __slots__ = ()

    sort: str

    def __str__(self) -> str:
        return format_term(self)


class Var(Term):
    """A sorted variable occurrence."""

    __slots__ = ("name", "sort", "_hash")

    def __init__(self, name: str, sort: str):
        if not is_identifier(name):
            raise TermError(f"invalid variable name {name!r}")
        self.name = name
        self.sort = sort
        self._hash = hash(("v", name, sort))

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Var):
            return NotImplemented
        return self.name == other.name and self.sort == other.sort

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Var({self.name}:{self.sort})"


class App(Term):
    """An application of a symbol to argument terms.

    Construction checks the arity and the argument sorts; a ground,
    well-sorted term can only be taken apart, never corrupted.
    """

    __slots__ = ("symbol", "args", "_hash")

    def __init__(self, symbol: Symbol, args: Iterable[Term] = ()):
        args = tuple(args)
        if len(args) != symbol.arity:
            raise TermError(
                f"symbol '{symbol.name}' expects {symbol.arity} argument(s), got {len(args)}"
            )
        for i, (arg, want) in enumerate(zip(args, symbol.arg_sorts)):
            if arg.sort != want:
                raise TermError(
                    f"argument {i + 1} of '{symbol.name}' has sort {arg.sort}, expected {want}"
                )
        self.symbol = symbol
        self.args = args
        self._hash = hash((symbol.name, tuple(a._hash for a in args)))

    @property
    def sort(self) -> str:  # type: ignore[override]
        return self.symbol.result_sort

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, App):
            return NotImplemented
        if self._hash != other._hash:
            return False
        stack = [(self, other)]
        while stack:
            a, b = stack.pop()
            if a is b:
                continue
            if type(a) is not type(b):
                return False
            if isinstance(a, Var):
                if a.name != b.name or a.sort != b.sort:
                    return False
                continue
            if a._hash != b._hash or a.symbol != b.symbol:
                return False
            stack.extend(zip(a.args, b.args))
        return True

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"App({format_term(self, max_len=60)})"


Substitution = Mapping[str, Term]


def iter_subterms(term: Term) -> Iterator[Term]:
    """Yield the term and all its subterms, preorder, without recursion."""
    stack = [term]
    while stack:
        t = stack.pop()
        yield t
        if isinstance(t, App):
            stack.extend(reversed(t.args))


def term_size(term: Term) -> int:
    """Number of nodes in the term tree."""
    return sum(1 for _ in iter_subterms(term))


def is_ground(term: Term) -> bool:
    return not any(isinstance(t, Var) for t in iter_subterms(term))


def variables_of(term: Term) -> set[str]:
    return {t.name for t in iter_subterms(term) if isinstance(t, Var)}


def term_equal(a: Term, b: Term) -> bool:
    """Structural equality (same head and recursively equal arguments)."""
    return a == b


def match_term(pattern: Term, subject: Term) -> Optional[dict[str, Term]]:
    """Syntactically match ``pattern`` against a ground ``subject``.

    Returns the unique substitution s with s(pattern) == subject, or None.
    Repeated pattern variables must match structurally equal subterms.
    """
    bindings: dict[str, Term] = {}
    stack = [(pattern, subject)]
    while stack:
        p, s = stack.pop()
        if isinstance(p, Var):
            bound = bindings.get(p.name)
            if bound is None:
                if s.sort != p.sort:
                    return None
                bindings[p.name] = s
            elif not term_equal(bound, s):
                return None
        else:
            if not isinstance(s, App) or s.symbol != p.symbol:
                return None
            stack.extend(zip(p.args, s.args))
    return bindings


def apply_subst(subst: Substitution, term: Term) -> Term:
    """Replace every variable of ``term`` simultaneously using ``subst``.

    All variables of the term must be bound; the engine relies on this to
    guarantee that instantiated right-hand sides are ground.
    """
    out: list[Term] = []
    stack: list[tuple[Term, bool]] = [(term, False)]
    while stack:
        node, expanded = stack.pop()
        if isinstance(node, Var):
            try:
                out.append(subst[node.name])
            except KeyError:
                raise UnboundVariableError(
                    f"variable '{node.name}' is not bound by the substitution"
                ) from None
            continue
        if not node.args:
            out.append(node)
            continue
        if expanded:
            k = len(node.args)
            args = out[-k:]
            del out[-k:]
            if all(a is b for a, b in zip(args, node.args)):
                out.append(node)
            else:
                out.append(App(node.symbol, args))
        else:
            stack.append((node, True))
            for a in reversed(node.args):
                stack.append((a, False))
    return out[0]


def format_term(term: Term, max_len: int | None = None) -> str:
    """Render a term in source syntax: ``f (a, g (b), c)``."""
    pieces: list[str] = []
    # Work items: terms to print, or literal glue strings.
    stack: list[Union[Term, str]] = [term]
    total = 0
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            pieces.append(item)
            total += len(item)
        elif isinstance(item, Var):
            pieces.append(item.name)
            total += len(item.name)
        else:
            pieces.append(item.symbol.name)
            total += len(item.symbol.name)
            if item.args:
                stack.append(")")
                for a in reversed(item.args):
                    stack.append(a)
                    stack.append(", ")
                stack[-1] = " ("  # glue before the first argument
        if max_len is not None and total > max_len:
            pieces.append("...")
            break
    return "".join(pieces)


@dataclass(frozen=True)
class Rule:
    """An oriented rewrite rule ``lhs -> rhs`` with an optional condition.

    The condition is a pair (left, right); the rule fires only when both
    sides rewrite to the same normal form.
    """

    lhs: Term
    rhs: Term
    condition: Optional[tuple[Term, Term]] = None
    origin_index: int = 0

    def __post_init__(self) -> None:
        if not isinstance(self.lhs, App):
            raise SpecError("rule left-hand side must be a symbol application")
        if self.lhs.sort != self.rhs.sort:
            raise SpecError(
                f"rule rewrites sort {self.lhs.sort} to sort {self.rhs.sort}"
            )
        if self.condition is not None:
            left, right = self.condition
            if left.sort != right.sort:
                raise SpecError(
                    f"condition compares sort {left.sort} with sort {right.sort}"
                )

    @property
    def head(self) -> Symbol:
        assert isinstance(self.lhs, App)
        return self.lhs.symbol


@dataclass(frozen=True)
class Spec:
    """A parsed specification: sorts, symbols, variable declarations, rules.

    Rule ordering is significant: when several rules match a redex, the one
    declared first wins.  Variable-hygiene and constructor-discipline
    violations are representable here on purpose; the parser refuses to
    produce them and the static analyses report them as diagnostics.
    """

    sorts: tuple[str, ...]
    symbols: Mapping[str, Symbol]
    var_decls: Mapping[str, str]
    rules: tuple[Rule, ...] = ()

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for s in self.sorts:
            if not is_identifier(s):
                raise SpecError(f"invalid sort name {s!r}")
            if s in seen:
                raise SpecError(f"sort '{s}' declared twice")
            seen.add(s)
        for name, sym in self.symbols.items():
            if name != sym.name:
                raise SpecError(f"symbol table key {name!r} != symbol name {sym.name!r}")
            if not is_identifier(name):
                raise SpecError(f"invalid symbol name {name!r}")
            for s in sym.arg_sorts + (sym.result_sort,):
                if s not in seen:
                    raise SpecError(f"symbol '{name}' uses undeclared sort '{s}'")
        for name, sort in self.var_decls.items():
            if sort not in seen:
                raise SpecError(f"variable '{name}' has undeclared sort '{sort}'")
            if name in self.symbols:
                raise SpecError(f"'{name}' is declared both as a symbol and a variable")
        for rule in self.rules:
            self._check_rule_symbols(rule)

    def _check_rule_symbols(self, rule: Rule) -> None:
        terms = [rule.lhs, rule.rhs]
        if rule.condition is not None:
            terms.extend(rule.condition)
        for root in terms:
            for t in iter_subterms(root):
                if isinstance(t, Var):
                    declared = self.var_decls.get(t.name)
                    if declared != t.sort:
                        raise SpecError(
                            f"rule {rule.origin_index}: variable '{t.name}' has sort "
                            f"{t.sort}, declared {declared}"
                        )
                elif self.symbols.get(t.symbol.name) != t.symbol:
                    raise SpecError(
                        f"rule {rule.origin_index}: unknown symbol '{t.symbol.name}'"
                    )

    def symbol(self, name: str) -> Symbol:
        try:
            return self.symbols[name]
        except KeyError:
            raise SpecError(f"unknown symbol '{name}'") from None

    def constructors(self) -> list[Symbol]:
        return [s for s in self.symbols.values() if s.constructor]

    def defined_symbols(self) -> list[Symbol]:
        return [s for s in self.symbols.values() if not s.constructor]


def sort_of_term(term: Term, spec: Spec) -> str:
    """Sort of a term over ``spec``: head result sort or declared variable sort."""
    if isinstance(term, Var):
        return term.sort
    known = spec.symbols.get(term.symbol.name)
    if known != term.symbol:
        raise SpecError(f"unknown symbol '{term.symbol.name}'")
    return term.symbol.result_sort
