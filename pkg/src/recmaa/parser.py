"""Parser for the five-section rewrite-specification dialect.

A source file is a sequence of optional, repeatable sections::

    SORTS  name ...
    CONS   name : sort ... -> sort
    OPNS   name : sort ... -> sort
    VARS   v1 v2 : Sort ...
    RULES  lhs -> rhs [if left -><- right] ...

Several source fragments merge into one specification: sorts, symbols and
variable declarations are unioned, rules are concatenated in fragment order.
Inside argument lists ``;`` is accepted as a synonym for ``,``.  Comments run
from ``#`` or ``--`` to the end of the line.  Terms may nest a hundred
thousand levels deep, so nothing in here recurses on term structure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence, Union

from .terms import (
    App,
    Rule,
    Spec,
    Symbol,
    Term,
    Var,
    _IDENT_CHARS,
    variables_of,
)

SECTION_KEYWORDS = ("SORTS", "CONS", "OPNS", "VARS", "RULES")
_RESERVED = frozenset(SECTION_KEYWORDS) | {"if"}


class ParseError(Exception):
    """A located syntax or consistency error in a source fragment."""

    def __init__(
        self,
        message: str,
        line: int,
        column: int,
        context: str = "",
        source: str = "",
    ):
        self.message = message
        self.line = line
        self.column = column
        self.context = context
        self.source = source
        where = f"{source}:" if source else ""
        near = f" (near {context!r})" if context else ""
        super().__init__(f"{where}{line}:{column}: {message}{near}")


@dataclass(frozen=True)
class SourceFragment:
    """A named piece of specification source, e.g. one corpus part."""

    name: str
    text: str


# --- tokenizer -------------------------------------------------------------

_PUNCT = {"(": "LP", ")": "RP", ",": "COMMA", ";": "SEMI", ":": "COLON"}


@dataclass(frozen=True)
class _Token:
    kind: str  # IDENT LP RP COMMA SEMI COLON ARROW JOIN EOF
    text: str
    line: int
    col: int


def _tokenize(text: str, source: str) -> list[_Token]:
    toks: list[_Token] = []
    i = 0
    line = 1
    col = 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r\f\v":
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c == "-":
            if text.startswith("-><-", i):
                toks.append(_Token("JOIN", "-><-", line, col))
                i += 4
                col += 4
                continue
            if text.startswith("->", i):
                toks.append(_Token("ARROW", "->", line, col))
                i += 2
                col += 2
                continue
            if text.startswith("--", i):
                while i < n and text[i] != "\n":
                    i += 1
                continue
            raise ParseError("stray '-'", line, col, c, source)
        if c in _PUNCT:
            toks.append(_Token(_PUNCT[c], c, line, col))
            i += 1
            col += 1
            continue
        if c in _IDENT_CHARS:
            j = i
            while j < n and text[j] in _IDENT_CHARS:
                j += 1
            toks.append(_Token("IDENT", text[i:j], line, col))
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {c!r}", line, col, c, source)
    toks.append(_Token("EOF", "", line, col))
    return toks


# --- raw (unresolved) fragment structure -----------------------------------

_RawTerm = tuple  # (head token, tuple of child _RawTerm)


@dataclass
class _RawSig:
    name: _Token
    arg_sorts: list[_Token]
    result_sort: _Token


@dataclass
class _RawRule:
    lhs: _RawTerm
    rhs: _RawTerm
    cond: Optional[tuple[_RawTerm, _RawTerm]]
    source: str


@dataclass
class _RawFragment:
    name: str
    sorts: list[_Token]
    cons: list[_RawSig]
    opns: list[_RawSig]
    var_groups: list[tuple[list[_Token], _Token]]
    rules: list[_RawRule]


def _is_section(tok: _Token) -> bool:
    return tok.kind == "IDENT" and tok.text in SECTION_KEYWORDS


class _FragmentReader:
    def __init__(self, fragment: SourceFragment):
        self.source = fragment.name
        self.toks = _tokenize(fragment.text, fragment.name)
        self.i = 0

    def peek(self) -> _Token:
        return self.toks[self.i]

    def next(self) -> _Token:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, message: str, tok: _Token | None = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(message, tok.line, tok.col, tok.text, self.source)

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.next()
        if tok.kind != kind:
            raise self.error(f"expected {what}", tok)
        return tok

    def read(self) -> _RawFragment:
        frag = _RawFragment(self.source, [], [], [], [], [])
        while self.peek().kind != "EOF":
            tok = self.next()
            if not _is_section(tok):
                raise self.error(
                    "expected a section keyword (SORTS, CONS, OPNS, VARS or RULES)", tok
                )
            if tok.text == "SORTS":
                self._read_sorts(frag)
            elif tok.text in ("CONS", "OPNS"):
                self._read_signatures(frag, tok.text)
            elif tok.text == "VARS":
                self._read_vars(frag)
            else:
                self._read_rules(frag)
        return frag

    def _at_section_end(self) -> bool:
        tok = self.peek()
        return tok.kind == "EOF" or _is_section(tok)

    def _read_sorts(self, frag: _RawFragment) -> None:
        while not self._at_section_end():
            tok = self.next()
            if tok.kind != "IDENT":
                raise self.error("expected a sort name", tok)
            self._check_unreserved(tok, "sort")
            frag.sorts.append(tok)

    def _read_signatures(self, frag: _RawFragment, section: str) -> None:
        target = frag.cons if section == "CONS" else frag.opns
        while not self._at_section_end():
            name = self.next()
            if name.kind != "IDENT":
                raise self.error("expected a symbol name", name)
            self._check_unreserved(name, "symbol")
            self.expect("COLON", "':' after symbol name")
            args: list[_Token] = []
            while self.peek().kind == "IDENT":
                args.append(self.next())
            self.expect("ARROW", "'->' in signature")
            result = self.expect("IDENT", "result sort")
            target.append(_RawSig(name, args, result))

    def _read_vars(self, frag: _RawFragment) -> None:
        while not self._at_section_end():
            names: list[_Token] = []
            while self.peek().kind == "IDENT":
                tok = self.next()
                self._check_unreserved(tok, "variable")
                names.append(tok)
            if not names:
                raise self.error("expected a variable name")
            self.expect("COLON", "':' in variable declaration")
            sort = self.expect("IDENT", "sort of variable declaration")
            frag.var_groups.append((names, sort))

    def _read_rules(self, frag: _RawFragment) -> None:
        while not self._at_section_end():
            lhs = self._read_term()
            self.expect("ARROW", "'->' between rule sides")
            rhs = self._read_term()
            cond = None
            nxt = self.peek()
            if nxt.kind == "IDENT" and nxt.text == "if":
                self.next()
                left = self._read_term()
                self.expect("JOIN", "'-><-' in rule condition")
                right = self._read_term()
                cond = (left, right)
            frag.rules.append(_RawRule(lhs, rhs, cond, self.source))

    def _check_unreserved(self, tok: _Token, what: str) -> None:
        if tok.text in _RESERVED:
            raise self.error(f"reserved word '{tok.text}' used as {what} name", tok)

    def _read_term(self) -> _RawTerm:
        # Iterative: frames hold a head token and the children seen so far.
        frames: list[tuple[_Token, list[_RawTerm]]] = []
        while True:
            head = self.next()
            if head.kind != "IDENT":
                raise self.error("expected a term", head)
            self._check_unreserved(head, "term")
            if self.peek().kind == "LP":
                self.next()
                frames.append((head, []))
                continue
            node: _RawTerm = (head, ())
            while True:
                if not frames:
                    return node
                frames[-1][1].append(node)
                nxt = self.peek()
                if nxt.kind in ("COMMA", "SEMI"):
                    self.next()
                    break  # read the next argument
                if nxt.kind == "RP":
                    self.next()
                    tok, children = frames.pop()
                    node = (tok, tuple(children))
                    continue
                raise self.error("expected ',', ';' or ')' in argument list")


# --- merging and resolution -------------------------------------------------

Fragments = Iterable[Union[SourceFragment, str]]


def _as_fragments(fragments: Fragments) -> list[SourceFragment]:
    out = []
    for i, f in enumerate(fragments):
        if isinstance(f, SourceFragment):
            out.append(f)
        else:
            out.append(SourceFragment(f"<fragment-{i + 1}>", f))
    return out


def parse_spec(
    fragments: Fragments,
    *,
    on_warning: Callable[[str], None] | None = None,
) -> Spec:
    """Parse and merge source fragments into a :class:`Spec`.

    Raises :class:`ParseError` on the first syntax or consistency violation.
    Duplicate identical rules are kept but reported through ``on_warning``.
    """
    raws = [_FragmentReader(f).read() for f in _as_fragments(fragments)]

    sorts: list[str] = []
    sort_set: set[str] = set()
    for raw in raws:
        for tok in raw.sorts:
            if tok.text not in sort_set:
                sort_set.add(tok.text)
                sorts.append(tok.text)

    symbols: dict[str, Symbol] = {}
    for raw in raws:
        for sig, constructor in [(s, True) for s in raw.cons] + [
            (s, False) for s in raw.opns
        ]:
            for tok in sig.arg_sorts + [sig.result_sort]:
                if tok.text not in sort_set:
                    raise ParseError(
                        f"unknown sort '{tok.text}'", tok.line, tok.col, tok.text, raw.name
                    )
            sym = Symbol(
                sig.name.text,
                tuple(t.text for t in sig.arg_sorts),
                sig.result_sort.text,
                constructor,
            )
            existing = symbols.get(sym.name)
            if existing is None:
                symbols[sym.name] = sym
            elif existing != sym:
                raise ParseError(
                    f"symbol '{sym.name}' redeclared with a different signature",
                    sig.name.line,
                    sig.name.col,
                    sym.name,
                    raw.name,
                )

    var_decls: dict[str, str] = {}
    for raw in raws:
        for names, sort_tok in raw.var_groups:
            if sort_tok.text not in sort_set:
                raise ParseError(
                    f"unknown sort '{sort_tok.text}'",
                    sort_tok.line,
                    sort_tok.col,
                    sort_tok.text,
                    raw.name,
                )
            for tok in names:
                if tok.text in symbols:
                    raise ParseError(
                        f"'{tok.text}' is declared both as a symbol and a variable",
                        tok.line,
                        tok.col,
                        tok.text,
                        raw.name,
                    )
                declared = var_decls.get(tok.text)
                if declared is None:
                    var_decls[tok.text] = sort_tok.text
                elif declared != sort_tok.text:
                    raise ParseError(
                        f"variable '{tok.text}' redeclared at sort "
                        f"'{sort_tok.text}' (was '{declared}')",
                        tok.line,
                        tok.col,
                        tok.text,
                        raw.name,
                    )

    rules: list[Rule] = []
    seen_rules: dict[tuple, int] = {}
    for raw in raws:
        for rr in raw.rules:
            rule = _resolve_rule(rr, symbols, var_decls, len(rules))
            key = (rule.lhs, rule.rhs, rule.condition)
            dup = seen_rules.get(key)
            if dup is None:
                seen_rules[key] = rule.origin_index
            elif on_warning is not None:
                head_tok = rr.lhs[0]
                on_warning(
                    f"{rr.source}:{head_tok.line}:{head_tok.col}: rule "
                    f"{rule.origin_index} duplicates rule {dup}"
                )
            rules.append(rule)

    return Spec(tuple(sorts), symbols, var_decls, tuple(rules))


def _resolve_term(
    raw: _RawTerm,
    symbols: dict[str, Symbol],
    var_decls: dict[str, str],
    source: str,
    allow_vars: bool,
) -> Term:
    out: list[Term] = []
    stack: list[tuple[_RawTerm, bool]] = [(raw, False)]
    while stack:
        (tok, children), expanded = stack.pop()
        if children and not expanded:
            stack.append(((tok, children), True))
            for c in reversed(children):
                stack.append((c, False))
            continue
        name = tok.text
        if not children and name in var_decls:
            if not allow_vars:
                raise ParseError(
                    f"variable '{name}' is not allowed in a ground term",
                    tok.line,
                    tok.col,
                    name,
                    source,
                )
            out.append(Var(name, var_decls[name]))
            continue
        if children and name in var_decls:
            raise ParseError(
                f"variable '{name}' cannot take arguments", tok.line, tok.col, name, source
            )
        sym = symbols.get(name)
        if sym is None:
            raise ParseError(f"unknown symbol '{name}'", tok.line, tok.col, name, source)
        k = len(children)
        if sym.arity != k:
            raise ParseError(
                f"symbol '{name}' expects {sym.arity} argument(s), got {k}",
                tok.line,
                tok.col,
                name,
                source,
            )
        args = out[-k:] if k else []
        if k:
            del out[-k:]
        for i, (arg, want) in enumerate(zip(args, sym.arg_sorts)):
            if arg.sort != want:
                raise ParseError(
                    f"argument {i + 1} of '{name}' has sort {arg.sort}, expected {want}",
                    tok.line,
                    tok.col,
                    name,
                    source,
                )
        out.append(App(sym, args))
    return out[0]


def _resolve_rule(
    rr: _RawRule,
    symbols: dict[str, Symbol],
    var_decls: dict[str, str],
    origin_index: int,
) -> Rule:
    head_tok = rr.lhs[0]

    def err(message: str) -> ParseError:
        return ParseError(message, head_tok.line, head_tok.col, head_tok.text, rr.source)

    lhs = _resolve_term(rr.lhs, symbols, var_decls, rr.source, allow_vars=True)
    rhs = _resolve_term(rr.rhs, symbols, var_decls, rr.source, allow_vars=True)
    cond = None
    if rr.cond is not None:
        cond = (
            _resolve_term(rr.cond[0], symbols, var_decls, rr.source, allow_vars=True),
            _resolve_term(rr.cond[1], symbols, var_decls, rr.source, allow_vars=True),
        )

    if not isinstance(lhs, App):
        raise err("rule left-hand side must be a symbol application")
    if lhs.symbol.constructor:
        raise err(f"rule left-hand side is headed by the constructor '{lhs.symbol.name}'")
    lhs_vars = variables_of(lhs)
    free = variables_of(rhs) - lhs_vars
    if free:
        raise err(f"right-hand side uses variable(s) not in the left-hand side: "
                  f"{', '.join(sorted(free))}")
    if cond is not None:
        cfree = (variables_of(cond[0]) | variables_of(cond[1])) - lhs_vars
        if cfree:
            raise err(f"condition uses variable(s) not in the left-hand side: "
                      f"{', '.join(sorted(cfree))}")
    if lhs.sort != rhs.sort:
        raise err(f"rule rewrites sort {lhs.sort} to sort {rhs.sort}")
    if cond is not None and cond[0].sort != cond[1].sort:
        raise err(
            f"condition compares sort {cond[0].sort} with sort {cond[1].sort}"
        )
    return Rule(lhs, rhs, cond, origin_index)


def parse_ground_term(text: str, spec: Spec, *, source: str = "<term>") -> Term:
    """Parse a single ground, well-sorted term against an existing spec."""
    reader = _FragmentReader(SourceFragment(source, text))
    raw = reader._read_term()
    tail = reader.peek()
    if tail.kind != "EOF":
        raise reader.error("unexpected input after term", tail)
    return _resolve_term(
        raw, dict(spec.symbols), dict(spec.var_decls), source, allow_vars=False
    )


# --- pretty printing ---------------------------------------------------------

def format_spec(spec: Spec) -> str:
    """Render a spec in source syntax; reparsing yields an identical spec."""
    from .terms import format_term

    lines: list[str] = []
    if spec.sorts:
        lines.append("SORTS")
        for s in spec.sorts:
            lines.append(f"  {s}")
    cons = [s for s in spec.symbols.values() if s.constructor]
    opns = [s for s in spec.symbols.values() if not s.constructor]
    for label, group in (("CONS", cons), ("OPNS", opns)):
        if group:
            lines.append(label)
            for sym in group:
                args = " ".join(sym.arg_sorts)
                lines.append(f"  {sym.name} : {args}{' ' if args else ''}-> {sym.result_sort}")
    if spec.var_decls:
        lines.append("VARS")
        by_sort: dict[str, list[str]] = {}
        order: list[str] = []
        for name, sort in spec.var_decls.items():
            if sort not in by_sort:
                by_sort[sort] = []
                order.append(sort)
            by_sort[sort].append(name)
        for sort in order:
            lines.append(f"  {' '.join(by_sort[sort])} : {sort}")
    if spec.rules:
        lines.append("RULES")
        for rule in spec.rules:
            line = f"  {format_term(rule.lhs)} -> {format_term(rule.rhs)}"
            if rule.condition is not None:
                left, right = rule.condition
                line += f" if {format_term(left)} -><- {format_term(right)}"
            lines.append(line)
    return "\n".join(lines) + "\n"
