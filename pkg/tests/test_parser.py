from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from recmaa.parser import (
    ParseError,
    SourceFragment,
    format_spec,
    parse_ground_term,
    parse_spec,
)
from recmaa.terms import App, Var

BOOL_PART = """
SORTS
  Bool
CONS
  false : -> Bool
  true : -> Bool
OPNS
  andBool : Bool Bool -> Bool
  orBool : Bool Bool -> Bool
VARS
  L : Bool
RULES
  andBool (false, L) -> false
  andBool (true, L) -> L

  orBool (false, L) -> L
  orBool (true, L) -> true
"""


class TestBasicParsing:
    def test_bool_fragment(self):
        spec = parse_spec([BOOL_PART])
        assert spec.sorts == ("Bool",)
        assert [s.name for s in spec.constructors()] == ["false", "true"]
        assert [s.name for s in spec.defined_symbols()] == ["andBool", "orBool"]
        assert len(spec.rules) == 4
        assert spec.rules[0].origin_index == 0
        # first rule: andBool (false, L) -> false
        lhs = spec.rules[0].lhs
        assert lhs.symbol.name == "andBool"
        assert isinstance(lhs.args[1], Var)

    def test_sections_repeatable_and_merged(self):
        spec = parse_spec(
            [
                "SORTS A SORTS B CONS a : -> A",
                SourceFragment("second", "CONS b : -> B\nVARS X : A\nVARS Y : B"),
            ]
        )
        assert spec.sorts == ("A", "B")
        assert set(spec.symbols) == {"a", "b"}
        assert spec.var_decls == {"X": "A", "Y": "B"}

    def test_rules_resolve_against_later_fragments(self):
        # a rule may use symbols declared only in a later fragment
        first = "SORTS A CONS a : -> A OPNS f : A -> A RULES f (X) -> g (X)"
        second = "OPNS g : A -> A VARS X : A"
        spec = parse_spec([first, second])
        assert spec.rules[0].rhs.symbol.name == "g"

    def test_semicolons_as_argument_separators(self):
        text = """
        SORTS A
        CONS a : -> A
        OPNS f : A A A -> A
        VARS X Y Z : A
        RULES
          f (X; Y, Z) -> f (X, Y; Z)
        """
        spec = parse_spec([text])
        assert len(spec.rules) == 1

    def test_comments_and_line_breaks(self):
        text = """
        # leading comment
        SORTS A -- trailing comment
        CONS a : -> A
        OPNS f : A
              A -> A   # signature split across lines
        VARS X : A
        RULES
          f (X,
             a) -> X
        """
        spec = parse_spec([text])
        assert spec.symbols["f"].arity == 2

    def test_conditional_rule(self):
        text = """
        SORTS Bool Nat
        CONS true : -> Bool
             false : -> Bool
             zero : -> Nat
             succ : Nat -> Nat
        OPNS eqNat : Nat Nat -> Bool
             half : Nat -> Nat
        VARS N : Nat
        RULES
          eqNat (zero, zero) -> true
          eqNat (zero, succ (N)) -> false
          eqNat (succ (N), zero) -> false
          half (N) -> zero if eqNat (N, zero) -><- true
        """
        spec = parse_spec([text])
        rule = spec.rules[-1]
        assert rule.condition is not None
        assert rule.condition[0].symbol.name == "eqNat"
        assert rule.condition[1].symbol.name == "true"


class TestErrors:
    def expect_error(self, text, needle):
        with pytest.raises(ParseError) as err:
            parse_spec([text])
        assert needle in str(err.value), str(err.value)
        assert err.value.line >= 1 and err.value.column >= 1

    def test_constructor_headed_rule(self):
        self.expect_error(
            "SORTS Bool CONS false : -> Bool true : -> Bool RULES true -> false",
            "headed by the constructor",
        )

    def test_unknown_sort(self):
        self.expect_error("CONS a : -> Mystery", "unknown sort")

    def test_duplicate_symbol_different_signature(self):
        self.expect_error(
            "SORTS A B CONS a : -> A OPNS a : A -> B", "different signature"
        )

    def test_variable_redeclared_at_other_sort(self):
        self.expect_error("SORTS A B VARS X : A VARS X : B", "redeclared at sort")

    def test_free_rhs_variable(self):
        self.expect_error(
            "SORTS A CONS a : -> A OPNS f : A -> A VARS X Y : A RULES f (X) -> Y",
            "not in the left-hand side",
        )

    def test_free_condition_variable(self):
        self.expect_error(
            "SORTS A CONS a : -> A OPNS f : A -> A VARS X Y : A "
            "RULES f (X) -> X if Y -><- a",
            "condition uses variable",
        )

    def test_rule_sort_mismatch(self):
        self.expect_error(
            "SORTS A B CONS a : -> A b : -> B OPNS f : A -> A VARS X : A "
            "RULES f (X) -> b",
            "rewrites sort",
        )

    def test_arity_mismatch(self):
        self.expect_error(
            "SORTS A CONS a : -> A OPNS f : A A -> A VARS X : A RULES f (X) -> X",
            "expects 2 argument",
        )

    def test_argument_sort_mismatch(self):
        self.expect_error(
            "SORTS A B CONS a : -> A b : -> B OPNS f : B -> A RULES f (a) -> f (b)",
            "has sort A, expected B",
        )

    def test_stray_punctuation(self):
        self.expect_error("SORTS A RULES @", "unexpected character")

    def test_reserved_word_in_term(self):
        self.expect_error(
            "SORTS A CONS a : -> A OPNS f : A -> A VARS X : A RULES f (if) -> a",
            "reserved word",
        )

    def test_error_location_is_precise(self):
        text = "SORTS A\nCONS a : -> A\nOPNS f : A -> A\nRULES\n  f (oops) -> a\n"
        with pytest.raises(ParseError) as err:
            parse_spec([text])
        assert err.value.line == 5
        assert err.value.context == "oops"

    def test_duplicate_rule_warning(self):
        text = BOOL_PART + "\nRULES andBool (false, L) -> false\n"
        warnings: list[str] = []
        spec = parse_spec([text], on_warning=warnings.append)
        assert len(spec.rules) == 5
        assert len(warnings) == 1 and "duplicates" in warnings[0]


class TestGroundTerms:
    def test_parse_and_sort(self, spec):
        term = parse_ground_term(
            "eqBlock (MUL1 (x0000000F, x0000000E), x000000D2)", spec
        )
        assert term.sort == "Bool"
        assert isinstance(term, App)

    def test_nullary(self, spec):
        assert parse_ground_term("true", spec).sort == "Bool"

    def test_arity_error(self, spec):
        with pytest.raises(ParseError):
            parse_ground_term("eqBlock (x00)", spec)

    def test_variables_rejected(self, spec):
        with pytest.raises(ParseError) as err:
            parse_ground_term("andBool (L, true)", spec)
        assert "not allowed in a ground term" in str(err.value)

    def test_unknown_symbol(self, spec):
        with pytest.raises(ParseError):
            parse_ground_term("nonsense (true)", spec)

    def test_trailing_garbage(self, spec):
        with pytest.raises(ParseError):
            parse_ground_term("true false", spec)

    def test_deep_nesting_no_stack_overflow(self, spec):
        depth = 100_000
        text = "succ (" * depth + "zero" + ")" * depth
        term = parse_ground_term(text, spec)
        assert term.symbol.name == "succ"


class TestRoundTrip:
    def test_corpus_roundtrip(self, spec):
        text = format_spec(spec)
        again = parse_spec([SourceFragment("printed", text)])
        assert again.sorts == spec.sorts
        assert again.symbols == spec.symbols
        assert again.var_decls == spec.var_decls
        assert again.rules == spec.rules  # includes order via origin_index

    def test_small_roundtrip(self):
        spec = parse_spec([BOOL_PART])
        again = parse_spec([format_spec(spec)])
        assert again == spec


class TestTotality:
    @settings(max_examples=300, deadline=None)
    @given(st.text(max_size=200))
    def test_random_text_never_crashes(self, text):
        try:
            parse_spec([text])
        except ParseError as err:
            assert err.line >= 1 and err.column >= 1

    @settings(max_examples=200, deadline=None)
    @given(st.binary(max_size=120))
    def test_random_bytes_never_crash(self, data):
        text = data.decode("latin-1")
        try:
            parse_spec([text])
        except ParseError:
            pass

    def test_seeded_fuzz_corpus_like(self):
        rng = random.Random(7)
        tokens = [
            "SORTS", "CONS", "OPNS", "VARS", "RULES", "if", "-><-", "->", ":",
            "(", ")", ",", ";", "Bool", "true", "andBool", "x00", "L", "#", "--",
            "\n", " ",
        ]
        for _ in range(2000):
            text = "".join(rng.choice(tokens) for _ in range(rng.randint(0, 40)))
            try:
                parse_spec([text])
            except ParseError:
                pass
