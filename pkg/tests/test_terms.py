from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from recmaa.terms import (
    App,
    Rule,
    Spec,
    SpecError,
    Symbol,
    TermError,
    UnboundVariableError,
    Var,
    apply_subst,
    format_term,
    is_ground,
    match_term,
    sort_of_term,
    term_equal,
    term_size,
    variables_of,
)

BOOL = "Bool"
NAT = "Nat"

FALSE = Symbol("false", (), BOOL, constructor=True)
TRUE = Symbol("true", (), BOOL, constructor=True)
ZERO = Symbol("zero", (), NAT, constructor=True)
SUCC = Symbol("succ", (NAT,), NAT, constructor=True)
AND = Symbol("andBool", (BOOL, BOOL), BOOL)
ADD = Symbol("addNat", (NAT, NAT), NAT)

F = App(FALSE)
T = App(TRUE)
Z = App(ZERO)


def s(term):
    return App(SUCC, [term])


def num(n):
    t = Z
    for _ in range(n):
        t = s(t)
    return t


class TestConstruction:
    def test_arity_violation_rejected(self):
        with pytest.raises(TermError):
            App(AND, [T])
        with pytest.raises(TermError):
            App(ZERO, [T])

    def test_sort_violation_rejected(self):
        with pytest.raises(TermError):
            App(SUCC, [T])
        with pytest.raises(TermError):
            App(AND, [T, Z])

    def test_var_sort_accepted(self):
        t = App(AND, [Var("L", BOOL), T])
        assert t.sort == BOOL

    def test_invalid_variable_name(self):
        with pytest.raises(TermError):
            Var("", BOOL)
        with pytest.raises(TermError):
            Var("a-b", BOOL)

    def test_primed_and_quoted_names(self):
        # the corpus uses B'1 and B"2 style variables
        assert Var("B'1", BOOL).name == "B'1"
        assert Var('B"2', BOOL).name == 'B"2'


class TestMatch:
    def test_bind_variable(self):
        # andBool (false, L) against andBool (false, true)
        pat = App(AND, [F, Var("L", BOOL)])
        subject = App(AND, [F, T])
        assert match_term(pat, subject) == {"L": T}

    def test_nullary_self_match(self):
        assert match_term(Z, Z) == {}

    def test_head_mismatch(self):
        pat = App(AND, [T, Var("L", BOOL)])
        subject = App(AND, [F, T])
        assert match_term(pat, subject) is None

    def test_nonlinear_pattern(self):
        pat = App(ADD, [Var("N", NAT), Var("N", NAT)])
        assert match_term(pat, App(ADD, [num(2), num(2)])) == {"N": num(2)}
        assert match_term(pat, App(ADD, [num(2), num(3)])) is None

    def test_match_result_applies_back(self):
        pat = App(ADD, [s(Var("N", NAT)), Var("N'", NAT)])
        subject = App(ADD, [num(3), num(1)])
        sub = match_term(pat, subject)
        assert sub is not None
        assert term_equal(apply_subst(sub, pat), subject)


class TestApplySubst:
    def test_single_variable(self):
        assert apply_subst({"L": T}, Var("L", BOOL)) == T

    def test_identity_on_ground(self):
        assert apply_subst({}, Z) is Z

    def test_hand_substitution(self):
        # {N -> zero, N' -> succ(zero)} on addNat (succ (N), N')
        term = App(ADD, [s(Var("N", NAT)), Var("N'", NAT)])
        expected = App(ADD, [s(Z), s(Z)])
        got = apply_subst({"N": Z, "N'": s(Z)}, term)
        assert term_equal(got, expected)
        assert is_ground(got)

    def test_unbound_variable_rejected(self):
        with pytest.raises(UnboundVariableError):
            apply_subst({}, Var("L", BOOL))


class TestEquality:
    def test_basic(self):
        assert term_equal(Z, Z)
        assert not term_equal(Z, s(Z))
        assert term_equal(num(5), num(5))

    def test_shared_vs_rebuilt(self):
        a = App(ADD, [num(3), num(3)])
        b = App(ADD, [num(3), num(3)])
        assert a is not b and term_equal(a, b)
        assert hash(a) == hash(b)


class TestDeepTerms:
    def test_no_native_recursion(self):
        deep = num(200_000)
        assert term_size(deep) == 200_001
        assert is_ground(deep)
        assert term_equal(deep, num(200_000))
        assert match_term(Var("N", NAT), deep) == {"N": deep}
        # formatting a huge term must not recurse either
        assert format_term(deep, max_len=50).endswith("...")


class TestSpecValidation:
    def symbols(self):
        return {sym.name: sym for sym in (FALSE, TRUE, ZERO, SUCC, AND, ADD)}

    def test_accepts_good_spec(self):
        rule = Rule(App(AND, [F, Var("L", BOOL)]), F, origin_index=0)
        spec = Spec((BOOL, NAT), self.symbols(), {"L": BOOL}, (rule,))
        assert spec.symbol("andBool").arity == 2

    def test_duplicate_sort_rejected(self):
        with pytest.raises(SpecError):
            Spec((BOOL, BOOL), {}, {})

    def test_undeclared_sort_rejected(self):
        with pytest.raises(SpecError):
            Spec((BOOL,), {"succ": SUCC}, {})

    def test_symbol_variable_collision_rejected(self):
        with pytest.raises(SpecError):
            Spec((BOOL,), {"true": TRUE}, {"true": BOOL})

    def test_rule_sort_mismatch_rejected(self):
        with pytest.raises(SpecError):
            Rule(App(ADD, [Z, Z]), T)

    def test_lhs_must_be_application(self):
        with pytest.raises(SpecError):
            Rule(Var("N", NAT), Z)

    def test_sort_of_term(self):
        spec = Spec((BOOL, NAT), self.symbols(), {})
        assert sort_of_term(T, spec) == BOOL
        assert sort_of_term(num(2), spec) == NAT
        assert sort_of_term(Var("N", NAT), spec) == NAT
        foreign = Symbol("mystery", (), BOOL)
        with pytest.raises(SpecError):
            sort_of_term(App(foreign), spec)


# --- property tests -----------------------------------------------------------

_nat_terms = st.recursive(
    st.just(Z),
    lambda child: st.builds(lambda t: s(t), child),
    max_leaves=20,
)

_nat_exprs = st.recursive(
    st.one_of(st.just(Z), st.builds(lambda n: Var(f"v{n}", NAT), st.integers(0, 3))),
    lambda child: st.one_of(
        st.builds(lambda t: s(t), child),
        st.builds(lambda a, b: App(ADD, [a, b]), child, child),
    ),
    max_leaves=12,
)


@given(pattern=_nat_exprs, subject=_nat_exprs.filter(is_ground))
def test_match_apply_roundtrip(pattern, subject):
    sub = match_term(pattern, subject)
    if sub is not None:
        assert term_equal(apply_subst(sub, pattern), subject)


@given(a=_nat_terms, b=_nat_terms, c=_nat_terms)
def test_equality_is_equivalence(a, b, c):
    assert term_equal(a, a)
    assert term_equal(a, b) == term_equal(b, a)
    if term_equal(a, b) and term_equal(b, c):
        assert term_equal(a, c)


@given(t=_nat_exprs)
def test_variables_of_agrees_with_groundness(t):
    assert is_ground(t) == (not variables_of(t))
