from __future__ import annotations

import pytest

from recmaa.engine import (
    Budget,
    BudgetExceeded,
    COMPILED_AVAILABLE,
    Engine,
    Status,
    available_backends,
)
from recmaa.parser import parse_ground_term, parse_spec
from recmaa.terms import App, Spec, Term, TermError, Var, match_term, term_equal

BACKENDS = available_backends()


def norm(engine, spec, text, **kw):
    return engine.normalize(parse_ground_term(text, spec), **kw)


# --- a tiny reference normalizer (leftmost-outermost), test oracle only --------


def outermost_normalize(spec: Spec, term: Term, fuel: int = 200_000) -> Term:
    """Naive leftmost-outermost rewriting; test oracle for small terms only."""
    from recmaa.terms import apply_subst

    by_head: dict[str, list] = {}
    for rule in spec.rules:
        by_head.setdefault(rule.lhs.symbol.name, []).append(rule)

    def rewrite_once(t: Term) -> Term | None:
        if isinstance(t, Var):
            return None
        for rule in by_head.get(t.symbol.name, ()):
            sub = match_term(rule.lhs, t)
            if sub is None:
                continue
            if rule.condition is not None:
                left = outermost_normalize(spec, apply_subst(sub, rule.condition[0]), fuel)
                right = outermost_normalize(spec, apply_subst(sub, rule.condition[1]), fuel)
                if not term_equal(left, right):
                    continue
            return apply_subst(sub, rule.rhs)
        for i, arg in enumerate(t.args):
            new = rewrite_once(arg)
            if new is not None:
                args = list(t.args)
                args[i] = new
                return App(t.symbol, args)
        return None

    current = term
    while fuel > 0:
        fuel -= 1
        new = rewrite_once(current)
        if new is None:
            return current
        current = new
    raise RuntimeError("outermost oracle ran out of fuel")


# --- basic behaviour ------------------------------------------------------------


@pytest.mark.parametrize("backend", BACKENDS)
class TestNormalize:
    def test_single_step(self, spec, backend):
        eng = Engine(spec, backend=backend)
        r = norm(eng, spec, "andBool (true, false)")
        assert str(r.normal_form) == "false"
        assert r.rule_applications == 1
        assert not r.stuck

    def test_constant_unfolds(self, spec, backend):
        eng = Engine(spec, backend=backend)
        r = norm(eng, spec, "x00")
        assert str(r.normal_form) == "buildOctet (x0, x0, x0, x0, x0, x0, x0, x0)"

    def test_block_table_case(self, spec, backend):
        eng = Engine(spec, backend=backend)
        r = norm(eng, spec, "eqBlock (MUL1 (x0000000F, x0000000E), x000000D2)")
        assert str(r.normal_form) == "true"

    def test_conditional_rule_true_branch(self, spec, backend):
        eng = Engine(spec, backend=backend)
        r = norm(eng, spec, "makeMessage (succ (zero), x00000000, x00000001)")
        assert r.normal_form.symbol.name == "unitMessage"
        assert r.condition_evaluations >= 1

    def test_conditional_rule_false_branch(self, spec, backend):
        eng = Engine(spec, backend=backend)
        r = norm(eng, spec, "makeMessage (n3, x00000000, x00000001)")
        # unrolls to the three blocks 0, 1, 2
        expected = norm(
            eng,
            spec,
            "consMessage (x00000000, consMessage (x00000001,"
            " unitMessage (x00000002)))",
        ).normal_form
        assert term_equal(r.normal_form, expected)

    def test_rotate_twice_equals_four(self, spec, backend):
        eng = Engine(spec, backend=backend)
        a = norm(eng, spec, "nCYC (n2, x00000001)").normal_form
        b = norm(eng, spec, "x00000004").normal_form
        assert term_equal(a, b)

    def test_ground_precondition(self, spec, backend):
        eng = Engine(spec, backend=backend)
        with pytest.raises(TermError):
            eng.normalize(Var("W", "Block"))


@pytest.mark.parametrize("backend", BACKENDS)
class TestEvalBool:
    def test_pass(self, spec, backend):
        eng = Engine(spec, backend=backend)
        t = parse_ground_term("eqOctet (PAT (x00000000, x00000000), xFF)", spec)
        assert eng.eval_bool(t) is Status.PASS

    def test_fail(self, spec, backend):
        eng = Engine(spec, backend=backend)
        t = parse_ground_term("eqBit (x0, x1)", spec)
        assert eng.eval_bool(t) is Status.FAIL

    def test_budget_exceeded_status(self, spec, backend):
        eng = Engine(spec, backend=backend)
        t = parse_ground_term(
            "eqBlock (MAC (buildKey (x80018001, x80018000),"
            " makeMessage (n20, x00000000, x00000000)), xDB79FBDC)",
            spec,
        )
        assert eng.eval_bool(t, Budget(max_rewrites=100)) is Status.BUDGET_EXCEEDED

    def test_non_bool_rejected(self, spec, backend):
        eng = Engine(spec, backend=backend)
        with pytest.raises(TermError):
            eng.eval_bool(parse_ground_term("x00", spec))


class TestStuck:
    SPEC = """
    SORTS Nat
    CONS zero : -> Nat
         succ : Nat -> Nat
    OPNS pred : Nat -> Nat
         double : Nat -> Nat
         const : Nat -> Nat
    VARS N : Nat
    RULES
      pred (succ (N)) -> N
      double (zero) -> zero
      double (succ (N)) -> succ (succ (double (N)))
      const (N) -> zero
    """

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_stuck_flag_set(self, backend):
        spec = parse_spec([self.SPEC])
        eng = Engine(spec, backend=backend)
        r = eng.normalize(parse_ground_term("pred (zero)", spec))
        assert r.stuck
        assert str(r.normal_form) == "pred (zero)"

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_stuck_subterm_propagates(self, backend):
        spec = parse_spec([self.SPEC])
        eng = Engine(spec, backend=backend)
        r = eng.normalize(parse_ground_term("succ (pred (zero))", spec))
        assert r.stuck

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_stuck_subterm_erased_is_not_stuck(self, backend):
        spec = parse_spec([self.SPEC])
        eng = Engine(spec, backend=backend)
        r = eng.normalize(parse_ground_term("const (pred (zero))", spec))
        assert not r.stuck
        assert str(r.normal_form) == "zero"

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_eval_bool_stuck_status(self, backend):
        text = self.SPEC + """
        SORTS Bool
        CONS true : -> Bool
             false : -> Bool
        OPNS isZero : Nat -> Bool
        RULES
          isZero (zero) -> true
          isZero (succ (N)) -> false
        """
        spec = parse_spec([text])
        eng = Engine(spec, backend=backend)
        t = parse_ground_term("isZero (pred (zero))", spec)
        assert eng.eval_bool(t) is Status.STUCK


class TestBudgets:
    def test_budget_validation(self):
        with pytest.raises(ValueError):
            Budget(max_rewrites=0)
        with pytest.raises(ValueError):
            Budget(max_depth=-1)

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_partial_statistics(self, spec, backend):
        eng = Engine(spec, backend=backend)
        t = parse_ground_term("MUL1 (xC4EB1AEB, x89D635D7)", spec)
        with pytest.raises(BudgetExceeded) as err:
            eng.normalize(t, Budget(max_rewrites=50))
        assert err.value.kind == "rewrites"
        assert err.value.rule_applications == 51
        assert err.value.peak_term_size > 0

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_depth_budget(self, spec, backend):
        eng = Engine(spec, backend=backend)
        t = parse_ground_term("n4100", spec)
        with pytest.raises(BudgetExceeded) as err:
            eng.normalize(t, Budget(max_depth=20))
        assert err.value.kind == "depth"


class TestDeterminismAndMemo:
    @pytest.mark.parametrize("backend", BACKENDS)
    def test_repeated_runs_identical(self, spec, backend):
        t = parse_ground_term("eqBlock (MUL2 (xFFFFFFF0, xFFFFFFF1), x000000B6)", spec)
        results = [
            Engine(spec, backend=backend).normalize(t, memo=False) for _ in range(2)
        ]
        assert results[0].rule_applications == results[1].rule_applications
        assert term_equal(results[0].normal_form, results[1].normal_form)

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_memo_on_off_same_normal_form(self, spec, vector_cases, backend):
        sample = [t for c, t in vector_cases if c.id in (
            "tv1-005", "tv1-030", "tv2-010", "tv2-080", "tv3-005", "tv3-030",
            "tv4-010", "tv4-024",
        )]
        assert len(sample) == 8
        for term in sample:
            on = Engine(spec, backend=backend).normalize(term, memo=True)
            off = Engine(spec, backend=backend).normalize(term, memo=False)
            assert term_equal(on.normal_form, off.normal_form)

    def test_memo_cache_reset_on_overflow(self, spec):
        eng = Engine(spec, backend="pure", memo_limit=64)
        t = parse_ground_term("MUL1 (xC4EB1AEB, x89D635D7)", spec)
        eng.normalize(t)
        assert eng._kernel.memo_len() <= 64


@pytest.mark.skipif(not COMPILED_AVAILABLE, reason="extension not built")
class TestBackendParity:
    def test_identical_results_and_statistics(self, spec, vector_cases):
        sample = [t for c, t in vector_cases if c.id in (
            "tv1-001", "tv1-044", "tv2-033", "tv2-090", "tv3-001", "tv3-039",
            "tv4-001", "tv4-023",
        )]
        for term in sample:
            pure = Engine(spec, backend="pure").normalize(term)
            fast = Engine(spec, backend="compiled").normalize(term)
            assert term_equal(pure.normal_form, fast.normal_form)
            assert pure.rule_applications == fast.rule_applications
            assert pure.condition_evaluations == fast.condition_evaluations
            assert pure.peak_term_size == fast.peak_term_size
            assert pure.stuck == fast.stuck

    def test_parity_with_memo_off(self, spec, vector_cases):
        term = dict((c.id, t) for c, t in vector_cases)["tv2-001"]
        pure = Engine(spec, backend="pure").normalize(term, memo=False)
        fast = Engine(spec, backend="compiled").normalize(term, memo=False)
        assert pure.rule_applications == fast.rule_applications


class TestStrategyIrrelevance:
    """Outermost rewriting reaches the same normal forms (sampled, small)."""

    SAMPLES = [
        "andBool (orBool (true, false), andBool (true, true))",
        "eqBit (notBit (x0), x1)",
        "addNat (n2, n3)",
        "eqNat (multNat (n2, n3), n6)",
        "eqOctet (addOctet (x01, x02), x03)",
        "leftOctet3 (xFF)",
        "makeMessage (n2, x00000000, x00000001)",
        "nCYC (n2, x00000001)",
    ]

    @pytest.mark.parametrize("text", SAMPLES)
    def test_matches_innermost(self, spec, text):
        term = parse_ground_term(text, spec)
        inner = Engine(spec).normalize(term).normal_form
        outer = outermost_normalize(spec, term)
        assert term_equal(inner, outer)


class TestDeepChains:
    @pytest.mark.parametrize("backend", BACKENDS)
    def test_hundred_thousand_block_chain(self, spec, backend):
        # normalizing a deep chain must not smash the C stack
        depth = 100_000
        text = (
            "consMessage (x00000000, " * (depth - 1)
            + "unitMessage (x00000000)"
            + ")" * (depth - 1)
        )
        term = parse_ground_term(text, spec)
        eng = Engine(spec, backend=backend)
        r = eng.normalize(term)
        assert not r.stuck
        assert r.normal_form.symbol.name == "consMessage"
        assert r.peak_term_size >= depth
        # every occurrence of the shared block constant collapses into the
        # same arena node, so memoization reduces the whole chain to the
        # x00000000 and x00 unfolds
        assert r.rule_applications == 2
