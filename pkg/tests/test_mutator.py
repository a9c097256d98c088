import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chtest.corpus import generate_program
from chtest.frontend import ast as A
from chtest.frontend import parse_program, program_to_str
from chtest.mutator import (BaselineFailure, KillMatrix, Mutant, Operator, apply_mutant,
                            build_kill_matrix, classify, compare_suites, generate_mutants,
                            mutation_coverage)
from chtest.runtime import Status, discover_tests, run_suite

from conftest import FIXTURES, fixture_program

ALL_FIXTURES = sorted(p.name for p in FIXTURES.iterdir() if p.is_dir())


def ops(mutants):
    return sorted(m.operator.value for m in mutants)


def test_sum_has_two_mutants():
    p = parse_program("class C { int add(int a, int b) { return a + b; } }")
    ms = generate_mutants(p)
    assert ops(ms) == ["ArithmeticReplace", "ReturnValueMutate"]
    bodies = {m.operator: program_to_str(apply_mutant(p, m)) for m in ms}
    assert "return a - b;" in bodies[Operator.ARITHMETIC_REPLACE]
    assert "return a + b + 1;" in bodies[Operator.RETURN_VALUE_MUTATE]


def test_empty_body_has_no_mutants():
    assert generate_mutants(parse_program("class C { void m() { } }")) == []


def test_dispatch_conditional_is_negated(type_code_before):
    ms = [m for m in generate_mutants(type_code_before) if m.targetMethod == "method:Base.getValue/0"]
    assert any(m.operator is Operator.CONDITIONAL_NEGATE and m.description == "== -> !="
               for m in ms)


def test_boolean_operators():
    p = parse_program("class C { boolean f(int x) { return x < 3 || true; } }")
    assert ops(generate_mutants(p)) == ["BooleanLiteralFlip", "BoundaryShift",
                                        "ConditionalNegate", "ReturnValueMutate"]
    rv = next(m for m in generate_mutants(p) if m.operator is Operator.RETURN_VALUE_MUTATE)
    assert "return !(x < 3 || true);" in program_to_str(apply_mutant(p, rv))


def test_test_classes_are_not_mutated(foobar):
    assert {m.targetClass for m in generate_mutants(foobar)} == {"Foo", "Bar"}
    assert generate_mutants(foobar, scope=["Bar"])[0].targetClass == "Bar"


def test_apply_leaves_original_alone(foobar):
    before = program_to_str(foobar)
    for m in generate_mutants(foobar):
        apply_mutant(foobar, m)
    assert program_to_str(foobar) == before


@pytest.mark.parametrize("name", ALL_FIXTURES)
def test_every_mutant_is_a_valid_program(name):
    p = fixture_program(name)
    for m in generate_mutants(p):
        mutated = program_to_str(apply_mutant(p, m))
        assert mutated != program_to_str(p)
        parse_program(mutated)


def test_kill_matrix_foobar(foobar):
    km = build_kill_matrix(foobar, generate_mutants(foobar))
    assert km.tests == ["method:FooBarTest.fooTest/0"]
    assert km.killed[:, 0].tolist() == [True, False]  # Bar.foo killed, Foo.foo never runs
    assert km.covered_classes(km.tests) == {"Bar"}


def test_baseline_failure():
    p = parse_program("class C { int one() { return 1; } } "
                      "class CTest { void testOne() { C c = new C(); assert c.one() == 2; } }")
    with pytest.raises(BaselineFailure) as e:
        build_kill_matrix(p, generate_mutants(p))
    assert "method:CTest.testOne/0" in e.value.failing


def test_error_counts_as_a_kill():
    p = parse_program("""
        class C { int div(int a) { return 10 / (a - 1); } }
        class CTest { void testDiv() { C c = new C(); assert c.div(3) == 5; } }""")
    ms = generate_mutants(p)
    km = build_kill_matrix(p, ms)
    minus = next(i for i, m in enumerate(ms) if m.description == "- -> +")
    assert km.killed[minus, 0]


def _synthetic(n_mutants, n_killed, cls="Pmd"):
    span = A.Span("synthetic", 1, 1)
    mutants = [Mutant(f"{cls}.m/0#{i}", cls, f"method:{cls}.m/0",
                      Operator.ARITHMETIC_REPLACE, span, ()) for i in range(n_mutants)]
    killed = np.zeros((n_mutants, 1), dtype=bool)
    killed[:n_killed, 0] = True
    return KillMatrix(mutants, ["method:PmdTest.t/0"], killed,
                      {"method:PmdTest.t/0": frozenset({cls})})


def test_coverage_formula():
    cov = mutation_coverage(_synthetic(4908, 2327), ["method:PmdTest.t/0"])
    assert (cov.killed, cov.introduced, cov.uncovered) == (2327, 4908, 0)
    assert round(cov.ratio, 3) == 0.474


def test_coverage_all_killed_and_empty_suite():
    km = _synthetic(5, 5)
    assert mutation_coverage(km, km.tests).ratio == 1.0
    empty = mutation_coverage(km, [])
    assert (empty.killed, empty.introduced, empty.uncovered, empty.ratio) == (0, 0, 5, 0.0)


@pytest.mark.parametrize("a, b, label", [(1, 2, "improved"), (2, 2, "same"), (3, 1, "worsened")])
def test_classify(a, b, label):
    assert classify(a, b) == label


def test_full_as_reduced_is_all_same():
    p = fixture_program("dispatch_heavy")
    tests = discover_tests(p)
    km = build_kill_matrix(p, generate_mutants(p), tests)
    every = {c: {"class:" + t.split(":")[1].split(".")[0] for t in tests}
             for c in {m.targetClass for m in km.mutants}}
    report = compare_suites(km, tests, every, every)
    assert report.killed_difference == 0
    assert all(r.classification == "same" for r in report.rows)
    assert all(r.killed_a == r.killed_full for r in report.rows)


def test_suite_without_tests():
    p = parse_program("class C { int one() { return 1; } }")
    km = build_kill_matrix(p, generate_mutants(p))
    report = compare_suites(km, [], {}, {})
    assert report.rows == [] and report.uncovered_mutants == report.total_mutants == 1


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=100_000), st.data())
def test_subset_kill_monotonicity(seed, data):
    p = generate_program(seed)
    km = build_kill_matrix(p, generate_mutants(p), step_budget=20_000)
    full = km.tests
    small = data.draw(st.lists(st.sampled_from(full), unique=True) if full else st.just([]))
    big = sorted(set(small) | set(data.draw(st.lists(st.sampled_from(full), unique=True)
                                             if full else st.just([]))))
    assert km.kills(small) <= km.kills(big) <= km.kills(full)
    for cls in {m.targetClass for m in km.mutants}:
        assert mutation_coverage(km, small, [cls]).ratio <= mutation_coverage(km, full, [cls]).ratio


def test_kill_requires_pass_to_fail():
    p = fixture_program("dispatch_heavy")
    km = build_kill_matrix(p, generate_mutants(p))
    base = run_suite(p)
    for i, m in enumerate(km.mutants):
        out = run_suite(apply_mutant(p, m))
        for j, t in enumerate(km.tests):
            assert km.killed[i, j] == (base[t].status is Status.PASS
                                       and out[t].status is not Status.PASS)
