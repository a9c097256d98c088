import pytest
from hypothesis import given, settings, strategies as st

from chtest._kernels import reach_many_py
from chtest.config import TestConfig
from chtest.corpus import generate_program
from chtest.distiller import distill_initial
from chtest.frontend import parse_program
from chtest.model import ChangeKind, ResolutionMode, SubjectKind, record_change
from chtest.selector import (CallerGraph, EmptyFullSuite, Selector, UnknownClass, reduction_ratio,
                             select_for_class, select_relevant_tests,
                             select_relevant_tests_reference)
from chtest import selector

from conftest import fixture_model

FOO_TEST = "method:FooBarTest.fooTest/0"
TYPE_TEST = "method:Test.testGetValue/0"


def modify(model, sid):
    return record_change(model, ChangeKind.MODIFY, model.subjects[sid])


@pytest.mark.parametrize("mode, expected", [("static", set()), ("poly", {FOO_TEST})])
def test_foobar_bar_foo(mode, expected):
    m = fixture_model("fig2", mode)
    c = modify(m, "method:Bar.foo/0")
    assert select_relevant_tests(m, [c]).per_change == {c.changeId: frozenset(expected)}


@pytest.mark.parametrize("mode", ["static", "poly"])
def test_foobar_foo_foo(mode):
    m = fixture_model("fig2", mode)
    c = modify(m, "method:Foo.foo/0")
    assert select_relevant_tests(m, [c]).per_change[c.changeId] == {FOO_TEST}


def test_no_changes_no_answer():
    assert select_relevant_tests(fixture_model("fig2"), []).per_change == {}


@pytest.mark.parametrize("mode", ["static", "poly"])
def test_type_code_before(mode):
    m = fixture_model("fig4_before", mode)
    c = modify(m, "method:Base.getValue/0")
    assert select_relevant_tests(m, [c]).per_change[c.changeId] == {TYPE_TEST}


@pytest.mark.parametrize("mode, expected", [("static", set()), ("poly", {TYPE_TEST})])
def test_type_code_after(mode, expected):
    m = fixture_model("fig4_after", mode)
    c = modify(m, "method:Type1.getValue/0")
    assert select_relevant_tests(m, [c]).per_change[c.changeId] == expected


def test_select_for_class():
    assert select_for_class(fixture_model("fig2", "poly"), "Bar") == {"class:FooBarTest"}
    assert select_for_class(fixture_model("fig2", "static"), "Bar") == set()


def test_select_for_class_without_methods():
    m = distill_initial(parse_program("class Empty {}"))
    assert select_for_class(m, "Empty") == set()


def test_unknown_class():
    with pytest.raises(UnknownClass):
        select_for_class(fixture_model("fig2"), "Nope")


def test_change_inside_a_test_selects_it():
    m = fixture_model("fig2")
    c = modify(m, FOO_TEST)
    assert select_relevant_tests(m, [c]).per_change[c.changeId] == {FOO_TEST}


def test_setup_change_selects_the_whole_class():
    m = fixture_model("fig2")
    c = modify(m, "method:FooBarTest.SetUp/0")
    assert select_relevant_tests(m, [c]).per_change[c.changeId] == {FOO_TEST}


def test_removed_subject_selects_nothing_with_a_note():
    m = fixture_model("fig2")
    inv = "inv:FooBarTest.fooTest/0#Foo.foo/0#0"
    c = record_change(m, ChangeKind.REMOVE, m.subjects[inv])
    res = select_relevant_tests(m, [c])
    assert res.per_change[c.changeId] == frozenset()
    assert any("not alive" in d for d in res.diagnostics)


def test_recursion_terminates_and_is_reported():
    p = parse_program("""
        class A { int f(int n) { if (n > 0) { return g(n - 1); } return 0; }
                  int g(int n) { return f(n); } }
        class ATest { void testF() { A a = new A(); assert a.f(3) == 0; } }""")
    m = distill_initial(p)
    c = modify(m, "method:A.g/1")
    res = select_relevant_tests(m, [c])
    assert res.per_change[c.changeId] == {"method:ATest.testF/0"}
    assert any("cycle" in d for d in res.diagnostics)


def test_class_level_change_aggregates_methods():
    m = fixture_model("fig2", "poly")
    c = modify(m, "class:Bar")
    assert select_relevant_tests(m, [c]).per_change[c.changeId] == {FOO_TEST}


def test_custom_patterns():
    p = parse_program("""
        class Foo { int foo() { return 1; } }
        class FooSpec { void checkFoo() { Foo f = new Foo(); assert f.foo() == 1; } }""")
    cfg = TestConfig(test_class_pattern="Spec$", test_method_pattern="^check")
    m = distill_initial(p, cfg=cfg)
    c = modify(m, "method:Foo.foo/0")
    assert select_relevant_tests(m, [c], cfg).per_change[c.changeId] == {
        "method:FooSpec.checkFoo/0"}
    assert select_relevant_tests(m, [c]).per_change[c.changeId] == frozenset()


def test_suite_listing():
    m = fixture_model("dispatch_heavy")
    assert len(selector.test_methods(m)) == 8
    assert selector.test_classes(m) == ["class:CalculatorTest", "class:CounterTest", "class:ShapeTest",
                               "class:TriangleTest"]


@pytest.mark.parametrize("full, reduced, ratio", [
    ({"a", "b"}, {"a", "b"}, 1.0),
    ({"a", "b"}, set(), 0.0),
    ({"a", "b", "c", "d"}, {"c"}, 0.25),
])
def test_reduction_ratio(full, reduced, ratio):
    assert reduction_ratio(full, reduced) == ratio


def test_reduction_ratio_errors():
    with pytest.raises(EmptyFullSuite):
        reduction_ratio(set(), set())
    with pytest.raises(ValueError):
        reduction_ratio({"a"}, {"b"})


def _all_method_changes(model):
    return [c for c in model if c.kind is ChangeKind.ADD
            and model.subjects[c.subjectId].kind is SubjectKind.METHOD]


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=100_000), st.sampled_from(["static", "poly"]))
def test_kernel_agrees_with_reference(seed, mode):
    m = distill_initial(generate_program(seed),
                        ResolutionMode.poly() if mode == "poly" else ResolutionMode.static())
    changes = _all_method_changes(m)
    assert select_relevant_tests(m, changes).per_change == select_relevant_tests_reference(m, changes)


@settings(max_examples=15, deadline=None)
@given(st.integers(min_value=0, max_value=100_000))
def test_compiled_and_python_kernels_agree(seed):
    g = CallerGraph(distill_initial(generate_program(seed), ResolutionMode.poly()))
    starts = list(range(len(g.nodes)))
    fast = g.reach(starts)
    ptr, nodes = reach_many_py(g.indptr, g.indices, g.terminal, starts)
    for k, row in enumerate(fast):
        assert row.tolist() == nodes[ptr[k]:ptr[k + 1]].tolist()


def test_selector_answers_are_stable():
    m = fixture_model("dispatch_heavy", "poly")
    changes = _all_method_changes(m)
    assert Selector(m).select(changes).to_json() == Selector(m).select(changes).to_json()
