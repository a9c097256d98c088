import pytest

from chtest.frontend import parse_program
from chtest.runtime import (DEFAULT_STEP_BUDGET, Interpreter, Status, constructor_only,
                            default_step_budget, discover_tests, dynamic_relevant_tests,
                            run_suite, run_test)

FOO_TEST = "method:FooBarTest.fooTest/0"


def single_test(body, extra=""):
    return parse_program(extra + "class XTest { void testIt() { " + body + " } }")


def outcome(body, extra="", **kw):
    return run_test(single_test(body, extra), "method:XTest.testIt/0", **kw)


def test_foobar_dispatches_to_bar(foobar):
    out = run_test(foobar, FOO_TEST)
    assert out.status is Status.PASS
    assert [(e.runtime_class, e.method, e.arity) for e in out.trace] == [("Bar", "foo", 0)]
    assert out.trace[0].resolved_class == "Bar"


def test_trivial_assert_has_empty_trace():
    out = outcome("assert 1 == 1;")
    assert out.status is Status.PASS and out.trace == ()


def test_abstract_without_override_is_an_error():
    extra = "class A { int f(); } "
    out = outcome("A a = new A(); int x = a.f();", extra)
    assert out.status is Status.ERROR and "unresolved dispatch" in out.message


def test_failed_assert():
    out = outcome("assert 1 == 2;")
    assert out.status is Status.FAIL


@pytest.mark.parametrize("body, msg", [
    ("int z = 0; int x = 5 / z;", "division by zero"),
    ("while (true) { }", "step budget"),
])
def test_runtime_faults(body, msg):
    out = outcome(body, step_budget=10_000)
    assert out.status is Status.ERROR and msg in out.message


def test_null_receiver():
    out = outcome("A a = null; int x = a.f();", "class A { int f() { return 1; } } ")
    assert out.status is Status.ERROR and "null" in out.message


def test_deep_recursion_is_stack_overflow():
    extra = "class R { int down(int n) { return down(n + 1); } } "
    out = outcome("R r = new R(); int x = r.down(0);", extra)
    assert out.status is Status.ERROR and "stack overflow" in out.message


@pytest.mark.parametrize("expr, value", [
    ("7 / 2", 3), ("-7 / 2", -3), ("7 / -2", -3), ("-7 / -2", 3),
    ("2147483647 + 1", -2147483648), ("-2147483647 - 2", 2147483647),
    ("65536 * 65536", 0), ("2147483648", -2147483648), ("-2147483648", -2147483648),
])
def test_int_arithmetic(expr, value):
    p = parse_program(f"class C {{ int v() {{ return {expr}; }} }}")
    assert Interpreter(p).invoke("C", "v") == value


def test_defaults_and_short_circuit():
    p = parse_program("""
        class D { int i; boolean b; D o;
          boolean check() { return i == 0 && !b && o == null; }
          boolean lazy() { return b && o.check(); } }""")
    interp = Interpreter(p)
    assert interp.invoke("D", "check") is True
    assert interp.invoke("D", "lazy") is False


def test_super_dispatch_is_traced():
    p = parse_program("""
        class A { int f() { return 1; } }
        class B extends A { int f() { return super.f() + 1; } }
        class BTest { void testF() { A b = new B(); assert b.f() == 2; } }""")
    out = run_test(p, "method:BTest.testF/0")
    assert out.status is Status.PASS
    assert [e.resolved_class for e in out.trace] == ["B", "A"]


def test_setup_runs_first_and_suite_isolation():
    p = parse_program("""
        class C { int n; void inc() { n = n + 1; } int get() { return n; } }
        class CTest { C c;
          void setUp() { c = new C(); }
          void testOne() { c.inc(); assert c.get() == 1; }
          void testTwo() { c.inc(); assert c.get() == 1; }
          void testBoom() { int z = 0; int x = 1 / z; } }""")
    out = run_suite(p)
    assert {t: o.status for t, o in out.items()} == {
        "method:CTest.testBoom/0": Status.ERROR,
        "method:CTest.testOne/0": Status.PASS,
        "method:CTest.testTwo/0": Status.PASS,
    }


def test_run_suite_on_nothing(foobar):
    assert run_suite(foobar, []) == {}
    assert run_suite(foobar) == {FOO_TEST: run_test(foobar, FOO_TEST)}


def test_discover_tests(foobar):
    assert discover_tests(foobar) == [FOO_TEST]


def test_determinism(foobar):
    a, b = run_test(foobar, FOO_TEST), run_test(foobar, FOO_TEST)
    assert a.to_json() == b.to_json()


def test_dynamic_relevance(foobar, type_code_after):
    assert dynamic_relevant_tests(foobar, "method:Bar.foo/0") == {FOO_TEST}
    assert dynamic_relevant_tests(foobar, "method:Foo.foo/0") == set()
    assert dynamic_relevant_tests(type_code_after, "method:Type1.getValue/0") == {
        "method:Test.testGetValue/0"}


def test_constructor_only_paths():
    p = parse_program("""
        class H { int v() { return 3; } }
        class K { int x; K() { H h = new H(); x = h.v(); } int get() { return x; } }
        class KTest { void testK() { K k = new K(); assert k.get() == 3; } }""")
    out = run_test(p, "method:KTest.testK/0")
    assert out.status is Status.PASS
    assert constructor_only(out, "method:H.v/0")
    assert constructor_only(out, "method:K.K/0")
    assert not constructor_only(out, "method:K.get/0")


def test_step_budget_env(monkeypatch):
    monkeypatch.delenv("CHTEST_STEP_BUDGET", raising=False)
    assert default_step_budget() == DEFAULT_STEP_BUDGET
    monkeypatch.setenv("CHTEST_STEP_BUDGET", "50")
    assert default_step_budget() == 50
    out = outcome("int i = 0; while (i < 100) { i = i + 1; }")
    assert out.status is Status.ERROR and "budget of 50" in out.message
    monkeypatch.setenv("CHTEST_STEP_BUDGET", "lots")
    with pytest.raises(ValueError):
        default_step_budget()
