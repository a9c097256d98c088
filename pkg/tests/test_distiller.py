from hypothesis import given, settings, strategies as st

from chtest.corpus import evolve, generate_program
from chtest.distiller import (DeltaSummary, describe_delta, distill_delta, distill_history,
                              distill_initial)
from chtest.frontend import parse_program, parse_snapshot
from chtest.model import ChangeKind, ChangeModel, ResolutionMode, SubjectKind
from chtest.selector import Selector

from conftest import FIXTURES


def listing(changes):
    return [(c.kind, c.subjectId) for c in changes]


def test_initial_orders_containers_first(foobar):
    m = distill_initial(foobar, ResolutionMode.static())
    kinds = [m.subjects[c.subjectId].kind for c in m]
    assert kinds == sorted(kinds, key=[SubjectKind.CLASS, SubjectKind.METHOD,
                                       SubjectKind.INVOCATION].index)
    assert all(c.kind is ChangeKind.ADD for c in m)


def test_empty_program_gives_empty_model():
    assert len(distill_initial(parse_snapshot({}))) == 0


def test_type_code_refactoring_delta(type_code_before, type_code_after):
    m = distill_initial(type_code_before, ResolutionMode.poly())
    delta = distill_delta(m, type_code_before, type_code_after)
    assert listing(delta) == [
        (ChangeKind.REMOVE, "inv:Base.getValue/0#Base.getType1Value/0#0"),
        (ChangeKind.REMOVE, "inv:Base.getValue/0#Base.getType2Value/0#0"),
        (ChangeKind.ADD, "method:Type1.getValue/0"),
        (ChangeKind.ADD, "method:Type2.getValue/0"),
        (ChangeKind.MODIFY, "method:Base.getValue/0"),
        (ChangeKind.ADD, "inv:Type1.getValue/0#Type1.getType1Value/0#0"),
        (ChangeKind.ADD, "inv:Type2.getValue/0#Type2.getType2Value/0#0"),
    ]
    assert m.subjects["method:Base.getValue/0"].isAbstract
    assert DeltaSummary.of(delta) == DeltaSummary(added=4, modified=1, removed=2)
    assert describe_delta(delta).startswith("7 changes: 4 added, 1 modified, 2 removed")


def test_identical_snapshots_give_empty_delta(foobar):
    m = distill_initial(foobar, ResolutionMode.static())
    assert distill_delta(m, foobar, foobar) == []


def test_removing_a_class_removes_its_methods_first():
    src = (FIXTURES / "fig2" / "FooBar.moo").read_text()
    old = parse_program(src)
    new = parse_program(src.split("class Bar")[0])
    m = distill_initial(old, ResolutionMode.static())
    delta = distill_delta(m, old, new)
    assert listing(delta) == [(ChangeKind.REMOVE, "method:Bar.foo/0"),
                              (ChangeKind.REMOVE, "class:Bar")]
    assert set(m.alive_subjects()) == {"class:Foo", "method:Foo.foo/0"}


def test_superclass_change_is_a_class_modify():
    old = parse_program("class A {} class B {} class C extends A {}")
    new = parse_program("class A {} class B {} class C extends B {}")
    m = distill_initial(old, ResolutionMode.static())
    assert listing(distill_delta(m, old, new)) == [(ChangeKind.MODIFY, "class:C")]
    assert m.subjects["class:C"].superclassId == "class:B"


def test_base_must_match_model(foobar, type_code_before):
    import pytest
    from chtest.distiller import InconsistentBase
    m = distill_initial(foobar, ResolutionMode.static())
    with pytest.raises(InconsistentBase):
        distill_delta(m, type_code_before, foobar)


def test_history_of_no_snapshots():
    assert distill_history([]) == ChangeModel()


def _answers(model):
    sel = Selector(model)
    methods = sorted(s for s, sub in model.alive_subjects().items()
                     if sub.kind is SubjectKind.METHOD)
    return dict(zip(methods, sel.tests_for_methods(methods))) if methods else {}


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=100_000), st.booleans(), st.booleans())
def test_initial_and_delta_agree(seed, poly, ctors):
    mode = ResolutionMode.poly(ctors) if poly else ResolutionMode.static(ctors)
    old = generate_program(seed)
    new = evolve(old, seed, steps=4)
    incremental = distill_initial(old, mode)
    distill_delta(incremental, old, new)
    fresh = distill_initial(new, mode)
    assert incremental.alive_subjects() == fresh.alive_subjects()
    assert _answers(incremental) == _answers(fresh)


@settings(max_examples=15, deadline=None)
@given(st.integers(min_value=0, max_value=100_000))
def test_delta_of_a_delta_is_empty(seed):
    old = generate_program(seed)
    new = evolve(old, seed)
    m = distill_initial(old)
    distill_delta(m, old, new)
    assert distill_delta(m, new, new) == []


def test_signature_change_is_a_method_modify():
    old = parse_program("class A { int f(int x) { return x; } }")
    new = parse_program("class A { int f(boolean x) { return 1; } }")
    m = distill_initial(old)
    assert listing(distill_delta(m, old, new)) == [(ChangeKind.MODIFY, "method:A.f/1")]
    renamed = parse_program("class A { int f(int y) { return y; } }")
    m = distill_initial(old)
    assert listing(distill_delta(m, old, renamed)) == [(ChangeKind.MODIFY, "method:A.f/1")]
