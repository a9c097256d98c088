from hypothesis import given, settings, strategies as st

from chtest.corpus import CorpusConfig, evolve, generate_program, generate_source
from chtest.frontend import program_to_str
from chtest.runtime import Status, run_suite

seeds = st.integers(min_value=0, max_value=1_000_000)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_generated_programs_respect_limits_and_pass(seed):
    p = generate_program(seed)
    assert len(p.classes) <= 15
    assert sum(len(c.methods) for c in p.classes.values()) <= 40
    assert all(len(list(p.superclass_chain(n))) <= 4 for n in p.classes)
    assert all(o.status is Status.PASS for o in run_suite(p).values())


def test_generation_is_deterministic():
    assert generate_source(7) == generate_source(7)
    assert generate_source(7) != generate_source(8)


def test_smaller_config():
    cfg = CorpusConfig(max_production=3, max_test_classes=1, max_methods=20)
    p = generate_program(3, cfg)
    assert sum(1 for n in p.classes if not n.endswith("Test")) <= 3


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_evolve_is_deterministic_and_resolvable(seed):
    p = generate_program(seed)
    a, b = evolve(p, seed), evolve(p, seed)
    assert program_to_str(a) == program_to_str(b)
    # the original program is left untouched
    assert program_to_str(p) == program_to_str(generate_program(seed))
