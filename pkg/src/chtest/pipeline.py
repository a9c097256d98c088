"""End-to-end evaluation: reduced suites per class under two resolution
modes, scored against the full suite with mutation testing."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .config import DEFAULT_CONFIG, TestConfig
from .distiller import distill_initial
from .frontend import ast as A
from .model import ResolutionMode, SubjectKind
from .mutator import (ComparisonReport, KillMatrix, build_kill_matrix, compare_suites,
                      generate_mutants)
from .runtime import TestOutcome, constructor_only, discover_tests, run_suite
from .selector import Selector, test_classes


@dataclass
class Evaluation:
    report: ComparisonReport
    matrix: KillMatrix
    reduced_a: dict[str, set[str]]
    reduced_b: dict[str, set[str]]


def reduced_suites(p: A.Program, mode: ResolutionMode,
                   cfg: TestConfig = DEFAULT_CONFIG) -> dict[str, set[str]]:
    """For every production class, the test classes selected when any of
    its methods changes."""
    sel = Selector(distill_initial(p, mode, cfg), cfg)
    return {name: sel.for_class(name) for name in p.classes if not cfg.is_test_class(name)}


def evaluate(p: A.Program, mode_a: ResolutionMode = ResolutionMode.static(),
             mode_b: ResolutionMode = ResolutionMode.poly(),
             labels: tuple[str, str] = ("static", "poly"),
             step_budget: Optional[int] = None,
             cfg: TestConfig = DEFAULT_CONFIG) -> Evaluation:
    """Raises BaselineFailure when the full suite does not pass on ``p``."""
    tests = discover_tests(p, cfg)
    matrix = build_kill_matrix(p, generate_mutants(p, cfg=cfg), tests, step_budget, cfg)
    red_a = reduced_suites(p, mode_a, cfg)
    red_b = reduced_suites(p, mode_b, cfg)
    n_classes = len(test_classes(distill_initial(p, mode_a, cfg), cfg))
    report = compare_suites(matrix, tests, red_a, red_b, labels, n_classes)
    return Evaluation(report, matrix, red_a, red_b)


@dataclass(frozen=True)
class Miss:
    """A test that executed ``method`` but was not selected for it."""

    method: str
    test: str
    constructor_only: bool

    @property
    def diagnostic(self) -> str:
        why = ("constructor-only path: every execution happened inside a constructor call, "
               "which is not linked without includeConstructors"
               if self.constructor_only else "reached through an unlinked call")
        return f"{self.test} runs {self.method} but was not selected ({why})"


def safety_misses(p: A.Program, mode: ResolutionMode, cfg: TestConfig = DEFAULT_CONFIG,
                  outcomes: Optional[dict[str, TestOutcome]] = None,
                  step_budget: Optional[int] = None) -> list[Miss]:
    """Compare selection for every method against the tests whose trace
    actually ran it."""
    if outcomes is None:
        outcomes = run_suite(p, step_budget=step_budget, cfg=cfg)
    model = distill_initial(p, mode, cfg)
    sel = Selector(model, cfg)
    methods = [sid for sid, s in model.alive_subjects().items() if s.kind is SubjectKind.METHOD]
    executed = {t: o.executed() for t, o in outcomes.items()}
    misses = []
    for mid, selected in zip(methods, sel.tests_for_methods(methods) if methods else []):
        for t in sorted(executed):
            if mid in executed[t] and t not in selected:
                misses.append(Miss(mid, t, constructor_only(outcomes[t], mid)))
    return misses
