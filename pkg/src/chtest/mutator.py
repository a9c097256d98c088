"""Mutant generation, kill matrices and suite comparison.

A mutant changes exactly one node of one method body. A mutant is killed
by a test when the test passes on the original program but fails or
errors on the mutant. Only tests whose baseline trace ran the mutated
method are re-executed; the others cannot observe the mutation.
"""
from __future__ import annotations

import copy
import csv
import io
from dataclasses import dataclass, field, fields, is_dataclass
from enum import Enum
from typing import Iterable, Iterator, Mapping, Optional

import numpy as np

from .config import DEFAULT_CONFIG, TestConfig
from .frontend import ast as A
from .frontend.printer import expr_to_str
from .model import method_id
from .runtime import Interpreter, Status, TestOutcome, discover_tests, parse_test_id


class Operator(str, Enum):
    ARITHMETIC_REPLACE = "ArithmeticReplace"
    CONDITIONAL_NEGATE = "ConditionalNegate"
    BOUNDARY_SHIFT = "BoundaryShift"
    RETURN_VALUE_MUTATE = "ReturnValueMutate"
    BOOLEAN_LITERAL_FLIP = "BooleanLiteralFlip"


_ARITH_SWAP = {"+": "-", "-": "+", "*": "/", "/": "*"}
_NEGATE = {"==": "!=", "!=": "==", "<": ">=", ">=": "<", ">": "<=", "<=": ">"}
_BOUNDARY = {"<": "<=", "<=": "<", ">": ">=", ">=": ">"}


class BaselineFailure(Exception):
    def __init__(self, failing: dict[str, TestOutcome]):
        self.failing = failing
        detail = ", ".join(f"{t} ({o.status.value}: {o.message})" for t, o in sorted(failing.items()))
        super().__init__(f"tests fail on the unmutated program: {detail}")


@dataclass(frozen=True)
class Mutant:
    mutantId: str
    targetClass: str
    targetMethod: str  # method id
    operator: Operator
    location: A.Span
    path: tuple = field(repr=False)
    description: str = ""


# -- node walking ------------------------------------------------------------

_SKIP_FIELDS = {"span", "static_class"}


def _child_slots(node) -> Iterator[tuple[str, Optional[int], object]]:
    for f in fields(node):
        if f.name in _SKIP_FIELDS:
            continue
        value = getattr(node, f.name)
        if isinstance(value, list):
            for i, item in enumerate(value):
                if is_dataclass(item):
                    yield f.name, i, item
        elif is_dataclass(value) and not isinstance(value, A.Span):
            yield f.name, None, value


def walk(node, path: tuple = ()) -> Iterator[tuple[tuple, object]]:
    """Pre-order (path, node) pairs below and including ``node``."""
    yield path, node
    for name, idx, child in _child_slots(node):
        yield from walk(child, path + ((name, idx),))


def _get(node, path: tuple):
    for name, idx in path:
        node = getattr(node, name)
        if idx is not None:
            node = node[idx]
    return node


def _set(root, path: tuple, value) -> None:
    parent = _get(root, path[:-1])
    name, idx = path[-1]
    if idx is None:
        setattr(parent, name, value)
    else:
        getattr(parent, name)[idx] = value


def _mutations(node, return_type: str) -> Iterator[tuple[Operator, str]]:
    if isinstance(node, A.Binary):
        if node.op in _ARITH_SWAP:
            yield Operator.ARITHMETIC_REPLACE, f"{node.op} -> {_ARITH_SWAP[node.op]}"
        if node.op in _NEGATE:
            yield Operator.CONDITIONAL_NEGATE, f"{node.op} -> {_NEGATE[node.op]}"
        if node.op in _BOUNDARY:
            yield Operator.BOUNDARY_SHIFT, f"{node.op} -> {_BOUNDARY[node.op]}"
    elif isinstance(node, A.BoolLit):
        yield Operator.BOOLEAN_LITERAL_FLIP, f"{str(node.value).lower()} -> {str(not node.value).lower()}"
    elif isinstance(node, A.Return) and node.value is not None:
        if return_type == A.INT:
            yield Operator.RETURN_VALUE_MUTATE, f"return {expr_to_str(node.value)} + 1"
        elif return_type == A.BOOLEAN:
            yield Operator.RETURN_VALUE_MUTATE, f"return !({expr_to_str(node.value)})"


def _mutated_node(node, op: Operator, return_type: str):
    if op is Operator.ARITHMETIC_REPLACE:
        return A.Binary(_ARITH_SWAP[node.op], node.left, node.right, span=node.span)
    if op is Operator.CONDITIONAL_NEGATE:
        return A.Binary(_NEGATE[node.op], node.left, node.right, span=node.span)
    if op is Operator.BOUNDARY_SHIFT:
        return A.Binary(_BOUNDARY[node.op], node.left, node.right, span=node.span)
    if op is Operator.BOOLEAN_LITERAL_FLIP:
        return A.BoolLit(not node.value, span=node.span)
    if op is Operator.RETURN_VALUE_MUTATE:
        if return_type == A.BOOLEAN:
            return A.Return(A.Unary("!", node.value, span=node.span), span=node.span)
        return A.Return(A.Binary("+", node.value, A.IntLit(1, span=node.span), span=node.span),
                        span=node.span)
    raise ValueError(op)


# -- generation --------------------------------------------------------------

def generate_mutants(p: A.Program, scope: Optional[Iterable[str]] = None,
                     cfg: TestConfig = DEFAULT_CONFIG, include_test_classes: bool = False
                     ) -> list[Mutant]:
    """Every applicable operator at every applicable node, in source order
    (classes by name, methods in declaration order, nodes in pre-order).

    ``scope`` restricts generation to the named classes. Test classes are
    skipped unless ``include_test_classes`` is set.
    """
    wanted = None if scope is None else set(scope)
    out: list[Mutant] = []
    for cls in p.classes.values():
        if wanted is not None and cls.name not in wanted:
            continue
        if not include_test_classes and cfg.is_test_class(cls.name):
            continue
        for m in cls.methods:
            if m.body is None:
                continue
            mid = method_id(cls.name, m.name, m.arity)
            k = 0
            for path, node in walk(m.body):
                for op, desc in _mutations(node, m.return_type):
                    out.append(Mutant(f"{mid[len('method:'):]}#{k}", cls.name, mid, op,
                                      node.span, path, desc))
                    k += 1
    return out


def apply_mutant(p: A.Program, mutant: Mutant) -> A.Program:
    """A copy of ``p`` with the mutation applied; ``p`` is left untouched."""
    cls = p.classes[mutant.targetClass]
    _, name, arity = parse_test_id(mutant.targetMethod)
    new_methods = []
    for m in cls.methods:
        if m.name == name and m.arity == arity and not m.is_abstract:
            body = copy.deepcopy(m.body)
            node = _get(body, mutant.path)
            repl = _mutated_node(node, mutant.operator, m.return_type)
            if mutant.path:
                _set(body, mutant.path, repl)
            else:
                body = repl
            m = A.MethodDecl(m.name, m.return_type, m.params, body, m.is_constructor, span=m.span)
        new_methods.append(m)
    new_cls = A.ClassDecl(cls.name, cls.superclass, cls.fields, new_methods, cls.is_abstract,
                          span=cls.span)
    classes = dict(p.classes)
    classes[cls.name] = new_cls
    return A.Program(classes, warnings=p.warnings)


# -- kill matrix ---------------------------------------------------------------

@dataclass
class KillMatrix:
    """Which test kills which mutant.

    ``killed[i, j]`` is True when test ``tests[j]`` passes on the original
    program but fails or errors on ``mutants[i]``. ``coverage`` maps each
    test to the classes whose method bodies its baseline run executed.
    """

    mutants: list[Mutant]
    tests: list[str]
    killed: np.ndarray
    coverage: dict[str, frozenset[str]]
    baseline: dict[str, TestOutcome] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._test_index = {t: j for j, t in enumerate(self.tests)}

    def suite_mask(self, suite: Iterable[str]) -> np.ndarray:
        mask = np.zeros(len(self.tests), dtype=bool)
        for t in suite:
            mask[self._test_index[t]] = True
        return mask

    def killed_by(self, suite: Iterable[str]) -> np.ndarray:
        """Boolean vector over mutants: killed by some test of ``suite``."""
        mask = self.suite_mask(suite)
        if not self.mutants:
            return np.zeros(0, dtype=bool)
        return self.killed[:, mask].any(axis=1)

    def kills(self, suite: Iterable[str], cls: Optional[str] = None) -> set[str]:
        vec = self.killed_by(suite)
        return {m.mutantId for m, k in zip(self.mutants, vec)
                if k and (cls is None or m.targetClass == cls)}

    def cell(self, mutant_id: str, suite: Iterable[str]) -> str:
        return "Killed" if mutant_id in self.kills(suite) else "Survived"

    def covered_classes(self, suite: Iterable[str]) -> set[str]:
        out: set[str] = set()
        for t in suite:
            out |= self.coverage.get(t, frozenset())
        return out


def run_baseline(p: A.Program, tests: Iterable[str], step_budget: Optional[int] = None,
                 cfg: TestConfig = DEFAULT_CONFIG) -> dict[str, TestOutcome]:
    interp = Interpreter(p, step_budget, cfg)
    return {t: interp.run_test(t) for t in sorted(set(tests))}


def build_kill_matrix(p: A.Program, mutants: list[Mutant], tests: Optional[Iterable[str]] = None,
                      step_budget: Optional[int] = None, cfg: TestConfig = DEFAULT_CONFIG,
                      baseline: Optional[Mapping[str, TestOutcome]] = None) -> KillMatrix:
    """Run every test that reaches a mutant against that mutant.

    Raises BaselineFailure if any test does not pass on ``p`` itself.
    """
    tests = discover_tests(p, cfg) if tests is None else sorted(set(tests))
    if baseline is None:
        baseline = run_baseline(p, tests, step_budget, cfg)
    failing = {t: o for t, o in baseline.items() if o.status is not Status.PASS}
    if failing:
        raise BaselineFailure(failing)
    executed = {t: baseline[t].executed() for t in tests}
    coverage = {t: frozenset(parse_test_id(mid)[0] for mid in executed[t]) for t in tests}
    killed = np.zeros((len(mutants), len(tests)), dtype=bool)
    for i, mutant in enumerate(mutants):
        reaching = [j for j, t in enumerate(tests) if mutant.targetMethod in executed[t]]
        if not reaching:
            continue
        interp = Interpreter(apply_mutant(p, mutant), step_budget, cfg)
        for j in reaching:
            killed[i, j] = interp.run_test(tests[j]).status is not Status.PASS
    return KillMatrix(list(mutants), list(tests), killed, coverage, dict(baseline))


# -- metrics -------------------------------------------------------------------

@dataclass(frozen=True)
class Coverage:
    killed: int
    introduced: int  # mutants in classes the suite covers
    uncovered: int  # mutants in classes the suite never executes

    @property
    def ratio(self) -> float:
        return self.killed / self.introduced if self.introduced else 0.0


def mutation_coverage(matrix: KillMatrix, suite: Iterable[str],
                      classes: Optional[Iterable[str]] = None) -> Coverage:
    """Killed over introduced mutants, counting only mutants in classes the
    suite executes; the rest are reported as uncovered."""
    suite = list(suite)
    wanted = None if classes is None else set(classes)
    covered = matrix.covered_classes(suite)
    vec = matrix.killed_by(suite)
    killed = introduced = uncovered = 0
    for m, k in zip(matrix.mutants, vec):
        if wanted is not None and m.targetClass not in wanted:
            continue
        if m.targetClass in covered:
            introduced += 1
            killed += int(k)
        else:
            uncovered += 1
    return Coverage(killed, introduced, uncovered)


def classify(killed_a: int, killed_b: int) -> str:
    if killed_b > killed_a:
        return "improved"
    if killed_b < killed_a:
        return "worsened"
    return "same"


@dataclass(frozen=True)
class ClassRow:
    cls: str
    mutants: int
    killed_full: int
    killed_a: int
    killed_b: int
    coverage_full: float
    coverage_a: float
    coverage_b: float
    suite_a: int  # test classes in the reduced suite
    suite_b: int

    @property
    def classification(self) -> str:
        return classify(self.killed_a, self.killed_b)


@dataclass
class ComparisonReport:
    label_a: str
    label_b: str
    rows: list[ClassRow]
    full_suite_size: int
    uncovered_mutants: int
    total_mutants: int

    @property
    def killed_full(self) -> int:
        return sum(r.killed_full for r in self.rows)

    @property
    def killed_a(self) -> int:
        return sum(r.killed_a for r in self.rows)

    @property
    def killed_b(self) -> int:
        return sum(r.killed_b for r in self.rows)

    @property
    def killed_difference(self) -> int:
        return self.killed_b - self.killed_a

    def reduction_ratio(self, which: str) -> float:
        """Mean over rows of |reduced suite| / |full suite| (test classes)."""
        if not self.rows or not self.full_suite_size:
            return 0.0
        sizes = [r.suite_a if which == "a" else r.suite_b for r in self.rows]
        return sum(sizes) / (len(sizes) * self.full_suite_size)

    def counts(self) -> dict[str, int]:
        out = {"improved": 0, "same": 0, "worsened": 0}
        for r in self.rows:
            out[r.classification] += 1
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        a, b = self.label_a, self.label_b
        w.writerow(["class", "mutants", "killed_full", f"killed_{a}reduced", f"killed_{b}reduced",
                    "coverage_full", f"coverage_{a}reduced", f"coverage_{b}reduced",
                    f"suite_{a}", f"suite_{b}", "classification"])
        for r in self.rows:
            w.writerow([r.cls, r.mutants, r.killed_full, r.killed_a, r.killed_b,
                        f"{r.coverage_full:.4f}", f"{r.coverage_a:.4f}", f"{r.coverage_b:.4f}",
                        r.suite_a, r.suite_b, r.classification])
        return buf.getvalue()

    def summary(self) -> str:
        a, b = self.label_a, self.label_b
        c = self.counts()
        n = len(self.rows)

        def pct(k: int) -> str:
            return f"{100.0 * k / n:.1f}%" if n else "n/a"

        same_as_full_a = sum(r.killed_a == r.killed_full for r in self.rows)
        same_as_full_b = sum(r.killed_b == r.killed_full for r in self.rows)
        lines = [
            f"classes evaluated: {n}",
            f"mutants: {self.total_mutants} total, {self.total_mutants - self.uncovered_mutants} "
            f"in covered classes, {self.uncovered_mutants} uncovered",
            f"killed: full {self.killed_full}, {a}-reduced {self.killed_a}, "
            f"{b}-reduced {self.killed_b}",
            f"killed difference ({b} - {a}): {self.killed_difference:+d}",
            f"classes {b} vs {a}: improved {c['improved']} ({pct(c['improved'])}), "
            f"same {c['same']} ({pct(c['same'])}), worsened {c['worsened']} ({pct(c['worsened'])})",
            f"classes with full-suite coverage: {a} {same_as_full_a}, {b} {same_as_full_b}",
            f"full suite: {self.full_suite_size} test classes",
            f"mean reduction ratio: {a} {self.reduction_ratio('a'):.4f}, "
            f"{b} {self.reduction_ratio('b'):.4f}",
        ]
        return "\n".join(lines) + "\n"


def expand_suite(test_classes: Iterable[str], tests: Iterable[str]) -> set[str]:
    """Test methods belonging to the given test class ids."""
    names = {c[len("class:"):] if c.startswith("class:") else c for c in test_classes}
    return {t for t in tests if parse_test_id(t)[0] in names}


def compare_suites(matrix: KillMatrix, full: Iterable[str],
                   reduced_a: Mapping[str, Iterable[str]], reduced_b: Mapping[str, Iterable[str]],
                   labels: tuple[str, str] = ("static", "poly"),
                   full_suite_classes: Optional[int] = None) -> ComparisonReport:
    """Per-class comparison of two families of reduced suites.

    ``reduced_a``/``reduced_b`` map a class name to its reduced suite given
    as test class ids. Rows cover the classes the full suite executes.
    """
    full = sorted(set(full))
    full_cov = mutation_coverage(matrix, full)
    covered = matrix.covered_classes(full)
    classes = sorted({m.targetClass for m in matrix.mutants} & covered)
    n_full_classes = full_suite_classes if full_suite_classes is not None else len(
        {parse_test_id(t)[0] for t in full})
    rows = []
    for cls in classes:
        suite_a = expand_suite(reduced_a.get(cls, ()), full)
        suite_b = expand_suite(reduced_b.get(cls, ()), full)
        cf = mutation_coverage(matrix, full, [cls])
        ca = mutation_coverage(matrix, suite_a, [cls])
        cb = mutation_coverage(matrix, suite_b, [cls])
        rows.append(ClassRow(cls, cf.introduced, cf.killed, ca.killed, cb.killed,
                             cf.ratio, ca.ratio, cb.ratio,
                             len(set(reduced_a.get(cls, ()))), len(set(reduced_b.get(cls, ())))))
    return ComparisonReport(labels[0], labels[1], rows, n_full_classes, full_cov.uncovered,
                            len(matrix.mutants))
