"""Select the tests relevant to a set of changes.

From a change we find the method it lives in, then walk invocation edges
backwards: every method that invokes it, every method invoking those, and
so on. Test methods end a walk and are collected; a fixture method
(``setUp``, a test-class constructor) stands for every test of its class.

A change inside a test method also selects that test.

The walk itself runs on a compact caller graph through the compiled
kernel. :func:`select_relevant_tests_reference` performs the same
traversal directly over the change model and exists to cross-check it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

import networkx as nx
import numpy as np

from ._kernels import reach_many
from .config import DEFAULT_CONFIG, TestConfig
from .model import (Change, ChangeKind, ChangeModel, ChangeModelError, Subject, SubjectKind,
                    class_id, class_name_of, enclosing_method_add)


class UnknownClass(ChangeModelError):
    pass


class EmptyFullSuite(ValueError):
    pass


@dataclass
class SelectionResult:
    per_change: dict[int, frozenset[str]] = field(default_factory=dict)
    diagnostics: list[str] = field(default_factory=list)

    def all_tests(self) -> set[str]:
        out: set[str] = set()
        for tests in self.per_change.values():
            out |= tests
        return out

    def to_json(self) -> dict:
        return {
            "changes": {str(k): sorted(v) for k, v in sorted(self.per_change.items())},
            "diagnostics": list(self.diagnostics),
        }


def _owner_class(model: ChangeModel, mid: str) -> Subject:
    return model.subjects[model.subjects[mid].ownerId]


def is_test(model: ChangeModel, mid: str, cfg: TestConfig = DEFAULT_CONFIG) -> bool:
    m = model.subjects[mid]
    return m.kind is SubjectKind.METHOD and cfg.is_test_method(
        _owner_class(model, mid).identifier, m.identifier, m.arity, m.isAbstract, m.isConstructor)


def is_fixture(model: ChangeModel, mid: str, cfg: TestConfig = DEFAULT_CONFIG) -> bool:
    m = model.subjects[mid]
    return cfg.is_fixture(_owner_class(model, mid).identifier, m.identifier, m.arity,
                          m.isConstructor)


def test_methods(model: ChangeModel, cfg: TestConfig = DEFAULT_CONFIG) -> list[str]:
    """Every alive test method, sorted."""
    return [sid for sid, s in model.alive_subjects().items()
            if s.kind is SubjectKind.METHOD and is_test(model, sid, cfg)]


def test_classes(model: ChangeModel, cfg: TestConfig = DEFAULT_CONFIG) -> list[str]:
    return sorted({model.subjects[t].ownerId for t in test_methods(model, cfg)})


class CallerGraph:
    """Alive methods as nodes, with an edge callee -> caller for every live
    invocation link, plus fixture -> test edges within test classes."""

    def __init__(self, model: ChangeModel, cfg: TestConfig = DEFAULT_CONFIG):
        self.model = model
        self.cfg = cfg
        alive = model.alive_subjects()
        self.nodes = [sid for sid, s in alive.items() if s.kind is SubjectKind.METHOD]
        self.index = {sid: i for i, sid in enumerate(self.nodes)}
        n = len(self.nodes)
        self.terminal = np.zeros(n, dtype=np.uint8)
        adj: list[set[int]] = [set() for _ in range(n)]
        tests_by_class: dict[str, list[int]] = {}
        for i, sid in enumerate(self.nodes):
            if is_test(model, sid, cfg):
                self.terminal[i] = 1
                tests_by_class.setdefault(alive[sid].ownerId, []).append(i)
        for i, sid in enumerate(self.nodes):
            add = model.add_of(sid)
            for inv in model.invocational_dependees(add):
                caller = model.subject_of(inv).ownerId
                adj[i].add(self.index[caller])
            if is_fixture(model, sid, cfg):
                adj[i].update(tests_by_class.get(alive[sid].ownerId, ()))
        self.indptr = np.zeros(n + 1, dtype=np.int32)
        flat: list[int] = []
        for i, succ in enumerate(adj):
            flat.extend(sorted(succ))
            self.indptr[i + 1] = len(flat)
        self.indices = np.asarray(flat, dtype=np.int32)
        self._cyclic: Optional[set[int]] = None

    def reach(self, starts: list[int]) -> list[np.ndarray]:
        ptr, nodes = reach_many(self.indptr, self.indices, self.terminal,
                                np.asarray(starts, dtype=np.int32))
        return [nodes[ptr[k]:ptr[k + 1]] for k in range(len(starts))]

    def cyclic_nodes(self) -> set[int]:
        """Nodes on a call cycle (recursive or mutually recursive methods)."""
        if self._cyclic is None:
            g = nx.DiGraph()
            g.add_nodes_from(range(len(self.nodes)))
            for u in range(len(self.nodes)):
                for k in range(self.indptr[u], self.indptr[u + 1]):
                    g.add_edge(u, int(self.indices[k]))
            self._cyclic = set()
            for comp in nx.strongly_connected_components(g):
                if len(comp) > 1 or any(g.has_edge(u, u) for u in comp):
                    self._cyclic |= comp
        return self._cyclic


class Selector:
    """Test selection over one (finished) change model."""

    def __init__(self, model: ChangeModel, cfg: TestConfig = DEFAULT_CONFIG):
        self.model = model
        self.cfg = cfg
        self.graph = CallerGraph(model, cfg)

    def start_methods(self, c: Change) -> Optional[list[str]]:
        """Methods a change is relevant through; None when the change's
        subject is no longer alive."""
        m = self.model
        if not m.is_alive(c.subjectId):
            return None
        add = enclosing_method_add(m, c)
        if add is not None:
            return [add.subjectId]
        # class-level change: every alive method of the class
        return m.alive_methods_of(c.subjectId)

    def tests_for_methods(self, method_ids: list[str]) -> list[frozenset[str]]:
        g = self.graph
        starts = [g.index[mid] for mid in method_ids]
        return [self._tests_of(s, row) for s, row in zip(starts, g.reach(starts))]

    def _tests_of(self, start: int, row) -> frozenset[str]:
        # a change inside a test selects that test as well
        g = self.graph
        tests = {g.nodes[v] for v in row if g.terminal[v]}
        if g.terminal[start]:
            tests.add(g.nodes[start])
        return frozenset(tests)

    def select(self, selected: Iterable[Union[Change, int]]) -> SelectionResult:
        model, g = self.model, self.graph
        result = SelectionResult()
        changes = [model.change(c) if isinstance(c, int) else c for c in selected]
        plans: list[tuple[Change, list[str]]] = []
        for c in changes:
            starts = self.start_methods(c)
            if starts is None:
                result.per_change[c.changeId] = frozenset()
                result.diagnostics.append(f"{c}: subject is not alive; nothing selected")
                continue
            plans.append((c, starts))
        flat = [mid for _, starts in plans for mid in starts]
        rows = g.reach([g.index[mid] for mid in flat]) if flat else []
        cyclic = g.cyclic_nodes() if flat else set()
        k = 0
        for c, starts in plans:
            tests: set[str] = set()
            touched: set[int] = set()
            for mid in starts:
                row = rows[k]
                k += 1
                tests |= self._tests_of(g.index[mid], row)
                touched.add(g.index[mid])
                touched.update(int(v) for v in row)
            result.per_change[c.changeId] = frozenset(tests)
            on_cycle = sorted(g.nodes[v] for v in touched & cyclic)
            if on_cycle:
                result.diagnostics.append(f"{c}: call cycle through {', '.join(on_cycle)}")
        if changes:
            for inv in model.unresolved_invocations():
                result.diagnostics.append(f"unresolved invocation {inv}")
        return result

    def for_class(self, cls: str) -> set[str]:
        cid = cls if cls.startswith("class:") else class_id(cls)
        if not self.model.is_alive(cid) or self.model.subjects[cid].kind is not SubjectKind.CLASS:
            raise UnknownClass(cls)
        methods = self.model.alive_methods_of(cid)
        out: set[str] = set()
        for tests in self.tests_for_methods(methods) if methods else []:
            out.update(self.model.subjects[t].ownerId for t in tests)
        return out


def select_relevant_tests(model: ChangeModel, selected: Iterable[Union[Change, int]],
                          cfg: TestConfig = DEFAULT_CONFIG) -> SelectionResult:
    """Map each selected change to the test methods relevant to it."""
    return Selector(model, cfg).select(selected)


def select_for_class(model: ChangeModel, cls: str, cfg: TestConfig = DEFAULT_CONFIG) -> set[str]:
    """Test classes relevant to a change in any method of ``cls``."""
    return Selector(model, cfg).for_class(cls)


def reduction_ratio(full_suite: Iterable[str], reduced: Iterable[str]) -> float:
    full = set(full_suite)
    red = set(reduced)
    if not full:
        raise EmptyFullSuite("full suite is empty")
    if not red <= full:
        raise ValueError(f"reduced suite has tests outside the full suite: {sorted(red - full)}")
    return len(red) / len(full)


def select_relevant_tests_reference(model: ChangeModel, selected: Iterable[Union[Change, int]],
                                    cfg: TestConfig = DEFAULT_CONFIG) -> dict[int, frozenset[str]]:
    """Direct traversal of the change model, without the caller graph."""
    out: dict[int, frozenset[str]] = {}
    for c in selected:
        c = model.change(c) if isinstance(c, int) else c
        if not model.is_alive(c.subjectId):
            out[c.changeId] = frozenset()
            continue
        start = enclosing_method_add(model, c)
        starts = [start] if start is not None else [
            model.add_of(mid) for mid in model.alive_methods_of(c.subjectId)]
        relevant: set[str] = set()
        for called in starts:
            if is_test(model, called.subjectId, cfg):
                relevant.add(called.subjectId)
            analyzed = {called.changeId}
            _collect(model, called, cfg, analyzed, relevant)
        out[c.changeId] = frozenset(relevant)
    return out


def _collect(model: ChangeModel, called: Change, cfg: TestConfig,
             analyzed: set[int], relevant: set[str]) -> None:
    mid = called.subjectId
    if is_fixture(model, mid, cfg):
        cls = model.subjects[mid].ownerId
        relevant.update(t for t in model.alive_methods_of(cls) if is_test(model, t, cfg))
    for inv in sorted(model.invocational_dependees(called), key=lambda x: x.changeId):
        invoked_by = enclosing_method_add(model, inv)
        if is_test(model, invoked_by.subjectId, cfg):
            relevant.add(invoked_by.subjectId)
        elif invoked_by.changeId not in analyzed:
            analyzed.add(invoked_by.changeId)
            _collect(model, invoked_by, cfg, analyzed, relevant)


def lift_to_classes(model: ChangeModel, tests: Iterable[str]) -> set[str]:
    return {model.subjects[t].ownerId for t in tests}


__all__ = ["SelectionResult", "Selector", "CallerGraph", "select_relevant_tests",
           "select_for_class", "reduction_ratio", "select_relevant_tests_reference",
           "test_methods", "test_classes", "is_test", "is_fixture", "lift_to_classes",
           "UnknownClass", "EmptyFullSuite", "class_name_of", "ChangeKind"]
