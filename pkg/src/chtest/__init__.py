"""Change-based test selection for MiniOO programs.

The pipeline: parse snapshots (:mod:`chtest.frontend`), record their
differences as first-class changes (:mod:`chtest.distiller`,
:mod:`chtest.model`), select the tests relevant to a change
(:mod:`chtest.selector`), and judge reduced suites by mutation testing
(:mod:`chtest.runtime`, :mod:`chtest.mutator`, :mod:`chtest.pipeline`).
"""
from .config import DEFAULT_CONFIG, TestConfig
from .distiller import distill_delta, distill_initial
from .frontend import load_snapshot, parse_program, parse_snapshot
from .model import ChangeKind, ChangeModel, ResolutionMode, deserialize, serialize
from .pipeline import evaluate
from .selector import select_for_class, select_relevant_tests

__version__ = "0.1.0"

__all__ = [
    "TestConfig", "DEFAULT_CONFIG", "distill_initial", "distill_delta", "load_snapshot",
    "parse_program", "parse_snapshot", "ChangeKind", "ChangeModel", "ResolutionMode",
    "serialize", "deserialize", "evaluate", "select_relevant_tests", "select_for_class",
]
