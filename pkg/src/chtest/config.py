"""Naming conventions that decide what counts as a test."""
from __future__ import annotations

import re
from dataclasses import dataclass


@dataclass(frozen=True)
class TestConfig:
    """Test detection by naming convention.

    A test method is a concrete, zero-argument, non-constructor method of a
    test class whose name matches ``test_method_pattern`` and is not a
    fixture method. Fixture methods (``setUp`` and the test class's
    constructor) run before every test of their class.
    """

    __test__ = False  # keep pytest from collecting this class

    test_class_pattern: str = r"Test$"
    test_method_pattern: str = r"^[tT]est|Test$"
    fixture_methods: tuple[str, ...] = ("setUp", "SetUp")

    def is_test_class(self, class_name: str) -> bool:
        return re.search(self.test_class_pattern, class_name) is not None

    def is_test_method(self, class_name: str, name: str, arity: int,
                       is_abstract: bool = False, is_constructor: bool = False) -> bool:
        return (self.is_test_class(class_name) and arity == 0 and not is_abstract
                and not is_constructor and name not in self.fixture_methods
                and re.search(self.test_method_pattern, name) is not None)

    def is_fixture(self, class_name: str, name: str, arity: int,
                   is_constructor: bool = False) -> bool:
        if not self.is_test_class(class_name) or arity != 0:
            return False
        return is_constructor or name in self.fixture_methods


DEFAULT_CONFIG = TestConfig()
