"""MiniOO frontend: parsing, resolution, printing and entity extraction."""
from .ast import Program
from .entities import extract_entities
from .parser import (Diagnostic, FrontendError, ParseError, SemanticError, parse_file,
                     parse_program, parse_snapshot)
from .printer import program_to_str

__all__ = [
    "Program", "extract_entities", "Diagnostic", "FrontendError", "ParseError",
    "SemanticError", "parse_file", "parse_program", "parse_snapshot", "program_to_str",
    "load_snapshot",
]


def load_snapshot(directory) -> Program:
    """Parse every ``*.moo`` file under ``directory``."""
    from pathlib import Path

    root = Path(directory)
    files = {str(p.relative_to(root)): p.read_text(encoding="utf-8")
             for p in sorted(root.rglob("*.moo"))}
    return parse_snapshot(files)
