"""MiniOO syntax tree.

Nodes are plain mutable dataclasses. Source spans are excluded from
equality so that a printed-then-reparsed tree compares equal to the
original.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union


@dataclass(frozen=True)
class Span:
    file: str = ""
    line: int = 0
    col: int = 0

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.col}"


NO_SPAN = Span()

# primitive type names; anything else is a class name
INT = "int"
BOOLEAN = "boolean"
VOID = "void"
PRIMITIVES = frozenset({INT, BOOLEAN, VOID})


# -- expressions -------------------------------------------------------------


@dataclass
class IntLit:
    value: int
    span: Span = field(default=NO_SPAN, compare=False, repr=False)


@dataclass
class BoolLit:
    value: bool
    span: Span = field(default=NO_SPAN, compare=False, repr=False)


@dataclass
class NullLit:
    span: Span = field(default=NO_SPAN, compare=False, repr=False)


@dataclass
class This:
    span: Span = field(default=NO_SPAN, compare=False, repr=False)


@dataclass
class Name:
    """A bare identifier: a local, a parameter, or a field of ``this``."""

    ident: str
    span: Span = field(default=NO_SPAN, compare=False, repr=False)


@dataclass
class FieldAccess:
    """``this.f``; field access on other receivers is not part of MiniOO."""

    name: str
    span: Span = field(default=NO_SPAN, compare=False, repr=False)


@dataclass
class Unary:
    op: str  # "-" or "!"
    operand: "Expr"
    span: Span = field(default=NO_SPAN, compare=False, repr=False)


@dataclass
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    span: Span = field(default=NO_SPAN, compare=False, repr=False)


@dataclass
class New:
    class_name: str
    args: list["Expr"]
    span: Span = field(default=NO_SPAN, compare=False, repr=False)


@dataclass
class Call:
    """Method call.

    ``receiver`` is None for an implicit ``m(args)`` call on ``this``.
    ``static_class`` is filled in by the resolver with the declared class of
    the receiver (the enclosing class for implicit calls, the superclass for
    ``super`` calls).
    """

    receiver: Optional["Expr"]
    name: str
    args: list["Expr"]
    is_super: bool = False
    static_class: Optional[str] = field(default=None, compare=False)
    span: Span = field(default=NO_SPAN, compare=False, repr=False)


Expr = Union[IntLit, BoolLit, NullLit, This, Name, FieldAccess, Unary, Binary, New, Call]

ARITH_OPS = ("+", "-", "*", "/")
REL_OPS = ("<", "<=", ">", ">=")
EQ_OPS = ("==", "!=")
LOGIC_OPS = ("&&", "||")


# -- statements --------------------------------------------------------------


@dataclass
class Block:
    stmts: list["Stmt"]
    span: Span = field(default=NO_SPAN, compare=False, repr=False)


@dataclass
class VarDecl:
    type: str
    name: str
    init: Optional[Expr]
    span: Span = field(default=NO_SPAN, compare=False, repr=False)


@dataclass
class Assign:
    """``x = e;`` or ``this.x = e;`` (target is Name or FieldAccess)."""

    target: Union[Name, FieldAccess]
    value: Expr
    span: Span = field(default=NO_SPAN, compare=False, repr=False)


@dataclass
class If:
    cond: Expr
    then: Block
    orelse: Optional[Block]
    span: Span = field(default=NO_SPAN, compare=False, repr=False)


@dataclass
class While:
    cond: Expr
    body: Block
    span: Span = field(default=NO_SPAN, compare=False, repr=False)


@dataclass
class Return:
    value: Optional[Expr]
    span: Span = field(default=NO_SPAN, compare=False, repr=False)


@dataclass
class Assert:
    cond: Expr
    span: Span = field(default=NO_SPAN, compare=False, repr=False)


@dataclass
class ExprStmt:
    expr: Expr
    span: Span = field(default=NO_SPAN, compare=False, repr=False)


Stmt = Union[Block, VarDecl, Assign, If, While, Return, Assert, ExprStmt]


# -- declarations ------------------------------------------------------------


@dataclass
class Param:
    type: str
    name: str


@dataclass
class MethodDecl:
    """A method or constructor. Constructors are named after their class
    and have return type ``void``; abstract methods have ``body is None``."""

    name: str
    return_type: str
    params: list[Param]
    body: Optional[Block]
    is_constructor: bool = False
    span: Span = field(default=NO_SPAN, compare=False, repr=False)

    @property
    def arity(self) -> int:
        return len(self.params)

    @property
    def is_abstract(self) -> bool:
        return self.body is None

    @property
    def key(self) -> tuple[str, int]:
        return (self.name, len(self.params))


@dataclass
class FieldDecl:
    type: str
    name: str
    span: Span = field(default=NO_SPAN, compare=False, repr=False)


@dataclass
class ClassDecl:
    name: str
    superclass: Optional[str]
    fields: list[FieldDecl]
    methods: list[MethodDecl]
    is_abstract: bool = False
    span: Span = field(default=NO_SPAN, compare=False, repr=False)

    def method(self, name: str, arity: int) -> Optional[MethodDecl]:
        for m in self.methods:
            if m.name == name and m.arity == arity:
                return m
        return None

    def field_type(self, name: str) -> Optional[str]:
        for f in self.fields:
            if f.name == name:
                return f.type
        return None


@dataclass
class Program:
    """A parsed and resolved snapshot: classes keyed (and ordered) by name."""

    classes: dict[str, ClassDecl] = field(default_factory=dict)
    warnings: list = field(default_factory=list, compare=False, repr=False)

    def superclass_chain(self, name: str):
        """Yield ``name`` and its ancestors, nearest first."""
        seen = set()
        cur: Optional[str] = name
        while cur is not None and cur in self.classes and cur not in seen:
            seen.add(cur)
            yield self.classes[cur]
            cur = self.classes[cur].superclass

    def lookup_method(self, class_name: str, name: str, arity: int,
                      concrete: bool = False) -> Optional[tuple[ClassDecl, MethodDecl]]:
        """Find the nearest declaration of name/arity at or above class_name.

        With ``concrete`` set, abstract declarations are skipped.
        Constructors are never found this way.
        """
        for cls in self.superclass_chain(class_name):
            m = cls.method(name, arity)
            if m is not None and not m.is_constructor and (not concrete or not m.is_abstract):
                return cls, m
        return None

    def is_subclass(self, sub: str, sup: str) -> bool:
        return any(c.name == sup for c in self.superclass_chain(sub))

    def all_fields(self, class_name: str) -> list[FieldDecl]:
        out: list[FieldDecl] = []
        for cls in reversed(list(self.superclass_chain(class_name))):
            out.extend(cls.fields)
        return out
