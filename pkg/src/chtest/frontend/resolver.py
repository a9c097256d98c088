"""Semantic checks and static receiver resolution.

Every ``Call`` node gets its ``static_class`` filled in. Calls whose member
cannot be found on the declared receiver type are reported as warnings
(the program is still usable); everything else is a fatal SemanticError.
"""
from __future__ import annotations

from typing import Optional

from . import ast as A
from .parser import Diagnostic, SemanticError

NULL = "<null>"
UNKNOWN = None


class _Checker:
    def __init__(self, program: A.Program):
        self.p = program
        self.errors: list[Diagnostic] = []
        self.warnings: list[Diagnostic] = []

    def err(self, span: A.Span, msg: str) -> None:
        self.errors.append(Diagnostic(span.file, span.line, span.col, msg))

    def warn(self, span: A.Span, msg: str) -> None:
        self.warnings.append(Diagnostic(span.file, span.line, span.col, msg, "warning"))

    # -- types --

    def known_type(self, t: str) -> bool:
        return t in A.PRIMITIVES or t in self.p.classes

    def assignable(self, src: Optional[str], dst: str) -> bool:
        if src is UNKNOWN or src == dst:
            return True
        if src == NULL:
            return dst not in A.PRIMITIVES
        if src in self.p.classes and dst in self.p.classes:
            return self.p.is_subclass(src, dst)
        return False

    # -- declarations --

    def check_class(self, cls: A.ClassDecl) -> None:
        seen_fields: set[str] = set()
        for f in cls.fields:
            if f.name in seen_fields:
                self.err(f.span, f"duplicate field {cls.name}.{f.name}")
            seen_fields.add(f.name)
            if not self.known_type(f.type):
                self.err(f.span, f"unknown type {f.type!r}")
        seen_methods: set[tuple[str, int]] = set()
        for m in cls.methods:
            if m.key in seen_methods:
                self.err(m.span, f"duplicate method {cls.name}.{m.name}/{m.arity}")
            seen_methods.add(m.key)
            if m.name == cls.name and not m.is_constructor:
                self.err(m.span, f"method {m.name} may not be named after its class")
            if not self.known_type(m.return_type):
                self.err(m.span, f"unknown type {m.return_type!r}")
            names = set()
            for prm in m.params:
                if not self.known_type(prm.type) or prm.type == A.VOID:
                    self.err(m.span, f"bad parameter type {prm.type!r}")
                if prm.name in names:
                    self.err(m.span, f"duplicate parameter {prm.name!r}")
                names.add(prm.name)
            if m.body is not None:
                scope = {prm.name: prm.type for prm in m.params}
                self.block(cls, m, m.body, [scope])

    # -- statements --

    def block(self, cls, m, block: A.Block, scopes: list[dict]) -> None:
        scopes.append({})
        for s in block.stmts:
            self.stmt(cls, m, s, scopes)
        scopes.pop()

    def stmt(self, cls, m, s, scopes) -> None:
        if isinstance(s, A.Block):
            self.block(cls, m, s, scopes)
        elif isinstance(s, A.VarDecl):
            if not self.known_type(s.type) or s.type == A.VOID:
                self.err(s.span, f"bad local type {s.type!r}")
            if any(s.name in sc for sc in scopes):
                self.err(s.span, f"redeclared variable {s.name!r}")
            if s.init is not None:
                t = self.expr(cls, m, s.init, scopes)
                if not self.assignable(t, s.type):
                    self.err(s.span, f"cannot initialize {s.type} {s.name} with {t}")
            scopes[-1][s.name] = s.type
        elif isinstance(s, A.Assign):
            target_t = self.expr(cls, m, s.target, scopes)
            t = self.expr(cls, m, s.value, scopes)
            if target_t is not UNKNOWN and not self.assignable(t, target_t):
                self.err(s.span, f"cannot assign {t} to {target_t}")
        elif isinstance(s, A.If):
            self.cond(cls, m, s.cond, scopes)
            self.block(cls, m, s.then, scopes)
            if s.orelse is not None:
                self.block(cls, m, s.orelse, scopes)
        elif isinstance(s, A.While):
            self.cond(cls, m, s.cond, scopes)
            self.block(cls, m, s.body, scopes)
        elif isinstance(s, A.Return):
            if s.value is None:
                if m.return_type != A.VOID:
                    self.err(s.span, "missing return value")
            else:
                t = self.expr(cls, m, s.value, scopes)
                if m.return_type == A.VOID:
                    self.err(s.span, "void method returns a value")
                elif not self.assignable(t, m.return_type):
                    self.err(s.span, f"cannot return {t} from {m.return_type} method")
        elif isinstance(s, A.Assert):
            self.cond(cls, m, s.cond, scopes)
        elif isinstance(s, A.ExprStmt):
            self.expr(cls, m, s.expr, scopes)

    def cond(self, cls, m, e, scopes) -> None:
        t = self.expr(cls, m, e, scopes)
        if t not in (A.BOOLEAN, UNKNOWN):
            self.err(e.span, f"condition must be boolean, not {t}")

    # -- expressions --

    def expr(self, cls: A.ClassDecl, m: A.MethodDecl, e, scopes) -> Optional[str]:
        if isinstance(e, A.IntLit):
            return A.INT
        if isinstance(e, A.BoolLit):
            return A.BOOLEAN
        if isinstance(e, A.NullLit):
            return NULL
        if isinstance(e, A.This):
            return cls.name
        if isinstance(e, A.Name):
            for sc in reversed(scopes):
                if e.ident in sc:
                    return sc[e.ident]
            t = self.field_type(cls.name, e.ident)
            if t is None:
                self.err(e.span, f"unknown variable {e.ident!r}")
            return t
        if isinstance(e, A.FieldAccess):
            t = self.field_type(cls.name, e.name)
            if t is None:
                self.err(e.span, f"unknown field this.{e.name}")
            return t
        if isinstance(e, A.Unary):
            t = self.expr(cls, m, e.operand, scopes)
            want = A.INT if e.op == "-" else A.BOOLEAN
            if t not in (want, UNKNOWN):
                self.err(e.span, f"operator {e.op} expects {want}, not {t}")
            return want
        if isinstance(e, A.Binary):
            lt = self.expr(cls, m, e.left, scopes)
            rt = self.expr(cls, m, e.right, scopes)
            if e.op in A.ARITH_OPS or e.op in A.REL_OPS:
                for t in (lt, rt):
                    if t not in (A.INT, UNKNOWN):
                        self.err(e.span, f"operator {e.op} expects int, not {t}")
                return A.INT if e.op in A.ARITH_OPS else A.BOOLEAN
            if e.op in A.LOGIC_OPS:
                for t in (lt, rt):
                    if t not in (A.BOOLEAN, UNKNOWN):
                        self.err(e.span, f"operator {e.op} expects boolean, not {t}")
                return A.BOOLEAN
            # equality: same primitive, or reference types
            if lt is not UNKNOWN and rt is not UNKNOWN:
                prim = {lt, rt} & {A.INT, A.BOOLEAN}
                if prim and lt != rt:
                    self.err(e.span, f"cannot compare {lt} with {rt}")
            return A.BOOLEAN
        if isinstance(e, A.New):
            arg_types = [self.expr(cls, m, a, scopes) for a in e.args]
            target = self.p.classes.get(e.class_name)
            if target is None:
                self.err(e.span, f"unknown class {e.class_name!r}")
                return UNKNOWN
            if target.is_abstract:
                self.err(e.span, f"cannot instantiate abstract class {e.class_name}")
            ctors = [c for c in target.methods if c.is_constructor]
            ctor = target.method(e.class_name, len(e.args))
            if ctors or e.args:
                if ctor is None or not ctor.is_constructor:
                    self.err(e.span, f"no constructor {e.class_name}/{len(e.args)}")
                else:
                    self.check_args(e, ctor, arg_types)
            return e.class_name
        if isinstance(e, A.Call):
            return self.call(cls, m, e, scopes)
        raise TypeError(f"unexpected node {e!r}")

    def field_type(self, class_name: str, name: str) -> Optional[str]:
        for c in self.p.superclass_chain(class_name):
            t = c.field_type(name)
            if t is not None:
                return t
        return None

    def check_args(self, node, decl: A.MethodDecl, arg_types) -> None:
        for prm, t in zip(decl.params, arg_types):
            if not self.assignable(t, prm.type):
                self.err(node.span, f"argument {prm.name}: cannot pass {t} as {prm.type}")

    def call(self, cls, m, e: A.Call, scopes) -> Optional[str]:
        arg_types = [self.expr(cls, m, a, scopes) for a in e.args]
        arity = len(e.args)
        if e.is_super:
            if cls.superclass is None:
                self.err(e.span, f"super call in {cls.name}, which has no superclass")
                return UNKNOWN
            e.static_class = cls.superclass
            found = self.p.lookup_method(cls.superclass, e.name, arity, concrete=True)
            if found is None:
                self.err(e.span, f"no concrete super implementation of {e.name}/{arity}")
                return UNKNOWN
        else:
            if e.receiver is None:
                recv_t = cls.name
            else:
                recv_t = self.expr(cls, m, e.receiver, scopes)
                if recv_t is UNKNOWN:
                    return UNKNOWN
                if recv_t not in self.p.classes:
                    self.err(e.span, f"cannot call {e.name} on {recv_t}")
                    return UNKNOWN
            e.static_class = recv_t
            found = self.p.lookup_method(recv_t, e.name, arity)
            if found is None:
                self.warn(e.span, f"call to undeclared member {recv_t}.{e.name}/{arity}")
                return UNKNOWN
        decl = found[1]
        self.check_args(e, decl, arg_types)
        return None if decl.return_type == A.VOID else decl.return_type


def _hierarchy_errors(classes: dict[str, A.ClassDecl]) -> list[Diagnostic]:
    out = []
    for cls in classes.values():
        if cls.superclass is not None and cls.superclass not in classes:
            out.append(Diagnostic(cls.span.file, cls.span.line, cls.span.col,
                                  f"unknown superclass {cls.superclass!r} of {cls.name}"))
    for cls in classes.values():
        seen = {cls.name}
        cur = cls.superclass
        while cur is not None and cur in classes:
            if cur in seen:
                out.append(Diagnostic(cls.span.file, cls.span.line, cls.span.col,
                                      f"inheritance cycle through {cls.name}"))
                break
            seen.add(cur)
            cur = classes[cur].superclass
    return out


def resolve(classes: list[A.ClassDecl]) -> A.Program:
    """Build a Program from parsed classes; raise SemanticError on failure."""
    errors: list[Diagnostic] = []
    table: dict[str, A.ClassDecl] = {}
    for cls in classes:
        if cls.name in table:
            errors.append(Diagnostic(cls.span.file, cls.span.line, cls.span.col,
                                     f"duplicate class {cls.name}"))
            continue
        table[cls.name] = cls
    errors.extend(_hierarchy_errors(table))
    if errors:
        raise SemanticError(errors)
    program = A.Program(dict(sorted(table.items())))
    checker = _Checker(program)
    for cls in program.classes.values():
        checker.check_class(cls)
    if checker.errors:
        raise SemanticError(checker.errors)
    program.warnings = checker.warnings
    return program
