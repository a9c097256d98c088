"""Extraction of class, method and invocation subjects from a Program."""
from __future__ import annotations

from collections import Counter
from typing import Iterator

from ..config import DEFAULT_CONFIG, TestConfig
from ..model import (Subject, SubjectKind, class_id, invocation_id, method_id)
from . import ast as A


def iter_calls(node) -> Iterator:
    """Call and New nodes under ``node`` in evaluation order (pre-order,
    receiver before arguments, left before right)."""
    if isinstance(node, (A.Call, A.New)):
        yield node
    if isinstance(node, A.Call):
        if node.receiver is not None:
            yield from iter_calls(node.receiver)
        for a in node.args:
            yield from iter_calls(a)
    elif isinstance(node, A.New):
        for a in node.args:
            yield from iter_calls(a)
    elif isinstance(node, A.Unary):
        yield from iter_calls(node.operand)
    elif isinstance(node, A.Binary):
        yield from iter_calls(node.left)
        yield from iter_calls(node.right)
    elif isinstance(node, A.Block):
        for s in node.stmts:
            yield from iter_calls(s)
    elif isinstance(node, A.VarDecl):
        if node.init is not None:
            yield from iter_calls(node.init)
    elif isinstance(node, A.Assign):
        yield from iter_calls(node.value)
    elif isinstance(node, A.If):
        yield from iter_calls(node.cond)
        yield from iter_calls(node.then)
        if node.orelse is not None:
            yield from iter_calls(node.orelse)
    elif isinstance(node, A.While):
        yield from iter_calls(node.cond)
        yield from iter_calls(node.body)
    elif isinstance(node, (A.Return, A.Assert, A.ExprStmt)):
        inner = getattr(node, "value", None) if isinstance(node, A.Return) else (
            node.cond if isinstance(node, A.Assert) else node.expr)
        if inner is not None:
            yield from iter_calls(inner)


def call_signature(node) -> tuple[str, str, int, str | None, bool, bool]:
    """(signature text, identifier, arity, static receiver class, is_super, is_ctor)."""
    if isinstance(node, A.New):
        arity = len(node.args)
        return f"new:{node.class_name}/{arity}", node.class_name, arity, node.class_name, False, True
    arity = len(node.args)
    recv = node.static_class or "?"
    prefix = "super:" if node.is_super else ""
    return f"{prefix}{recv}.{node.name}/{arity}", node.name, arity, node.static_class, node.is_super, False


def method_subject(cls: A.ClassDecl, m: A.MethodDecl, cfg: TestConfig = DEFAULT_CONFIG) -> Subject:
    return Subject(
        id=method_id(cls.name, m.name, m.arity),
        kind=SubjectKind.METHOD,
        identifier=m.name,
        arity=m.arity,
        ownerId=class_id(cls.name),
        isAbstract=m.is_abstract,
        isTest=cfg.is_test_method(cls.name, m.name, m.arity, m.is_abstract, m.is_constructor),
        isConstructor=m.is_constructor,
    )


def invocation_subjects(cls: A.ClassDecl, m: A.MethodDecl,
                        include_constructors: bool = False) -> list[Subject]:
    if m.body is None:
        return []
    owner = method_id(cls.name, m.name, m.arity)
    counts: Counter[str] = Counter()
    out = []
    for node in iter_calls(m.body):
        sig, ident, arity, recv, is_super, is_ctor = call_signature(node)
        if is_ctor and not include_constructors:
            continue
        ordinal = counts[sig]
        counts[sig] += 1
        out.append(Subject(
            id=invocation_id(owner, sig, ordinal),
            kind=SubjectKind.INVOCATION,
            identifier=ident,
            arity=arity,
            ownerId=owner,
            staticReceiverClassId=None if recv is None else class_id(recv),
            isConstructor=is_ctor,
            isSuper=is_super,
        ))
    return out


def class_subject(cls: A.ClassDecl) -> Subject:
    return Subject(
        id=class_id(cls.name),
        kind=SubjectKind.CLASS,
        identifier=cls.name,
        superclassId=None if cls.superclass is None else class_id(cls.superclass),
    )


def class_order(p: A.Program) -> list[A.ClassDecl]:
    """Classes with every superclass before its subclasses, ties by name."""
    placed: dict[str, A.ClassDecl] = {}

    def place(name: str) -> None:
        if name in placed:
            return
        cls = p.classes[name]
        if cls.superclass is not None:
            place(cls.superclass)
        placed[name] = cls

    for name in p.classes:
        place(name)
    return list(placed.values())


def extract_entities(p: A.Program, include_constructors: bool = False,
                     cfg: TestConfig = DEFAULT_CONFIG) -> list[Subject]:
    """All subjects of ``p`` ordered containers-before-contained: classes
    (superclasses first), then methods, then invocations."""
    classes = class_order(p)
    out = [class_subject(c) for c in classes]
    for c in classes:
        out.extend(method_subject(c, m, cfg) for m in c.methods)
    for c in classes:
        for m in c.methods:
            out.extend(invocation_subjects(c, m, include_constructors))
    return out
