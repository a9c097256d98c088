"""Random MiniOO programs with passing test suites.

Programs are built as syntax trees and printed, so they always parse.
Generation guarantees:

* termination: a method named ``mK`` only calls names ``mJ`` with J < K
  (plus ``super.mK``, which strictly climbs the hierarchy); methods never
  allocate, constructors only allocate lower-indexed classes;
* no null receivers: every class with object fields has a constructor
  assigning all of them;
* passing baselines: each test asserts the value its probe run produced.

Overrides, abstract methods, unrelated classes sharing method names,
constructors calling methods and ``setUp`` fields holding subclass
instances give the selector real polymorphism to deal with.
"""
from __future__ import annotations

import copy
import random
from dataclasses import dataclass, field
from typing import Optional

from .frontend import ast as A
from .frontend.parser import FrontendError, parse_program
from .frontend.printer import program_to_str
from .runtime import Interpreter


@dataclass(frozen=True)
class CorpusConfig:
    max_classes: int = 15
    max_depth: int = 4
    max_methods: int = 40
    n_names: int = 6
    max_production: int = 9
    max_test_classes: int = 4
    probe_budget: int = 50_000


@dataclass
class _Cls:
    idx: int
    name: str
    parent: Optional["_Cls"]
    abstract: bool
    depth: int
    methods: dict[str, bool] = field(default_factory=dict)  # name -> concrete
    int_field: Optional[str] = None
    obj_fields: list[tuple[str, str]] = field(default_factory=list)  # (name, type)
    ctor_arity: Optional[int] = None

    def chain(self):
        c = self
        while c is not None:
            yield c
            c = c.parent


class _Gen:
    def __init__(self, seed: int, cfg: CorpusConfig):
        self.rng = random.Random(seed)
        self.cfg = cfg
        self.names = [f"m{i}" for i in range(cfg.n_names)]
        self.arity = {n: self.rng.randint(0, 2) for n in self.names}
        self.method_budget = cfg.max_methods

    # -- structure --

    def build_classes(self) -> list[_Cls]:
        rng, cfg = self.rng, self.cfg
        n = rng.randint(2, cfg.max_production)
        classes: list[_Cls] = []
        for i in range(n):
            parent = None
            eligible = [c for c in classes if c.depth < cfg.max_depth]
            if eligible and rng.random() < 0.65:
                parent = rng.choice(eligible)
            cls = _Cls(i, f"P{i}", parent, rng.random() < 0.2, 1 if parent is None else parent.depth + 1)
            classes.append(cls)
        for cls in classes:
            k = rng.randint(1, 3)
            for name in rng.sample(self.names, k):
                if self.method_budget <= 12:
                    break
                concrete = not (cls.abstract and rng.random() < 0.4)
                cls.methods[name] = concrete
                self.method_budget -= 1
        return classes

    def visible(self, cls: _Cls) -> dict[str, bool]:
        """Visible names -> whether dispatch from ``cls`` finds a body."""
        out: dict[str, bool] = {}
        for c in cls.chain():
            for name, concrete in c.methods.items():
                out[name] = out.get(name, False) or concrete
        return out

    def instantiable(self, cls: _Cls) -> bool:
        return not cls.abstract and all(self.visible(cls).values())

    def descendants(self, cls: _Cls, classes: list[_Cls]) -> list[_Cls]:
        return [c for c in classes if cls in c.chain()]

    def add_fields(self, classes: list[_Cls]) -> None:
        rng = self.rng
        for cls in classes:
            if rng.random() < 0.7:
                cls.int_field = f"v{cls.idx}"
            if cls.idx > 0 and rng.random() < 0.45:
                target = rng.choice(classes[:cls.idx])
                options = [c for c in self.descendants(target, classes)
                           if c.idx < cls.idx and self.instantiable(c)]
                if options:
                    cls.obj_fields.append((f"d{cls.idx}", target.name))
        for cls in classes:
            visible_obj = [f for c in cls.chain() for f in c.obj_fields]
            if not self.instantiable(cls):
                continue
            if visible_obj or (self.method_budget > 10 and rng.random() < 0.5):
                cls.ctor_arity = rng.randint(0, 1)
                self.method_budget -= 1

    # -- expressions --

    def lit(self) -> A.IntLit:
        return A.IntLit(self.rng.randint(0, 9))

    def atom(self, scope: list[str]) -> A.Expr:
        if scope and self.rng.random() < 0.6:
            return A.Name(self.rng.choice(scope))
        return self.lit()

    def call(self, cls: _Cls, level: int, scope: list[str], classes_by_name,
             allow_super: Optional[str] = None) -> Optional[A.Expr]:
        rng = self.rng
        options = []
        lower = {n for n in self.names[:level]}
        for name in sorted(set(self.visible(cls)) & lower):
            options.append((None, name))
        for c in cls.chain():
            for fname, ftype in c.obj_fields:
                for name in sorted(set(self.visible(classes_by_name[ftype])) & lower):
                    options.append((fname, name))
        if allow_super is not None:
            options.append(("super", allow_super))
        if not options:
            return None
        recv, name = rng.choice(options)
        args = [self.atom(scope) for _ in range(self.arity[name])]
        if recv == "super":
            return A.Call(None, name, args, is_super=True)
        return A.Call(None if recv is None else A.Name(recv), name, args)

    def int_expr(self, cls: _Cls, level: int, scope: list[str], classes_by_name,
                 calls: list[int], allow_super=None, depth: int = 0) -> A.Expr:
        rng = self.rng
        roll = rng.random()
        if calls[0] > 0 and roll < 0.35:
            c = self.call(cls, level, scope, classes_by_name, allow_super)
            if c is not None:
                calls[0] -= 1
                if c.is_super:
                    allow_super = None
                return c
        if depth < 2 and roll < 0.75:
            op = rng.choice(["+", "+", "-", "*", "/"])
            left = self.int_expr(cls, level, scope, classes_by_name, calls, allow_super, depth + 1)
            if op == "/":
                return A.Binary(op, left, A.IntLit(rng.randint(1, 5)))
            right = self.int_expr(cls, level, scope, classes_by_name, calls, allow_super, depth + 1)
            return A.Binary(op, left, right)
        return self.atom(scope)

    def method_body(self, cls: _Cls, name: str, classes_by_name) -> A.Block:
        rng = self.rng
        level = self.names.index(name)
        params = [f"p{i}" for i in range(self.arity[name])]
        fields_ = [c.int_field for c in cls.chain() if c.int_field]
        scope = params + fields_
        super_ok = None
        if cls.parent is not None and self.visible(cls.parent).get(name):
            super_ok = name
        calls = [2]
        stmts: list[A.Stmt] = [A.VarDecl(A.INT, "t", self.int_expr(
            cls, level, scope, classes_by_name, calls, super_ok))]
        scope = scope + ["t"]
        if rng.random() < 0.6:
            cond = A.Binary(rng.choice(list(A.REL_OPS) + ["==", "!="]), A.Name("t"), self.lit())
            if rng.random() < 0.3:
                cond = A.Binary(rng.choice(["&&", "||"]), cond, A.BoolLit(rng.random() < 0.5))
            then = A.Block([A.Assign(A.Name("t"), self.int_expr(
                cls, level, scope, classes_by_name, calls))])
            orelse = None
            if rng.random() < 0.6:
                orelse = A.Block([A.Assign(A.Name("t"), A.Binary(
                    rng.choice(["+", "-"]), A.Name("t"), self.atom(scope)))])
            stmts.append(A.If(cond, then, orelse))
        if rng.random() < 0.3:
            bound = rng.randint(1, 3)
            stmts.append(A.VarDecl(A.INT, "i", A.IntLit(0)))
            stmts.append(A.While(A.Binary("<", A.Name("i"), A.IntLit(bound)), A.Block([
                A.Assign(A.Name("t"), A.Binary("+", A.Name("t"), A.Name(rng.choice(["i"] + scope)))),
                A.Assign(A.Name("i"), A.Binary("+", A.Name("i"), A.IntLit(1))),
            ])))
        if fields_ and rng.random() < 0.2:
            f = rng.choice(fields_)
            stmts.append(A.Assign(A.Name(f), A.Binary("+", A.Name(f), A.IntLit(1))))
        stmts.append(A.Return(A.Name("t")))
        return A.Block(stmts)

    def ctor_body(self, cls: _Cls, classes: list[_Cls], classes_by_name) -> A.Block:
        rng = self.rng
        stmts: list[A.Stmt] = []
        for c in cls.chain():
            for fname, ftype in c.obj_fields:
                options = [d for d in self.descendants(classes_by_name[ftype], classes)
                           if d.idx < cls.idx and self.instantiable(d)]
                target = rng.choice(options)
                stmts.append(A.Assign(A.Name(fname), self.new_expr(target)))
        int_fields = [c.int_field for c in cls.chain() if c.int_field]
        params = ["p0"] if cls.ctor_arity == 1 else []
        if int_fields:
            calls = [1]
            value = self.int_expr(cls, len(self.names), params, classes_by_name, calls)
            if calls[0] == 1 and rng.random() < 0.7:
                c = self.call(cls, len(self.names), params, classes_by_name)
                if c is not None:
                    value = A.Binary("+", c, value)
            stmts.append(A.Assign(A.Name(rng.choice(int_fields)), value))
        return A.Block(stmts)

    def new_expr(self, target: _Cls) -> A.New:
        args = [] if not target.ctor_arity else [self.lit()]
        return A.New(target.name, args)

    # -- program --

    def production(self, classes: list[_Cls]) -> list[A.ClassDecl]:
        by_name = {c.name: c for c in classes}
        out = []
        for cls in classes:
            fields_ = []
            if cls.int_field:
                fields_.append(A.FieldDecl(A.INT, cls.int_field))
            fields_ += [A.FieldDecl(t, n) for n, t in cls.obj_fields]
            methods = []
            if cls.ctor_arity is not None:
                params = [A.Param(A.INT, "p0")] if cls.ctor_arity else []
                methods.append(A.MethodDecl(cls.name, A.VOID, params,
                                            self.ctor_body(cls, classes, by_name), is_constructor=True))
            for name, concrete in cls.methods.items():
                params = [A.Param(A.INT, f"p{i}") for i in range(self.arity[name])]
                body = self.method_body(cls, name, by_name) if concrete else None
                methods.append(A.MethodDecl(name, A.INT, params, body))
            out.append(A.ClassDecl(cls.name, cls.parent.name if cls.parent else None,
                                   fields_, methods, cls.abstract))
        return out

    def test_classes(self, classes: list[_Cls]) -> list[tuple[A.ClassDecl, list[tuple[str, A.Block]]]]:
        """Test classes with int-returning probe methods (converted later)."""
        rng, cfg = self.rng, self.cfg
        room = min(cfg.max_test_classes, cfg.max_classes - len(classes))
        out = []
        for k in range(rng.randint(1, max(1, room))):
            target = rng.choice(classes)
            impls = [c for c in self.descendants(target, classes) if self.instantiable(c)]
            visible = sorted(self.visible(target))
            if not impls or not visible:
                continue
            fields_ = [A.FieldDecl(target.name, "x")]
            methods = []
            self.method_budget -= 1
            methods.append(A.MethodDecl("setUp", A.VOID, [], A.Block(
                [A.Assign(A.Name("x"), self.new_expr(rng.choice(impls)))])))
            helper = None
            if self.method_budget > 4 and rng.random() < 0.4:
                name = rng.choice(visible)
                helper = A.MethodDecl("helper", A.INT, [], A.Block([A.Return(A.Call(
                    A.Name("x"), name, [self.lit() for _ in range(self.arity[name])]))]))
                methods.append(helper)
                self.method_budget -= 1
            probes = []
            for j in range(rng.randint(1, 3)):
                if self.method_budget <= 0:
                    break
                self.method_budget -= 1
                test_name = f"test{j}" if rng.random() < 0.7 else f"case{j}Test"
                name = rng.choice(visible)
                args = [self.lit() for _ in range(self.arity[name])]
                roll = rng.random()
                stmts: list[A.Stmt]
                if roll < 0.5:
                    stmts = [A.VarDecl(A.INT, "r", A.Call(A.Name("x"), name, args))]
                elif roll < 0.8 or helper is None:
                    local_cls = rng.choice(impls)
                    stmts = [A.VarDecl(target.name, "y", self.new_expr(local_cls)),
                             A.VarDecl(A.INT, "r", A.Call(A.Name("y"), name, args))]
                else:
                    stmts = [A.VarDecl(A.INT, "r", A.Call(None, "helper", []))]
                probes.append((test_name, A.Block(stmts)))
            if probes:
                out.append((A.ClassDecl(f"T{k}Test", None, fields_, methods), probes))
        return out


def _finish_tests(probe_program: A.Program, tests, budget: int) -> list[A.ClassDecl]:
    interp = Interpreter(probe_program, step_budget=budget)
    out = []
    for cls, probes in tests:
        methods = list(cls.methods)
        for name, block in probes:
            try:
                value = interp.invoke(cls.name, name)
            except RuntimeError:
                continue
            body = A.Block(list(block.stmts) + [A.Assert(A.Binary("==", A.Name("r"), _int_lit(value)))])
            methods.append(A.MethodDecl(name, A.VOID, [], body))
        if len(methods) > len(cls.methods):
            out.append(A.ClassDecl(cls.name, cls.superclass, cls.fields, methods))
    return out


def _int_lit(value: int) -> A.Expr:
    return A.IntLit(value) if value >= 0 else A.Unary("-", A.IntLit(-value))


def generate_program(seed: int, cfg: CorpusConfig = CorpusConfig()) -> A.Program:
    """A random, resolvable program whose tests all pass."""
    g = _Gen(seed, cfg)
    classes = g.build_classes()
    g.add_fields(classes)
    production = g.production(classes)
    tests = g.test_classes(classes)
    probe_classes = list(production)
    for cls, probes in tests:
        probe_methods = list(cls.methods) + [
            A.MethodDecl(name, A.INT, [], A.Block(list(block.stmts) + [A.Return(A.Name("r"))]))
            for name, block in probes]
        probe_classes.append(A.ClassDecl(cls.name, None, cls.fields, probe_methods))
    probe = parse_program(program_to_str(A.Program({c.name: c for c in probe_classes})))
    final = production + _finish_tests(probe, tests, cfg.probe_budget)
    return parse_program(program_to_str(A.Program({c.name: c for c in final})), f"gen{seed}.moo")


def generate_source(seed: int, cfg: CorpusConfig = CorpusConfig()) -> str:
    return program_to_str(generate_program(seed, cfg))


def generate_corpus(n: int, seed: int = 0, cfg: CorpusConfig = CorpusConfig()) -> list[A.Program]:
    return [generate_program(seed + i, cfg) for i in range(n)]


# -- evolution -----------------------------------------------------------------

def _int_lits(node):
    from .mutator import walk
    return [(path, n) for path, n in walk(node) if isinstance(n, A.IntLit)]


def evolve(p: A.Program, seed: int, steps: int = 3) -> A.Program:
    """A plausible next snapshot of ``p``: literal edits, added or removed
    overrides, duplicated return expressions. Test assertions may no longer
    hold; the result is meant for change distillation, not execution."""
    from .mutator import _set

    rng = random.Random(seed)
    cur = p
    for _ in range(steps):
        classes = {n: copy.deepcopy(c) for n, c in cur.classes.items()}
        prod = [c for c in classes.values() if not c.name.endswith("Test")]
        op = rng.choice(["literal", "override", "remove", "duplicate"])
        bodies = [(c, m) for c in prod for m in c.methods if m.body is not None]
        if op == "literal" and bodies:
            c, m = rng.choice(bodies)
            lits = _int_lits(m.body)
            if lits:
                path, lit = rng.choice(lits)
                _set(m.body, path, A.IntLit(lit.value + rng.randint(1, 3)))
        elif op == "override":
            options = []
            for c in prod:
                view = A.Program(cur.classes)
                if c.superclass is None:
                    continue
                for anc in list(view.superclass_chain(c.superclass)):
                    for m in anc.methods:
                        if (not m.is_constructor and m.body is not None
                                and c.method(m.name, m.arity) is None):
                            options.append((c, m))
            if options:
                c, m = rng.choice(options)
                clone = copy.deepcopy(m)
                lits = _int_lits(clone.body)
                if lits:
                    path, lit = rng.choice(lits)
                    _set(clone.body, path, A.IntLit(lit.value + 1))
                c.methods.append(clone)
        elif op == "remove":
            view = A.Program(cur.classes)
            options = [(c, m) for c in prod if c.superclass for m in c.methods
                       if not m.is_constructor and m.body is not None
                       and view.lookup_method(c.superclass, m.name, m.arity, concrete=True)]
            if options:
                c, m = rng.choice(options)
                c.methods.remove(m)
        elif op == "duplicate" and bodies:
            c, m = rng.choice(bodies)
            ret = m.body.stmts[-1] if m.body.stmts else None
            if isinstance(ret, A.Return) and ret.value is not None:
                ret.value = A.Binary("+", ret.value, copy.deepcopy(ret.value))
        try:
            cur = parse_program(program_to_str(A.Program(classes)), "evolved.moo")
        except FrontendError:
            continue
    return cur
