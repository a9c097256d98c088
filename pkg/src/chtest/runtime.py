"""Tree-walking interpreter for MiniOO with dynamic dispatch.

Running a test records every dispatched call in its trace; the traces are
the ground truth against which static test selection is checked.

Semantics worth knowing:

* ``int`` is 32-bit two's complement; division truncates toward zero.
* Fields default to 0 / false / null. Calling a method on null, dividing by
  zero, reaching an abstract method with no concrete override, exceeding
  the step budget or the call-depth limit all end the test with ``Error``.
* ``new C(args)`` runs C's own constructor of that arity, if it declares
  one. Constructors do not chain to superclass constructors.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional

from .config import DEFAULT_CONFIG, TestConfig
from .frontend import ast as A
from .model import method_id

DEFAULT_STEP_BUDGET = 1_000_000
MAX_CALL_DEPTH = 200
STEP_BUDGET_ENV = "CHTEST_STEP_BUDGET"


def default_step_budget() -> int:
    raw = os.environ.get(STEP_BUDGET_ENV)
    if raw:
        try:
            value = int(raw)
        except ValueError:
            raise ValueError(f"{STEP_BUDGET_ENV} must be an integer, got {raw!r}") from None
        if value <= 0:
            raise ValueError(f"{STEP_BUDGET_ENV} must be positive")
        return value
    return DEFAULT_STEP_BUDGET


class Status(str, Enum):
    PASS = "Pass"
    FAIL = "Fail"
    ERROR = "Error"


@dataclass(frozen=True)
class TraceEntry:
    """One dispatched call: the receiver's allocation class, the called
    name/arity, the class whose body ran, and whether a constructor frame
    was on the stack at the time."""

    runtime_class: str
    method: str
    arity: int
    resolved_class: str
    via_constructor: bool = False

    @property
    def resolved_id(self) -> str:
        return method_id(self.resolved_class, self.method, self.arity)


@dataclass
class TestOutcome:
    __test__ = False

    testId: str
    status: Status
    trace: tuple[TraceEntry, ...] = ()
    stepCount: int = 0
    message: str = ""

    def executed(self) -> set[str]:
        """Method ids whose bodies ran during the test."""
        return {e.resolved_id for e in self.trace}

    def to_json(self) -> dict:
        return {
            "testId": self.testId,
            "status": self.status.value,
            "stepCount": self.stepCount,
            "message": self.message,
            "trace": [[e.runtime_class, f"{e.method}/{e.arity}", e.resolved_class,
                       e.via_constructor] for e in self.trace],
        }


class Obj:
    __slots__ = ("cls", "fields")

    def __init__(self, cls: str, fields: dict):
        self.cls = cls
        self.fields = fields

    def __repr__(self) -> str:
        return f"<{self.cls}@{id(self):x}>"


class _Fault(Exception):
    pass


class _AssertFailed(Exception):
    pass


class _Ret:
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value


_NO_RETURN = _Ret(None)


def _wrap(x: int) -> int:
    return ((x + 0x80000000) & 0xFFFFFFFF) - 0x80000000


def _default(t: str):
    if t == A.INT:
        return 0
    if t == A.BOOLEAN:
        return False
    return None


def parse_test_id(test_id: str) -> tuple[str, str, int]:
    body = test_id[len("method:"):] if test_id.startswith("method:") else test_id
    qual, _, arity = body.rpartition("/")
    cls, _, name = qual.rpartition(".")
    if not cls or not name or not arity.isdigit():
        raise ValueError(f"not a method id: {test_id!r}")
    return cls, name, int(arity)


class Interpreter:
    """Executes methods of one Program. Per-run state is reset by every
    ``run_test``/``invoke`` call; dispatch tables are cached."""

    def __init__(self, program: A.Program, step_budget: Optional[int] = None,
                 cfg: TestConfig = DEFAULT_CONFIG, max_depth: int = MAX_CALL_DEPTH):
        self.p = program
        self.budget = step_budget if step_budget is not None else default_step_budget()
        self.cfg = cfg
        self.max_depth = max_depth
        self._vtables: dict[str, dict] = {}
        self._field_defaults: dict[str, list[tuple[str, object]]] = {}
        self._ev = {
            A.IntLit: self._e_int, A.BoolLit: self._e_lit, A.NullLit: self._e_null,
            A.This: self._e_this, A.Name: self._e_name, A.FieldAccess: self._e_field,
            A.Unary: self._e_unary, A.Binary: self._e_binary, A.New: self._e_new,
            A.Call: self._e_call,
        }
        self._ex = {
            A.Block: self._s_block, A.VarDecl: self._s_var, A.Assign: self._s_assign,
            A.If: self._s_if, A.While: self._s_while, A.Return: self._s_return,
            A.Assert: self._s_assert, A.ExprStmt: self._s_expr,
        }
        self._reset()

    def _reset(self) -> None:
        self.steps = 0
        self.trace: list[TraceEntry] = []
        self.depth = 0
        self.ctor_depth = 0

    # -- dispatch --

    def resolve(self, class_name: str, name: str, arity: int):
        """Nearest concrete (class, method) at or above ``class_name``."""
        vt = self._vtables.setdefault(class_name, {})
        key = (name, arity)
        if key not in vt:
            found = self.p.lookup_method(class_name, name, arity, concrete=True)
            vt[key] = found
        return vt[key]

    def _fields_of(self, class_name: str):
        fd = self._field_defaults.get(class_name)
        if fd is None:
            fd = [(f.name, _default(f.type)) for f in self.p.all_fields(class_name)]
            self._field_defaults[class_name] = fd
        return fd

    def _tick(self) -> None:
        self.steps += 1
        if self.steps > self.budget:
            raise _Fault(f"step budget of {self.budget} exceeded")

    def _invoke(self, cls: A.ClassDecl, m: A.MethodDecl, this: Obj, args: list):
        if self.depth >= self.max_depth:
            raise _Fault("stack overflow")
        env = {p.name: v for p, v in zip(m.params, args)}
        frame = (this, env)
        self.depth += 1
        try:
            r = self._s_block(m.body, frame)
        finally:
            self.depth -= 1
        if r is None:
            if m.return_type != A.VOID:
                raise _Fault(f"{cls.name}.{m.name} ended without returning a value")
            return None
        return r.value

    def _dispatch(self, this: Obj, name: str, arity: int, args: list, start_class: str,
                  traced: bool = True):
        found = self.resolve(start_class, name, arity)
        if found is None:
            raise _Fault(f"unresolved dispatch of {name}/{arity} on {this.cls}")
        cls, m = found
        if traced:
            self.trace.append(TraceEntry(this.cls, name, arity, cls.name, self.ctor_depth > 0))
        return self._invoke(cls, m, this, args)

    def instantiate(self, class_name: str, args: list, traced: bool = True) -> Obj:
        self._tick()
        obj = Obj(class_name, dict(self._fields_of(class_name)))
        cls = self.p.classes[class_name]
        ctor = cls.method(class_name, len(args))
        if ctor is not None and ctor.is_constructor:
            if traced:
                self.trace.append(TraceEntry(class_name, class_name, len(args), class_name,
                                             self.ctor_depth > 0))
            self.ctor_depth += 1
            try:
                self._invoke(cls, ctor, obj, args)
            finally:
                self.ctor_depth -= 1
        return obj

    # -- statements --

    def _exec(self, s, frame):
        self._tick()
        return self._ex[type(s)](s, frame)

    def _s_block(self, b: A.Block, frame):
        env = frame[1]
        declared = []
        try:
            for s in b.stmts:
                if type(s) is A.VarDecl:
                    declared.append(s.name)
                r = self._exec(s, frame)
                if r is not None:
                    return r
            return None
        finally:
            for name in declared:
                env.pop(name, None)

    def _s_var(self, s: A.VarDecl, frame):
        frame[1][s.name] = _default(s.type) if s.init is None else self._eval(s.init, frame)

    def _s_assign(self, s: A.Assign, frame):
        value = self._eval(s.value, frame)
        t = s.target
        this, env = frame
        if type(t) is A.Name and t.ident in env:
            env[t.ident] = value
        else:
            name = t.ident if type(t) is A.Name else t.name
            this.fields[name] = value

    def _s_if(self, s: A.If, frame):
        if self._eval(s.cond, frame):
            return self._s_block(s.then, frame)
        if s.orelse is not None:
            return self._s_block(s.orelse, frame)
        return None

    def _s_while(self, s: A.While, frame):
        while self._eval(s.cond, frame):
            r = self._s_block(s.body, frame)
            if r is not None:
                return r
            self._tick()
        return None

    def _s_return(self, s: A.Return, frame):
        if s.value is None:
            return _NO_RETURN
        return _Ret(self._eval(s.value, frame))

    def _s_assert(self, s: A.Assert, frame):
        if not self._eval(s.cond, frame):
            raise _AssertFailed(f"assertion failed at line {s.span.line}")

    def _s_expr(self, s: A.ExprStmt, frame):
        self._eval(s.expr, frame)

    # -- expressions --

    def _eval(self, e, frame):
        return self._ev[type(e)](e, frame)

    def _e_lit(self, e, frame):
        return e.value

    def _e_int(self, e, frame):
        return _wrap(e.value)

    def _e_null(self, e, frame):
        return None

    def _e_this(self, e, frame):
        return frame[0]

    def _e_name(self, e: A.Name, frame):
        env = frame[1]
        if e.ident in env:
            return env[e.ident]
        return frame[0].fields[e.ident]

    def _e_field(self, e: A.FieldAccess, frame):
        return frame[0].fields[e.name]

    def _e_unary(self, e: A.Unary, frame):
        v = self._eval(e.operand, frame)
        return _wrap(-v) if e.op == "-" else not v

    def _e_binary(self, e: A.Binary, frame):
        op = e.op
        if op == "&&":
            return bool(self._eval(e.left, frame)) and bool(self._eval(e.right, frame))
        if op == "||":
            return bool(self._eval(e.left, frame)) or bool(self._eval(e.right, frame))
        a = self._eval(e.left, frame)
        b = self._eval(e.right, frame)
        if op == "+":
            return _wrap(a + b)
        if op == "-":
            return _wrap(a - b)
        if op == "*":
            return _wrap(a * b)
        if op == "/":
            if b == 0:
                raise _Fault("division by zero")
            q = abs(a) // abs(b)
            return _wrap(q if (a < 0) == (b < 0) else -q)
        if op == "==":
            return a is b if isinstance(a, Obj) or isinstance(b, Obj) else a == b
        if op == "!=":
            return a is not b if isinstance(a, Obj) or isinstance(b, Obj) else a != b
        if op == "<":
            return a < b
        if op == "<=":
            return a <= b
        if op == ">":
            return a > b
        if op == ">=":
            return a >= b
        raise _Fault(f"unknown operator {op}")

    def _e_new(self, e: A.New, frame):
        args = [self._eval(a, frame) for a in e.args]
        return self.instantiate(e.class_name, args)

    def _e_call(self, e: A.Call, frame):
        this = frame[0]
        if e.is_super:
            args = [self._eval(a, frame) for a in e.args]
            self._tick()
            return self._dispatch(this, e.name, len(args), args, e.static_class)
        recv = this if e.receiver is None else self._eval(e.receiver, frame)
        args = [self._eval(a, frame) for a in e.args]
        self._tick()
        if recv is None:
            raise _Fault(f"call of {e.name} on null")
        return self._dispatch(recv, e.name, len(args), args, recv.cls)

    # -- harness --

    # harness calls (test class constructor, setUp, the test itself) are not
    # traced; the trace holds only what the test code dispatched

    def _fixture_instance(self, class_name: str) -> Obj:
        obj = self.instantiate(class_name, [], traced=False)
        for name in self.cfg.fixture_methods:
            found = self.resolve(class_name, name, 0)
            if found is not None:
                self._dispatch(obj, name, 0, [], class_name, traced=False)
                break
        return obj

    def invoke(self, class_name: str, method: str, args: Iterable = ()):
        """Run ``method`` on a fresh, set-up instance of ``class_name`` and
        return its value. Faults propagate as RuntimeError."""
        self._reset()
        args = list(args)
        try:
            obj = self._fixture_instance(class_name)
            self._tick()
            return self._dispatch(obj, method, len(args), args, class_name, traced=False)
        except (_Fault, _AssertFailed, RecursionError) as exc:
            raise RuntimeError(str(exc) or type(exc).__name__) from None

    def run_test(self, test_id: str) -> TestOutcome:
        self._reset()
        try:
            cls, name, arity = parse_test_id(test_id)
            if cls not in self.p.classes or arity != 0:
                raise _Fault(f"no such test {test_id}")
            obj = self._fixture_instance(cls)
            self._tick()
            self._dispatch(obj, name, 0, [], cls, traced=False)
            status, message = Status.PASS, ""
        except _AssertFailed as exc:
            status, message = Status.FAIL, str(exc)
        except _Fault as exc:
            status, message = Status.ERROR, str(exc)
        except RecursionError:
            status, message = Status.ERROR, "stack overflow"
        except ValueError as exc:
            status, message = Status.ERROR, str(exc)
        return TestOutcome(test_id, status, tuple(self.trace), self.steps, message)


def run_test(p: A.Program, test_id: str, step_budget: Optional[int] = None,
             cfg: TestConfig = DEFAULT_CONFIG) -> TestOutcome:
    return Interpreter(p, step_budget, cfg).run_test(test_id)


def discover_tests(p: A.Program, cfg: TestConfig = DEFAULT_CONFIG) -> list[str]:
    """Test method ids declared in ``p``, sorted."""
    out = []
    for c in p.classes.values():
        for m in c.methods:
            if cfg.is_test_method(c.name, m.name, m.arity, m.is_abstract, m.is_constructor):
                out.append(method_id(c.name, m.name, m.arity))
    return sorted(out)


def run_suite(p: A.Program, tests: Optional[Iterable[str]] = None,
              step_budget: Optional[int] = None,
              cfg: TestConfig = DEFAULT_CONFIG) -> dict[str, TestOutcome]:
    """Run each test on a fresh heap; the result is keyed and sorted by id."""
    interp = Interpreter(p, step_budget, cfg)
    ids = discover_tests(p, cfg) if tests is None else sorted(set(tests))
    return {t: interp.run_test(t) for t in ids}


def dynamic_relevant_tests(p: A.Program, method: str,
                           outcomes: Optional[dict[str, TestOutcome]] = None,
                           cfg: TestConfig = DEFAULT_CONFIG) -> set[str]:
    """Tests whose trace ran the body of ``method`` (a method id)."""
    if outcomes is None:
        outcomes = run_suite(p, cfg=cfg)
    return {t for t, o in outcomes.items() if any(e.resolved_id == method for e in o.trace)}


def constructor_only(outcome: TestOutcome, method: str) -> bool:
    """True when every execution of ``method`` in the trace happened under
    a constructor frame (or ``method`` is itself a constructor)."""
    hits = [e for e in outcome.trace if e.resolved_id == method]
    return bool(hits) and all(e.via_constructor or e.method == e.resolved_class for e in hits)
