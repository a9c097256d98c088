"""Lexer and recursive-descent parser for MiniOO.

See ``docs/grammar.md`` for the grammar. Parsing never stops at the first
error of a snapshot: each file is parsed independently and the diagnostics
of all files are raised together.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from . import ast as A

KEYWORDS = frozenset({
    "class", "extends", "abstract", "public", "private", "protected",
    "int", "boolean", "void", "if", "else", "while", "return", "assert",
    "new", "this", "super", "true", "false", "null",
})
MODIFIERS = frozenset({"public", "private", "protected", "abstract"})

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*|/\*.*?\*/)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_$][A-Za-z0-9_$]*)
  | (?P<op>&&|\|\||==|!=|<=|>=|[-+*/<>=!(){};,.])
""", re.VERBOSE | re.DOTALL)


@dataclass(frozen=True)
class Diagnostic:
    file: str
    line: int
    col: int
    message: str
    severity: str = "error"

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.col}: {self.severity}: {self.message}"


class FrontendError(Exception):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


class ParseError(FrontendError):
    """One or more syntax errors."""


class SemanticError(FrontendError):
    """One or more semantic errors (unknown classes, cycles, type errors)."""


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "ident", "kw", "op", "eof"
    text: str
    line: int
    col: int


class _Abort(Exception):
    pass


def tokenize(text: str, file: str = "<input>") -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError([Diagnostic(file, line, pos - line_start + 1,
                                         f"unexpected character {text[pos]!r}")])
        kind = m.lastgroup
        lexeme = m.group()
        if kind not in ("ws", "comment"):
            if kind == "ident" and lexeme in KEYWORDS:
                kind = "kw"
            tokens.append(Token(kind, lexeme, line, pos - line_start + 1))
        nl = lexeme.count("\n")
        if nl:
            line += nl
            line_start = pos + lexeme.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class Parser:
    def __init__(self, text: str, file: str = "<input>"):
        self.file = file
        self.toks = tokenize(text, file)
        self.i = 0
        self.errors: list[Diagnostic] = []

    # -- token helpers --

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("kw", "op") and t.text == text

    def span(self, t: Optional[Token] = None) -> A.Span:
        t = t or self.tok
        return A.Span(self.file, t.line, t.col)

    def error(self, msg: str, t: Optional[Token] = None) -> _Abort:
        t = t or self.tok
        self.errors.append(Diagnostic(self.file, t.line, t.col, msg))
        return _Abort()

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of file"
            raise self.error(f"expected {text!r}, found {found!r}")
        return self.advance()

    def ident(self) -> Token:
        if self.tok.kind != "ident":
            found = self.tok.text or "end of file"
            raise self.error(f"expected identifier, found {found!r}")
        return self.advance()

    # -- declarations --

    def parse_classes(self) -> list[A.ClassDecl]:
        classes = []
        while self.tok.kind != "eof":
            try:
                classes.append(self.class_decl())
            except _Abort:
                self._recover_to_next_class()
        return classes

    def _recover_to_next_class(self) -> None:
        self.advance()
        while self.tok.kind != "eof" and not self.at("class"):
            self.advance()

    def class_decl(self) -> A.ClassDecl:
        start = self.tok
        is_abstract = False
        while self.tok.text in MODIFIERS and self.tok.kind == "kw":
            is_abstract |= self.advance().text == "abstract"
        self.expect("class")
        name = self.ident().text
        superclass = None
        if self.at("extends"):
            self.advance()
            superclass = self.ident().text
        self.expect("{")
        fields: list[A.FieldDecl] = []
        methods: list[A.MethodDecl] = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                raise self.error("unexpected end of file in class body")
            member = self.member(name)
            if isinstance(member, A.FieldDecl):
                fields.append(member)
            else:
                methods.append(member)
        self.expect("}")
        return A.ClassDecl(name, superclass, fields, methods, is_abstract, span=self.span(start))

    def member(self, class_name: str):
        start = self.tok
        abstract_mod = False
        while self.tok.kind == "kw" and self.tok.text in MODIFIERS:
            abstract_mod |= self.advance().text == "abstract"
        if self.tok.kind == "ident" and self.tok.text == class_name and self.peek().text == "(":
            name_tok = self.advance()
            params = self.params()
            if self.at(";"):
                raise self.error("constructor must have a body")
            body = self.block()
            return A.MethodDecl(name_tok.text, A.VOID, params, body, is_constructor=True,
                                span=self.span(start))
        type_ = self.type_name()
        name_tok = self.ident()
        if self.at(";"):
            self.advance()
            if type_ == A.VOID:
                raise self.error("field cannot have type void", name_tok)
            return A.FieldDecl(type_, name_tok.text, span=self.span(start))
        params = self.params()
        if self.at(";"):
            self.advance()
            body = None
        else:
            if abstract_mod:
                raise self.error("abstract method cannot have a body")
            body = self.block()
        return A.MethodDecl(name_tok.text, type_, params, body, span=self.span(start))

    def type_name(self) -> str:
        t = self.tok
        if t.kind == "kw" and t.text in A.PRIMITIVES:
            return self.advance().text
        if t.kind == "ident":
            return self.advance().text
        raise self.error(f"expected type, found {t.text or 'end of file'!r}")

    def params(self) -> list[A.Param]:
        self.expect("(")
        params: list[A.Param] = []
        if not self.at(")"):
            while True:
                type_ = self.type_name()
                params.append(A.Param(type_, self.ident().text))
                if not self.at(","):
                    break
                self.advance()
        self.expect(")")
        return params

    # -- statements --

    def block(self) -> A.Block:
        start = self.expect("{")
        stmts = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                raise self.error("unexpected end of file in block")
            stmts.append(self.statement())
        self.expect("}")
        return A.Block(stmts, span=self.span(start))

    def statement(self) -> A.Stmt:
        t = self.tok
        sp = self.span(t)
        if self.at("{"):
            return self.block()
        if self.at("if"):
            return self.if_stmt()
        if self.at("while"):
            self.advance()
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            return A.While(cond, self.block(), span=sp)
        if self.at("return"):
            self.advance()
            value = None if self.at(";") else self.expr()
            self.expect(";")
            return A.Return(value, span=sp)
        if self.at("assert"):
            self.advance()
            cond = self.expr()
            self.expect(";")
            return A.Assert(cond, span=sp)
        # local declaration: primitive type, or ``Ident Ident``
        if (t.kind == "kw" and t.text in (A.INT, A.BOOLEAN)) or (
                t.kind == "ident" and self.peek().kind == "ident"):
            type_ = self.type_name()
            name = self.ident().text
            init = None
            if self.at("="):
                self.advance()
                init = self.expr()
            self.expect(";")
            return A.VarDecl(type_, name, init, span=sp)
        e = self.expr()
        if self.at("="):
            eq = self.advance()
            if not isinstance(e, (A.Name, A.FieldAccess)):
                raise self.error("invalid assignment target", eq)
            value = self.expr()
            self.expect(";")
            return A.Assign(e, value, span=sp)
        self.expect(";")
        return A.ExprStmt(e, span=sp)

    def if_stmt(self) -> A.If:
        sp = self.span()
        self.expect("if")
        self.expect("(")
        cond = self.expr()
        self.expect(")")
        then = self.block()
        orelse = None
        if self.at("else"):
            self.advance()
            if self.at("if"):
                nested = self.if_stmt()
                orelse = A.Block([nested], span=nested.span)
            else:
                orelse = self.block()
        return A.If(cond, then, orelse, span=sp)

    # -- expressions (precedence climbing, all binary ops left-assoc) --

    _LEVELS = (("||",), ("&&",), A.EQ_OPS, A.REL_OPS, ("+", "-"), ("*", "/"))

    def expr(self, level: int = 0) -> A.Expr:
        if level == len(self._LEVELS):
            return self.unary()
        left = self.expr(level + 1)
        ops = self._LEVELS[level]
        while self.tok.kind == "op" and self.tok.text in ops:
            op_tok = self.advance()
            right = self.expr(level + 1)
            left = A.Binary(op_tok.text, left, right, span=self.span(op_tok))
        return left

    def unary(self) -> A.Expr:
        if self.at("-") or self.at("!"):
            op_tok = self.advance()
            return A.Unary(op_tok.text, self.unary(), span=self.span(op_tok))
        return self.postfix()

    def postfix(self) -> A.Expr:
        e = self.primary()
        while self.at("."):
            self.advance()
            name_tok = self.ident()
            if self.at("("):
                args = self.args()
                e = A.Call(e, name_tok.text, args, span=self.span(name_tok))
            elif isinstance(e, A.This):
                e = A.FieldAccess(name_tok.text, span=self.span(name_tok))
            else:
                raise self.error("field access is only allowed on 'this'", name_tok)
        return e

    def args(self) -> list[A.Expr]:
        self.expect("(")
        out: list[A.Expr] = []
        if not self.at(")"):
            out.append(self.expr())
            while self.at(","):
                self.advance()
                out.append(self.expr())
        self.expect(")")
        return out

    def primary(self) -> A.Expr:
        t = self.tok
        sp = self.span(t)
        if t.kind == "int":
            self.advance()
            return A.IntLit(int(t.text), span=sp)
        if t.kind == "kw":
            if t.text in ("true", "false"):
                self.advance()
                return A.BoolLit(t.text == "true", span=sp)
            if t.text == "null":
                self.advance()
                return A.NullLit(span=sp)
            if t.text == "this":
                self.advance()
                return A.This(span=sp)
            if t.text == "new":
                self.advance()
                cls = self.ident().text
                return A.New(cls, self.args(), span=sp)
            if t.text == "super":
                self.advance()
                self.expect(".")
                name_tok = self.ident()
                return A.Call(None, name_tok.text, self.args(), is_super=True, span=self.span(name_tok))
        if t.kind == "ident":
            self.advance()
            if self.at("("):
                return A.Call(None, t.text, self.args(), span=sp)
            return A.Name(t.text, span=sp)
        if self.at("("):
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        raise self.error(f"expected expression, found {t.text or 'end of file'!r}")


def parse_file(text: str, file: str = "<input>") -> list[A.ClassDecl]:
    """Parse one source file into class declarations (unresolved)."""
    p = Parser(text, file)
    classes = p.parse_classes()
    if p.errors:
        raise ParseError(p.errors)
    return classes


def parse_snapshot(files: Mapping[str, str] | Iterable[tuple[str, str]]) -> A.Program:
    """Parse and resolve a set of named source texts into a Program.

    Files are processed in name order, so the result does not depend on
    the iteration order of ``files``. Syntax errors from every file are
    collected before raising; semantic errors likewise.
    """
    from .resolver import resolve

    items = sorted(dict(files).items())
    diagnostics: list[Diagnostic] = []
    classes: list[A.ClassDecl] = []
    for name, text in items:
        try:
            classes.extend(parse_file(text, name))
        except ParseError as exc:
            diagnostics.extend(exc.diagnostics)
    if diagnostics:
        raise ParseError(diagnostics)
    return resolve(classes)


def parse_program(text: str, file: str = "<input>") -> A.Program:
    return parse_snapshot({file: text})
