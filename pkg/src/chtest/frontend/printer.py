"""Canonical pretty-printer for MiniOO.

``parse(print(p)) == p`` for every valid program; the distiller also uses
the printed form of a method body as its change fingerprint.
"""
from __future__ import annotations

from . import ast as A

_PREC = {"||": 1, "&&": 2, "==": 3, "!=": 3, "<": 4, "<=": 4, ">": 4, ">=": 4,
         "+": 5, "-": 5, "*": 6, "/": 6}
_UNARY_PREC = 7
_POSTFIX_PREC = 8
_INDENT = "    "


def expr_to_str(e) -> str:
    return _expr(e)[0]


def _expr(e) -> tuple[str, int]:
    if isinstance(e, A.IntLit):
        return str(e.value), _POSTFIX_PREC
    if isinstance(e, A.BoolLit):
        return ("true" if e.value else "false"), _POSTFIX_PREC
    if isinstance(e, A.NullLit):
        return "null", _POSTFIX_PREC
    if isinstance(e, A.This):
        return "this", _POSTFIX_PREC
    if isinstance(e, A.Name):
        return e.ident, _POSTFIX_PREC
    if isinstance(e, A.FieldAccess):
        return f"this.{e.name}", _POSTFIX_PREC
    if isinstance(e, A.Unary):
        s, p = _expr(e.operand)
        if p < _UNARY_PREC or (e.op == "-" and s.startswith("-")):
            s = f"({s})"
        return f"{e.op}{s}", _UNARY_PREC
    if isinstance(e, A.Binary):
        prec = _PREC[e.op]
        ls, lp = _expr(e.left)
        rs, rp = _expr(e.right)
        if lp < prec:
            ls = f"({ls})"
        if rp <= prec:
            rs = f"({rs})"
        return f"{ls} {e.op} {rs}", prec
    if isinstance(e, A.New):
        return f"new {e.class_name}({_args(e.args)})", _POSTFIX_PREC
    if isinstance(e, A.Call):
        call = f"{e.name}({_args(e.args)})"
        if e.is_super:
            return f"super.{call}", _POSTFIX_PREC
        if e.receiver is None:
            return call, _POSTFIX_PREC
        rs, rp = _expr(e.receiver)
        if rp < _POSTFIX_PREC:
            rs = f"({rs})"
        return f"{rs}.{call}", _POSTFIX_PREC
    raise TypeError(f"unexpected node {e!r}")


def _args(args) -> str:
    return ", ".join(expr_to_str(a) for a in args)


def _block(b: A.Block, depth: int, out: list[str]) -> None:
    for s in b.stmts:
        _stmt(s, depth, out)


def _stmt(s, depth: int, out: list[str]) -> None:
    pad = _INDENT * depth
    if isinstance(s, A.Block):
        out.append(pad + "{")
        _block(s, depth + 1, out)
        out.append(pad + "}")
    elif isinstance(s, A.VarDecl):
        init = "" if s.init is None else f" = {expr_to_str(s.init)}"
        out.append(f"{pad}{s.type} {s.name}{init};")
    elif isinstance(s, A.Assign):
        out.append(f"{pad}{expr_to_str(s.target)} = {expr_to_str(s.value)};")
    elif isinstance(s, A.If):
        _if(s, depth, out, pad)
        out.append(pad + "}")
    elif isinstance(s, A.While):
        out.append(f"{pad}while ({expr_to_str(s.cond)}) {{")
        _block(s.body, depth + 1, out)
        out.append(pad + "}")
    elif isinstance(s, A.Return):
        out.append(pad + ("return;" if s.value is None else f"return {expr_to_str(s.value)};"))
    elif isinstance(s, A.Assert):
        out.append(f"{pad}assert {expr_to_str(s.cond)};")
    elif isinstance(s, A.ExprStmt):
        out.append(f"{pad}{expr_to_str(s.expr)};")
    else:
        raise TypeError(f"unexpected node {s!r}")


def _if(s: A.If, depth: int, out: list[str], head: str) -> None:
    pad = _INDENT * depth
    out.append(f"{head}if ({expr_to_str(s.cond)}) {{")
    _block(s.then, depth + 1, out)
    if s.orelse is None:
        return
    if len(s.orelse.stmts) == 1 and isinstance(s.orelse.stmts[0], A.If):
        _if(s.orelse.stmts[0], depth, out, pad + "} else ")
        return
    out.append(pad + "} else {")
    _block(s.orelse, depth + 1, out)


def body_to_str(body: A.Block | None) -> str:
    if body is None:
        return ";"
    out: list[str] = []
    _block(body, 0, out)
    return "\n".join(out)


def method_to_str(m: A.MethodDecl, depth: int = 1) -> str:
    pad = _INDENT * depth
    params = ", ".join(f"{p.type} {p.name}" for p in m.params)
    head = f"{pad}{m.name}({params})" if m.is_constructor else f"{pad}{m.return_type} {m.name}({params})"
    if m.body is None:
        return head + ";"
    out = [head + " {"]
    _block(m.body, depth + 1, out)
    out.append(pad + "}")
    return "\n".join(out)


def class_to_str(c: A.ClassDecl) -> str:
    head = "abstract class " if c.is_abstract else "class "
    head += c.name
    if c.superclass:
        head += f" extends {c.superclass}"
    lines = [head + " {"]
    for f in c.fields:
        lines.append(f"{_INDENT}{f.type} {f.name};")
    for m in c.methods:
        lines.append(method_to_str(m))
    lines.append("}")
    return "\n".join(lines)


def program_to_str(p: A.Program) -> str:
    return "\n\n".join(class_to_str(c) for c in p.classes.values()) + "\n"
