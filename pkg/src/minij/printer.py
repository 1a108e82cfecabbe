"""Deterministic source printer for MiniJ ASTs.

Whitespace is regenerated; print(parse(print(x))) is byte-stable.
"""
from __future__ import annotations

from .syntax import (
    ArrayTypeSyntax, Assign, Binary, Block, BoolLit, Cast, CharLit,
    CompilationUnit, CtorDecl, DoubleLit, ExplicitCtorCall, Expr, ExprStmt,
    FieldAccess, FieldDecl, For, If, IntLit, LocalVarDecl, MethodCall,
    MethodDecl, Name, NamedType, New, NullLit, PrimitiveType, Return, Stmt,
    StringLit, This, Throw, TypeDecl, TypeParam, TypeSyntax, Unary, While,
    WildcardType,
)

INDENT = "    "

_MODIFIER_ORDER = ("public", "protected", "private", "abstract", "static", "final")

_ESCAPES = {"\n": "\\n", "\t": "\\t", "\r": "\\r", "\0": "\\0",
            "\\": "\\\\", '"': '\\"'}


def _escape_string(value: str) -> str:
    return "".join(_ESCAPES.get(ch, ch) for ch in value)


def _escape_char(value: str) -> str:
    table = dict(_ESCAPES)
    table['"'] = '"'
    table["'"] = "\\'"
    return table.get(value, value)


def print_modifiers(modifiers: frozenset[str]) -> str:
    parts = [m for m in _MODIFIER_ORDER if m in modifiers]
    return " ".join(parts) + (" " if parts else "")


def print_type(ty: TypeSyntax) -> str:
    if isinstance(ty, PrimitiveType):
        return ty.kind
    if isinstance(ty, NamedType):
        text = ".".join(ty.name_parts)
        if ty.args is not None:
            text += "<" + ", ".join(print_type(a) for a in ty.args) + ">"
        return text
    if isinstance(ty, WildcardType):
        if ty.bound_kind is None:
            return "?"
        return f"? {ty.bound_kind} {print_type(ty.bound)}"
    if isinstance(ty, ArrayTypeSyntax):
        return print_type(ty.element) + "[]"
    raise TypeError(f"unknown type syntax {ty!r}")


def _print_type_params(params: tuple[TypeParam, ...]) -> str:
    if not params:
        return ""
    rendered = []
    for p in params:
        rendered.append(p.name if p.bound is None else f"{p.name} extends {print_type(p.bound)}")
    return "<" + ", ".join(rendered) + "> "


# Binary operator binding strength, loosest first.
_PRECEDENCE = {"||": 1, "&&": 2, "==": 3, "!=": 3,
               "<": 4, ">": 4, "<=": 4, ">=": 4,
               "+": 5, "-": 5, "*": 6, "/": 6, "%": 6}
_UNARY_LEVEL = 7


def print_expr(expr: Expr) -> str:
    return _expr(expr, 0)


def _expr(expr: Expr, parent_level: int) -> str:
    if isinstance(expr, IntLit):
        return str(expr.value)
    if isinstance(expr, DoubleLit):
        text = repr(expr.value)
        return text if "." in text or "e" in text else text + ".0"
    if isinstance(expr, BoolLit):
        return "true" if expr.value else "false"
    if isinstance(expr, CharLit):
        return f"'{_escape_char(expr.value)}'"
    if isinstance(expr, StringLit):
        return f'"{_escape_string(expr.value)}"'
    if isinstance(expr, NullLit):
        return "null"
    if isinstance(expr, This):
        return "this"
    if isinstance(expr, Name):
        return expr.ident
    if isinstance(expr, FieldAccess):
        return f"{_expr(expr.scope, _UNARY_LEVEL)}.{expr.name}"
    if isinstance(expr, MethodCall):
        args = ", ".join(_expr(a, 0) for a in expr.args)
        targs = ""
        if expr.type_args is not None:
            targs = "<" + ", ".join(print_type(t) for t in expr.type_args) + ">"
        if expr.scope is None:
            return f"{expr.name}({args})"
        return f"{_expr(expr.scope, _UNARY_LEVEL)}.{targs}{expr.name}({args})"
    if isinstance(expr, New):
        args = ", ".join(_expr(a, 0) for a in expr.args)
        return f"new {print_type(expr.type)}({args})"
    if isinstance(expr, Cast):
        text = f"({print_type(expr.target)}) {_expr(expr.expr, _UNARY_LEVEL)}"
        return f"({text})" if parent_level >= _UNARY_LEVEL else text
    if isinstance(expr, Unary):
        text = f"{expr.op}{_expr(expr.operand, _UNARY_LEVEL)}"
        return text
    if isinstance(expr, Binary):
        level = _PRECEDENCE[expr.op]
        left = _expr(expr.left, level - 1)
        # left-associative: right child needs parens at the same level
        right = _expr(expr.right, level)
        text = f"{left} {expr.op} {right}"
        return f"({text})" if level <= parent_level else text
    if isinstance(expr, Assign):
        text = f"{_expr(expr.target, _UNARY_LEVEL)} = {_expr(expr.value, 0)}"
        return f"({text})" if parent_level > 0 else text
    raise TypeError(f"unknown expression {expr!r}")


def _stmt_lines(stmt: Stmt, depth: int) -> list[str]:
    pad = INDENT * depth
    if isinstance(stmt, Block):
        lines = [pad + "{"]
        for inner in stmt.stmts:
            lines.extend(_stmt_lines(inner, depth + 1))
        lines.append(pad + "}")
        return lines
    if isinstance(stmt, LocalVarDecl):
        text = f"{print_type(stmt.declared)} {stmt.name}"
        if stmt.init is not None:
            text += f" = {print_expr(stmt.init)}"
        return [pad + text + ";"]
    if isinstance(stmt, ExprStmt):
        return [pad + print_expr(stmt.expr) + ";"]
    if isinstance(stmt, If):
        lines = [pad + f"if ({print_expr(stmt.cond)})"]
        lines.extend(_nested(stmt.then, depth))
        if stmt.orelse is not None:
            lines.append(pad + "else")
            lines.extend(_nested(stmt.orelse, depth))
        return lines
    if isinstance(stmt, While):
        lines = [pad + f"while ({print_expr(stmt.cond)})"]
        lines.extend(_nested(stmt.body, depth))
        return lines
    if isinstance(stmt, For):
        init = ""
        if stmt.init is not None:
            init = _stmt_lines(stmt.init, 0)[0].rstrip(";")
        cond = print_expr(stmt.cond) if stmt.cond is not None else ""
        update = print_expr(stmt.update) if stmt.update is not None else ""
        lines = [pad + f"for ({init}; {cond}; {update})"]
        lines.extend(_nested(stmt.body, depth))
        return lines
    if isinstance(stmt, Return):
        if stmt.value is None:
            return [pad + "return;"]
        return [pad + f"return {print_expr(stmt.value)};"]
    if isinstance(stmt, Throw):
        return [pad + f"throw {print_expr(stmt.value)};"]
    if isinstance(stmt, ExplicitCtorCall):
        args = ", ".join(print_expr(a) for a in stmt.args)
        return [pad + f"{stmt.target}({args});"]
    raise TypeError(f"unknown statement {stmt!r}")


def _nested(stmt: Stmt, depth: int) -> list[str]:
    if isinstance(stmt, Block):
        return _stmt_lines(stmt, depth)
    return _stmt_lines(stmt, depth + 1)


def _member_lines(decl, depth: int) -> list[str]:
    pad = INDENT * depth
    if isinstance(decl, FieldDecl):
        text = f"{print_modifiers(decl.modifiers)}{print_type(decl.declared)} {decl.name}"
        if decl.init is not None:
            text += f" = {print_expr(decl.init)}"
        return [pad + text + ";"]
    if isinstance(decl, MethodDecl):
        marker = [pad + "@Test"] if decl.is_test else []
        head = (pad + print_modifiers(decl.modifiers)
                + _print_type_params(decl.type_params)
                + f"{print_type(decl.returns)} {decl.name}("
                + ", ".join(f"{print_type(p.declared)} {p.name}" for p in decl.params)
                + ")")
        if decl.body is None:
            return marker + [head + ";"]
        body = _stmt_lines(decl.body, depth)
        return marker + [head + " " + body[0].strip()] + body[1:]
    if isinstance(decl, CtorDecl):
        head = (pad + print_modifiers(decl.modifiers)
                + f"{decl.name}("
                + ", ".join(f"{print_type(p.declared)} {p.name}" for p in decl.params)
                + ")")
        if decl.body is None:
            return [head + ";"]
        body = _stmt_lines(decl.body, depth)
        return [head + " " + body[0].strip()] + body[1:]
    if isinstance(decl, TypeDecl):
        return _type_lines(decl, depth)
    raise TypeError(f"unknown member {decl!r}")


def _type_lines(decl: TypeDecl, depth: int) -> list[str]:
    pad = INDENT * depth
    mods = print_modifiers(decl.modifiers - {"abstract"} if decl.is_interface
                           else decl.modifiers)
    head = pad + mods + decl.kind + " " + decl.name
    if decl.type_params:
        head += _print_type_params(decl.type_params).rstrip()
    if decl.extends is not None:
        head += f" extends {print_type(decl.extends)}"
    if decl.implements:
        head += " implements " + ", ".join(print_type(t) for t in decl.implements)
    if decl.is_enum:
        constants = ", ".join(f.name for f in decl.fields)
        return [head + " {", INDENT * (depth + 1) + constants + ";", pad + "}"]
    lines = [head + " {"]
    members = []
    members.extend(decl.fields)
    members.extend(decl.ctors)
    members.extend(decl.methods)
    members.extend(decl.nested)
    for i, member in enumerate(members):
        if i > 0:
            lines.append("")
        lines.extend(_member_lines(member, depth + 1))
    lines.append(pad + "}")
    return lines


def print_unit(unit: CompilationUnit) -> str:
    lines: list[str] = []
    if unit.package:
        lines.append("package " + ".".join(unit.package) + ";")
        lines.append("")
    for imp in unit.imports:
        lines.append("import " + ".".join(imp) + ";")
    if unit.imports:
        lines.append("")
    for i, decl in enumerate(unit.types):
        if i > 0:
            lines.append("")
        lines.extend(_type_lines(decl, 0))
    return "\n".join(lines) + "\n"
