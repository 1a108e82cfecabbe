"""AST node definitions for MiniJ.

Nodes compare by identity (resolution tables key on node objects); use
structural_equal() for span-insensitive structural comparison.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

from .tokens import SourceSpan


@dataclass(eq=False)
class Node:
    span: SourceSpan


# --- type syntax (unresolved, as written) ---

@dataclass(eq=False)
class TypeSyntax(Node):
    pass


@dataclass(eq=False)
class NamedType(TypeSyntax):
    name_parts: tuple[str, ...]
    args: tuple[TypeSyntax, ...] | None = None  # None: no <...> written

    @property
    def head(self) -> str:
        return self.name_parts[-1]

    def written_name(self) -> str:
        return ".".join(self.name_parts)


@dataclass(eq=False)
class WildcardType(TypeSyntax):
    bound_kind: str | None = None  # "extends" | "super" | None
    bound: TypeSyntax | None = None


@dataclass(eq=False)
class ArrayTypeSyntax(TypeSyntax):
    element: TypeSyntax = None


@dataclass(eq=False)
class PrimitiveType(TypeSyntax):
    kind: str = "int"  # int | boolean | char | double | void


# --- declarations ---

@dataclass(eq=False)
class TypeParam(Node):
    name: str
    bound: TypeSyntax | None = None


@dataclass(eq=False)
class Param(Node):
    name: str
    declared: TypeSyntax = None


@dataclass(eq=False)
class FieldDecl(Node):
    name: str
    declared: TypeSyntax = None
    init: "Expr | None" = None
    modifiers: frozenset[str] = frozenset()
    is_enum_constant: bool = False

    @property
    def is_static(self) -> bool:
        return "static" in self.modifiers or self.is_enum_constant


@dataclass(eq=False)
class MethodDecl(Node):
    name: str
    type_params: tuple[TypeParam, ...] = ()
    params: tuple[Param, ...] = ()
    returns: TypeSyntax = None
    body: "Block | None" = None
    modifiers: frozenset[str] = frozenset()
    is_test: bool = False

    @property
    def is_static(self) -> bool:
        return "static" in self.modifiers

    @property
    def is_abstract(self) -> bool:
        return "abstract" in self.modifiers


@dataclass(eq=False)
class CtorDecl(Node):
    name: str
    params: tuple[Param, ...] = ()
    body: "Block | None" = None
    modifiers: frozenset[str] = frozenset()
    is_implicit: bool = False

    @property
    def delegation(self) -> str | None:
        """"this", "super", or None, from the first body statement."""
        if self.body is not None and self.body.stmts:
            first = self.body.stmts[0]
            if isinstance(first, ExplicitCtorCall):
                return first.target
        return None


@dataclass(eq=False)
class TypeDecl(Node):
    kind: str  # class | interface | enum
    name: str
    type_params: tuple[TypeParam, ...] = ()
    extends: NamedType | None = None
    implements: tuple[NamedType, ...] = ()
    fields: tuple[FieldDecl, ...] = ()
    methods: tuple[MethodDecl, ...] = ()
    ctors: tuple[CtorDecl, ...] = ()
    nested: tuple["TypeDecl", ...] = ()
    modifiers: frozenset[str] = frozenset()
    is_stub: bool = False

    @property
    def is_interface(self) -> bool:
        return self.kind == "interface"

    @property
    def is_enum(self) -> bool:
        return self.kind == "enum"

    @property
    def is_abstract(self) -> bool:
        return "abstract" in self.modifiers or self.is_interface

    def members(self):
        yield from self.fields
        yield from self.methods
        yield from self.ctors
        yield from self.nested


@dataclass(eq=False)
class CompilationUnit(Node):
    package: tuple[str, ...] = ()
    imports: tuple[tuple[str, ...], ...] = ()
    types: tuple[TypeDecl, ...] = ()
    path: str = "<source>"
    is_stub: bool = False


# --- statements ---

@dataclass(eq=False)
class Stmt(Node):
    pass


@dataclass(eq=False)
class Block(Stmt):
    stmts: tuple[Stmt, ...] = ()


@dataclass(eq=False)
class LocalVarDecl(Stmt):
    declared: TypeSyntax = None
    name: str = ""
    init: "Expr | None" = None


@dataclass(eq=False)
class ExprStmt(Stmt):
    expr: "Expr" = None


@dataclass(eq=False)
class If(Stmt):
    cond: "Expr" = None
    then: Stmt = None
    orelse: Stmt | None = None


@dataclass(eq=False)
class While(Stmt):
    cond: "Expr" = None
    body: Stmt = None


@dataclass(eq=False)
class For(Stmt):
    init: Stmt | None = None  # LocalVarDecl or ExprStmt
    cond: "Expr | None" = None
    update: "Expr | None" = None
    body: Stmt = None


@dataclass(eq=False)
class Return(Stmt):
    value: "Expr | None" = None


@dataclass(eq=False)
class Throw(Stmt):
    value: "Expr" = None


@dataclass(eq=False)
class ExplicitCtorCall(Stmt):
    target: str = "super"  # "this" | "super"
    args: tuple["Expr", ...] = ()


# --- expressions ---

@dataclass(eq=False)
class Expr(Node):
    pass


@dataclass(eq=False)
class IntLit(Expr):
    value: int = 0


@dataclass(eq=False)
class DoubleLit(Expr):
    value: float = 0.0


@dataclass(eq=False)
class BoolLit(Expr):
    value: bool = False


@dataclass(eq=False)
class CharLit(Expr):
    value: str = "\0"


@dataclass(eq=False)
class StringLit(Expr):
    value: str = ""


@dataclass(eq=False)
class NullLit(Expr):
    pass


@dataclass(eq=False)
class Name(Expr):
    ident: str = ""


@dataclass(eq=False)
class This(Expr):
    pass


@dataclass(eq=False)
class FieldAccess(Expr):
    scope: Expr = None
    name: str = ""


@dataclass(eq=False)
class MethodCall(Expr):
    scope: Expr | None = None  # None: unqualified call
    type_args: tuple[TypeSyntax, ...] | None = None
    name: str = ""
    args: tuple[Expr, ...] = ()


@dataclass(eq=False)
class New(Expr):
    type: NamedType = None
    args: tuple[Expr, ...] = ()


@dataclass(eq=False)
class Cast(Expr):
    target: TypeSyntax = None
    expr: Expr = None


@dataclass(eq=False)
class Binary(Expr):
    op: str = "+"
    left: Expr = None
    right: Expr = None


@dataclass(eq=False)
class Unary(Expr):
    op: str = "!"
    operand: Expr = None


@dataclass(eq=False)
class Assign(Expr):
    target: Expr = None  # Name or FieldAccess
    value: Expr = None


# --- generic traversal helpers ---

def child_nodes(node: Node):
    """Yield direct child Nodes of a node, in field order."""
    for f in dataclasses.fields(node):
        value = getattr(node, f.name)
        if isinstance(value, Node):
            yield value
        elif isinstance(value, tuple):
            for item in value:
                if isinstance(item, Node):
                    yield item


def walk(node: Node):
    """Yield node and all descendants, depth first."""
    yield node
    for child in child_nodes(node):
        yield from walk(child)


def structural_equal(a, b) -> bool:
    """Compare two AST fragments ignoring spans and implicit-ctor flags."""
    if type(a) is not type(b):
        return False
    if not isinstance(a, Node):
        return a == b
    for f in dataclasses.fields(a):
        if f.name == "span" or f.name == "path":
            continue
        va, vb = getattr(a, f.name), getattr(b, f.name)
        if isinstance(va, tuple) and isinstance(vb, tuple):
            if len(va) != len(vb):
                return False
            if not all(structural_equal(x, y) for x, y in zip(va, vb)):
                return False
        elif isinstance(va, Node) or isinstance(vb, Node):
            if not (isinstance(va, Node) and isinstance(vb, Node)):
                return False
            if not structural_equal(va, vb):
                return False
        elif va != vb:
            return False
    return True
