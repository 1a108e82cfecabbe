"""Resolved type references: the currency of the generics solver.

All TypeRefs are frozen and compare structurally, so they can live in sets
and substitution maps. Rendering uses simple names so solved types read the
way they are written in source ("Set<? extends Enum<?>>").
"""
from __future__ import annotations

from dataclasses import dataclass


class TypeRef:
    pass


@dataclass(frozen=True)
class Primitive(TypeRef):
    kind: str  # int | boolean | char | double | void | null (internal)

    def __str__(self) -> str:
        return self.kind


INT = Primitive("int")
BOOLEAN = Primitive("boolean")
CHAR = Primitive("char")
DOUBLE = Primitive("double")
VOID = Primitive("void")
NULL = Primitive("null")  # type of the null literal; assignable to references

NUMERIC = (INT, DOUBLE)


@dataclass(frozen=True)
class ClassType(TypeRef):
    decl_id: str
    args: tuple[TypeRef, ...] = ()

    @property
    def simple(self) -> str:
        return self.decl_id.rsplit(".", 1)[-1]

    def __str__(self) -> str:
        if not self.args:
            return self.simple
        return f"{self.simple}<{', '.join(str(a) for a in self.args)}>"


@dataclass(frozen=True)
class TypeVar(TypeRef):
    owner: str  # declaring class or method id
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Wildcard(TypeRef):
    bound_kind: str | None = None  # "extends" | "super" | None
    bound: TypeRef | None = None

    def __str__(self) -> str:
        if self.bound_kind is None:
            return "?"
        return f"? {self.bound_kind} {self.bound}"


UNBOUNDED = Wildcard()


@dataclass(frozen=True)
class ArrayType(TypeRef):
    element: TypeRef

    def __str__(self) -> str:
        return f"{self.element}[]"


Substitution = dict  # TypeVar -> TypeRef


def substitute(ty: TypeRef, subst: Substitution) -> TypeRef:
    """Replace every TypeVar in subst's domain; structure is preserved.

    Idempotent once the result contains no domain variables.
    """
    if not subst:
        return ty
    if isinstance(ty, TypeVar):
        return subst.get(ty, ty)
    if isinstance(ty, ClassType) and ty.args:
        return ClassType(ty.decl_id, tuple(substitute(a, subst) for a in ty.args))
    if isinstance(ty, Wildcard) and ty.bound is not None:
        return Wildcard(ty.bound_kind, substitute(ty.bound, subst))
    if isinstance(ty, ArrayType):
        return ArrayType(substitute(ty.element, subst))
    return ty


def free_type_vars(ty: TypeRef) -> set[TypeVar]:
    if isinstance(ty, TypeVar):
        return {ty}
    if isinstance(ty, ClassType):
        out: set[TypeVar] = set()
        for a in ty.args:
            out |= free_type_vars(a)
        return out
    if isinstance(ty, Wildcard) and ty.bound is not None:
        return free_type_vars(ty.bound)
    if isinstance(ty, ArrayType):
        return free_type_vars(ty.element)
    return set()


def is_reference(ty: TypeRef) -> bool:
    return isinstance(ty, (ClassType, TypeVar, ArrayType)) or ty == NULL
