"""Project loading: source discovery, stub loading, and the declaration index.

Every class, interface, enum, method, constructor, and field gets a stable
string id derived from its qualified signature; ids survive emit/reload
round trips, which is what lets multi-pass verdicts be merged.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .errors import DuplicateTypeError, IoError, ProjectError
from .parser import parse_source
from .syntax import (
    ArrayTypeSyntax, Block, CompilationUnit, CtorDecl, FieldDecl, MethodDecl,
    NamedType, PrimitiveType, TypeDecl, TypeSyntax, WildcardType,
)
from .tokens import SourceSpan

SOURCE_EXT = ".mj"
STUB_EXT = ".mjstub"


class DeclKind(Enum):
    CLASS = "class"
    INTERFACE = "interface"
    ENUM = "enum"
    METHOD = "method"
    CTOR = "ctor"
    FIELD = "field"

    @property
    def is_type(self) -> bool:
        return self in (DeclKind.CLASS, DeclKind.INTERFACE, DeclKind.ENUM)


def type_sig_text(ty: TypeSyntax) -> str:
    """Canonical erased rendering of a type annotation, for declaration ids."""
    if isinstance(ty, PrimitiveType):
        return ty.kind
    if isinstance(ty, NamedType):
        return ".".join(ty.name_parts)
    if isinstance(ty, ArrayTypeSyntax):
        return type_sig_text(ty.element) + "[]"
    if isinstance(ty, WildcardType):
        return "?"
    raise TypeError(f"unexpected type syntax {ty!r}")


@dataclass(frozen=True)
class Declaration:
    decl_id: str
    kind: DeclKind
    name: str
    container: str | None
    node: object = field(compare=False, repr=False)
    unit: CompilationUnit = field(compare=False, repr=False)
    is_stub: bool = False
    is_implicit: bool = False

    def __hash__(self):
        return hash(self.decl_id)

    @property
    def is_type(self) -> bool:
        return self.kind.is_type

    @property
    def qualified_signature(self) -> str:
        """Human-facing signature, e.g. ``I.getInt()`` — used in assertions."""
        if self.is_type:
            return self.decl_id
        return self.decl_id.replace("#", ".")


class Project:
    """Immutable view over parsed source units, stub units, and declarations."""

    def __init__(self, units, stub_units):
        self.units: tuple[CompilationUnit, ...] = tuple(units)
        self.stub_units: tuple[CompilationUnit, ...] = tuple(stub_units)
        self.declarations: dict[str, Declaration] = {}
        self.types_by_name: dict[str, Declaration] = {}
        self._decl_of_node: dict[int, Declaration] = {}
        for unit in self.units + self.stub_units:
            prefix = ".".join(unit.package)
            for decl in unit.types:
                self._index_type(decl, prefix, unit)

    def _index_type(self, node: TypeDecl, prefix: str, unit: CompilationUnit):
        qualified = f"{prefix}.{node.name}" if prefix else node.name
        if qualified in self.types_by_name:
            raise DuplicateTypeError(f"duplicate type {qualified}")
        kind = {"class": DeclKind.CLASS, "interface": DeclKind.INTERFACE,
                "enum": DeclKind.ENUM}[node.kind]
        decl = Declaration(qualified, kind, node.name, None, node, unit,
                           is_stub=node.is_stub)
        self._register(decl)
        self.types_by_name[qualified] = decl

        for f in node.fields:
            self._register(Declaration(
                f"{qualified}#{f.name}", DeclKind.FIELD, f.name, qualified,
                f, unit, is_stub=node.is_stub))
        for m in node.methods:
            sig = ",".join(type_sig_text(p.declared) for p in m.params)
            self._register(Declaration(
                f"{qualified}#{m.name}({sig})", DeclKind.METHOD, m.name,
                qualified, m, unit, is_stub=node.is_stub))
        ctors = list(node.ctors)
        if not ctors and not node.is_interface and not node.is_enum:
            implicit = CtorDecl(span=node.span, name=node.name, params=(),
                                body=None if node.is_stub else Block(span=node.span),
                                is_implicit=True)
            ctors.append(implicit)
        for c in ctors:
            sig = ",".join(type_sig_text(p.declared) for p in c.params)
            self._register(Declaration(
                f"{qualified}#<init>({sig})", DeclKind.CTOR, "<init>",
                qualified, c, unit, is_stub=node.is_stub,
                is_implicit=getattr(c, "is_implicit", False)))
        for nested in node.nested:
            nested_decl_prefix = qualified
            self._index_type(nested, nested_decl_prefix, unit)

    def _register(self, decl: Declaration):
        if decl.decl_id in self.declarations:
            raise DuplicateTypeError(f"duplicate declaration {decl.decl_id}")
        self.declarations[decl.decl_id] = decl
        self._decl_of_node[id(decl.node)] = decl

    # --- lookups ---

    def decl_of(self, node) -> Declaration:
        return self._decl_of_node[id(node)]

    def maybe_decl_of(self, node) -> Declaration | None:
        return self._decl_of_node.get(id(node))

    def type_decl(self, qualified: str) -> Declaration | None:
        return self.types_by_name.get(qualified)

    def members_of(self, type_id: str):
        for decl in self.declarations.values():
            if decl.container == type_id:
                yield decl

    def ctors_of(self, type_id: str) -> list[Declaration]:
        return [d for d in self.declarations.values()
                if d.container == type_id and d.kind is DeclKind.CTOR]

    def source_declarations(self) -> list[Declaration]:
        """Project declarations that exist in the source text (no stubs,
        no synthesized constructors); the domain of sweep verdicts."""
        return [d for d in self.declarations.values()
                if not d.is_stub and not d.is_implicit]


def _parse_stub_unit(text: str, path: str) -> CompilationUnit:
    return parse_source(text, path=path, is_stub=True)


def _collect_stub_paths(stub_files) -> list[Path]:
    paths: list[Path] = []
    for entry in stub_files:
        p = Path(entry)
        if p.is_dir():
            paths.extend(sorted(p.glob(f"*{STUB_EXT}")))
        elif p.exists():
            paths.append(p)
        else:
            raise IoError(f"stub path does not exist: {p}")
    return paths


def _validate_unit(unit: CompilationUnit, rel: str):
    publics = [t for t in unit.types if "public" in t.modifiers]
    if len(publics) > 1:
        raise ProjectError(f"{rel}: more than one public top-level type")
    if publics:
        stem = Path(rel).stem
        if publics[0].name != stem:
            raise ProjectError(
                f"{rel}: file name must match public type {publics[0].name!r}")


def load_project(source_root, stub_files=()) -> Project:
    """Load all ``.mj`` units under source_root plus the given stub files.

    Stub files may be individual ``.mjstub`` paths or directories of them.
    """
    root = Path(source_root)
    if not root.is_dir():
        raise IoError(f"source root is not a directory: {root}")
    units = []
    for path in sorted(root.rglob(f"*{SOURCE_EXT}")):
        rel = path.relative_to(root).as_posix()
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise IoError(f"cannot read {path}: {exc}") from exc
        unit = parse_source(text, path=rel)
        _validate_unit(unit, rel)
        units.append(unit)
    stub_units = []
    for path in _collect_stub_paths(stub_files):
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise IoError(f"cannot read {path}: {exc}") from exc
        stub_units.append(_parse_stub_unit(text, path=str(path)))
    return Project(units, stub_units)


def load_project_from_texts(files: dict[str, str], stub_files=()) -> Project:
    """Build a project from in-memory unit texts (used between passes)."""
    units = []
    for rel in sorted(files):
        unit = parse_source(files[rel], path=rel)
        _validate_unit(unit, rel)
        units.append(unit)
    stub_units = []
    for path in _collect_stub_paths(stub_files):
        stub_units.append(_parse_stub_unit(path.read_text(encoding="utf-8"), str(path)))
    return Project(units, stub_units)
