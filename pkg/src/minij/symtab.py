"""Symbol table: name scopes, class hierarchy, and override links.

The table is built in two stages. Stage one (this module) indexes type
names, resolves the hierarchy, and computes override links; it must succeed
for analysis to proceed. Stage two (solver.py) resolves member bodies on
demand and may tolerate broken references in declarations that minimization
will remove anyway.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import AmbiguousNameError, TypeSolveError, UnresolvedSymbolError
from .project import Declaration, DeclKind, Project
from .syntax import (
    ArrayTypeSyntax, MethodDecl, NamedType, PrimitiveType, TypeDecl,
    TypeSyntax, WildcardType,
)
from .types import (
    ArrayType, ClassType, Primitive, TypeRef, TypeVar, Wildcard, substitute,
)

JAVA_LANG = "java.lang"
OBJECT_ID = "java.lang.Object"
ENUM_ID = "java.lang.Enum"
STRING_ID = "java.lang.String"
ASSERTION_ERROR_ID = "java.lang.AssertionError"


@dataclass
class TypeContext:
    """Naming environment for resolving one type annotation."""
    unit: object
    enclosing_type: str | None
    var_env: dict[str, TypeVar] = field(default_factory=dict)


class SymbolTable:
    def __init__(self, project: Project):
        self.project = project
        self.notes: list[str] = []
        # (name, span) pairs collected while resolving tolerantly
        self.resolution_errors: list[tuple[str, object]] = []

        self._unit_scopes: dict[int, dict[str, str | None]] = {}
        self.var_envs: dict[str, dict[str, TypeVar]] = {}
        self.var_bounds: dict[TypeVar, TypeRef | None] = {}
        self.supers: dict[str, tuple[ClassType, ...]] = {}
        self._direct_subtypes: dict[str, set[str]] = {}
        self.overrides: dict[str, frozenset[str]] = {}
        self.overridden_by: dict[str, frozenset[str]] = {}

        self._body_facts: dict[str, object] = {}
        self._sig_facts: dict[str, object] = {}
        self.node_target: dict[int, Declaration] = {}
        self.node_type: dict[int, TypeRef] = {}
        self.name_kind: dict[int, tuple] = {}
        self.node_error: dict[int, tuple] = {}

        self._build_var_envs()
        self._build_hierarchy()
        self._build_overrides()

    # ------------------------------------------------------------------
    # scopes and type-name resolution

    def _unit_scope(self, unit) -> dict[str, str | None]:
        scope = self._unit_scopes.get(id(unit))
        if scope is not None:
            return scope
        scope = {}

        def put(simple: str, qualified: str):
            if simple in scope and scope[simple] != qualified:
                scope[simple] = None  # ambiguous
            else:
                scope[simple] = qualified

        for qualified, decl in self.project.types_by_name.items():
            if qualified.startswith(JAVA_LANG + ".") and "." not in qualified[len(JAVA_LANG) + 1:]:
                put(decl.name, qualified)
        package = ".".join(unit.package)
        for qualified, decl in self.project.types_by_name.items():
            prefix = qualified.rsplit(".", 1)[0] if "." in qualified else ""
            if prefix == package:
                put(decl.name, qualified)
        for imp in unit.imports:
            put(imp[-1], ".".join(imp))
        for t in unit.types:
            qualified = f"{package}.{t.name}" if package else t.name
            put(t.name, qualified)
        self._unit_scopes[id(unit)] = scope
        return scope

    def resolve_type_name(self, name_parts: tuple[str, ...], ctx: TypeContext,
                          span=None) -> Declaration:
        dotted = ".".join(name_parts)
        if dotted in self.project.types_by_name:
            return self.project.types_by_name[dotted]
        # nested types of the enclosing chain are visible by simple name
        if len(name_parts) >= 1 and ctx.enclosing_type:
            outer = ctx.enclosing_type
            while outer:
                candidate = f"{outer}.{dotted}"
                if candidate in self.project.types_by_name:
                    return self.project.types_by_name[candidate]
                outer = outer.rsplit(".", 1)[0] if "." in outer else None
        scope = self._unit_scope(ctx.unit)
        head = name_parts[0]
        if head in scope:
            if scope[head] is None:
                raise AmbiguousNameError(f"ambiguous type name {head!r}")
            resolved = scope[head]
            rest = name_parts[1:]
            candidate = ".".join((resolved,) + rest)
            if candidate in self.project.types_by_name:
                return self.project.types_by_name[candidate]
        raise UnresolvedSymbolError([(dotted, span)])

    def resolve_type_syntax(self, ts: TypeSyntax, ctx: TypeContext,
                            allow_wildcard: bool = False) -> TypeRef:
        if isinstance(ts, PrimitiveType):
            return Primitive(ts.kind)
        if isinstance(ts, ArrayTypeSyntax):
            return ArrayType(self.resolve_type_syntax(ts.element, ctx))
        if isinstance(ts, WildcardType):
            if not allow_wildcard:
                raise TypeSolveError(f"{ts.span}: wildcard not allowed here")
            bound = None
            if ts.bound is not None:
                bound = self.resolve_type_syntax(ts.bound, ctx)
                if isinstance(bound, Wildcard):
                    raise TypeSolveError(f"{ts.span}: wildcard bound cannot be a wildcard")
            return Wildcard(ts.bound_kind, bound)
        if isinstance(ts, NamedType):
            if len(ts.name_parts) == 1 and ts.name_parts[0] in ctx.var_env:
                if ts.args is not None:
                    raise TypeSolveError(f"{ts.span}: type variable cannot take arguments")
                return ctx.var_env[ts.name_parts[0]]
            decl = self.resolve_type_name(ts.name_parts, ctx, span=ts.span)
            params = self.type_params_of(decl.decl_id)
            if ts.args is None:
                if params:
                    raise TypeSolveError(
                        f"{ts.span}: raw use of generic type {decl.decl_id}")
                return ClassType(decl.decl_id)
            if len(ts.args) != len(params):
                raise TypeSolveError(
                    f"{ts.span}: {decl.decl_id} expects {len(params)} type "
                    f"arguments, got {len(ts.args)}")
            args = []
            for a in ts.args:
                arg = self.resolve_type_syntax(a, ctx, allow_wildcard=True)
                if isinstance(arg, Primitive):
                    raise TypeSolveError(
                        f"{a.span}: primitive types cannot be type arguments")
                args.append(arg)
            return ClassType(decl.decl_id, tuple(args))
        raise TypeError(f"unknown type syntax {ts!r}")

    # ------------------------------------------------------------------
    # type parameters and hierarchy

    def _build_var_envs(self):
        for decl in self.project.declarations.values():
            if decl.is_type:
                node: TypeDecl = decl.node
                env = {tp.name: TypeVar(decl.decl_id, tp.name) for tp in node.type_params}
                self.var_envs[decl.decl_id] = env
            elif decl.kind is DeclKind.METHOD:
                node: MethodDecl = decl.node
                if node.type_params:
                    env = {tp.name: TypeVar(decl.decl_id, tp.name)
                           for tp in node.type_params}
                    self.var_envs[decl.decl_id] = env
        # bounds need all vars to exist first (F-bounded parameters)
        for decl in self.project.declarations.values():
            node = decl.node
            if not (decl.is_type or decl.kind is DeclKind.METHOD):
                continue
            type_params = getattr(node, "type_params", ())
            if not type_params:
                continue
            ctx = self.context_for(decl)
            for tp in type_params:
                var = ctx.var_env[tp.name]
                if tp.bound is None:
                    self.var_bounds[var] = None
                else:
                    try:
                        self.var_bounds[var] = self.resolve_type_syntax(tp.bound, ctx)
                    except (UnresolvedSymbolError, TypeSolveError) as exc:
                        self._record_error(str(exc), tp.span)
                        self.var_bounds[var] = None

    def context_for(self, decl: Declaration) -> TypeContext:
        """Naming context for a declaration: enclosing vars plus its own."""
        if decl.is_type:
            return TypeContext(decl.unit, decl.decl_id,
                               dict(self.var_envs.get(decl.decl_id, {})))
        enclosing = decl.container
        env = dict(self.var_envs.get(enclosing, {}))
        if decl.kind is DeclKind.METHOD:
            env.update(self.var_envs.get(decl.decl_id, {}))
        return TypeContext(decl.unit, enclosing, env)

    def type_params_of(self, type_id: str) -> tuple:
        decl = self.project.types_by_name.get(type_id)
        if decl is None:
            return ()
        return getattr(decl.node, "type_params", ())

    def type_vars_of(self, type_id: str) -> list[TypeVar]:
        return [TypeVar(type_id, tp.name) for tp in self.type_params_of(type_id)]

    def _build_hierarchy(self):
        has_object = OBJECT_ID in self.project.types_by_name
        has_enum = ENUM_ID in self.project.types_by_name
        for decl in self.project.types_by_name.values():
            node: TypeDecl = decl.node
            ctx = self.context_for(decl)
            supers: list[ClassType] = []
            for named in ([node.extends] if node.extends else []) + list(node.implements):
                try:
                    resolved = self.resolve_type_syntax(named, ctx)
                    if isinstance(resolved, ClassType):
                        supers.append(resolved)
                except (UnresolvedSymbolError, TypeSolveError, AmbiguousNameError) as exc:
                    self._record_error(str(exc), named.span)
            if node.is_enum and has_enum and decl.decl_id != ENUM_ID:
                supers.append(ClassType(ENUM_ID, (ClassType(decl.decl_id),)))
            if (not supers and has_object and decl.decl_id != OBJECT_ID):
                supers.append(ClassType(OBJECT_ID))
            elif (supers and has_object and decl.decl_id != OBJECT_ID
                  and node.is_interface):
                supers.append(ClassType(OBJECT_ID))
            self.supers[decl.decl_id] = tuple(supers)
        for type_id, supers in self.supers.items():
            for sup in supers:
                self._direct_subtypes.setdefault(sup.decl_id, set()).add(type_id)

    def _record_error(self, message: str, span):
        self.resolution_errors.append((message, span))

    def superclass_chain(self, type_id: str) -> list[str]:
        """Class ids from type_id upward following extends links only."""
        chain = [type_id]
        seen = {type_id}
        current = type_id
        while True:
            node = self.project.types_by_name.get(current)
            if node is None:
                break
            supers = self.supers.get(current, ())
            next_class = None
            for sup in supers:
                sup_decl = self.project.types_by_name.get(sup.decl_id)
                if sup_decl is not None and sup_decl.kind is not DeclKind.INTERFACE:
                    next_class = sup.decl_id
                    break
            if next_class is None or next_class in seen:
                break
            chain.append(next_class)
            seen.add(next_class)
            current = next_class
        return chain

    def ancestors(self, instance: ClassType, include_self: bool = False):
        """Yield instantiated ancestors of a class instance, nearest first."""
        seen: set[str] = set()
        queue: list[ClassType] = [instance] if include_self else []
        if not include_self:
            queue = list(self._instantiated_supers(instance))
        while queue:
            current = queue.pop(0)
            if current.decl_id in seen:
                continue
            seen.add(current.decl_id)
            yield current
            queue.extend(self._instantiated_supers(current))

    def _instantiated_supers(self, instance: ClassType):
        vars_ = self.type_vars_of(instance.decl_id)
        subst = dict(zip(vars_, instance.args)) if instance.args else {}
        for sup in self.supers.get(instance.decl_id, ()):
            yield substitute(sup, subst) if subst else sup

    def linearize(self, type_id: str) -> list[str]:
        """Dispatch order: the superclass chain, then interfaces, nearest first."""
        order: list[str] = []
        seen: set[str] = set()
        chain = self.superclass_chain(type_id)
        interface_queue: list[str] = []
        for cls in chain:
            if cls not in seen:
                order.append(cls)
                seen.add(cls)
            for sup in self.supers.get(cls, ()):
                decl = self.project.types_by_name.get(sup.decl_id)
                if decl is not None and decl.kind is DeclKind.INTERFACE:
                    interface_queue.append(sup.decl_id)
        while interface_queue:
            iface = interface_queue.pop(0)
            if iface in seen:
                continue
            order.append(iface)
            seen.add(iface)
            for sup in self.supers.get(iface, ()):
                interface_queue.append(sup.decl_id)
        return order

    def descendants(self, type_id: str, include_self: bool = True) -> set[str]:
        out: set[str] = {type_id}
        queue = [type_id]
        while queue:
            current = queue.pop(0)
            for sub in self._direct_subtypes.get(current, ()):
                if sub not in out:
                    out.add(sub)
                    queue.append(sub)
        if not include_self:
            out.discard(type_id)
        return out

    def project_subtypes(self, type_id: str) -> set[str]:
        """Non-stub descendants (including the type itself when non-stub)."""
        result = set()
        for sub in self.descendants(type_id, include_self=True):
            decl = self.project.types_by_name.get(sub)
            if decl is not None and not decl.is_stub:
                result.add(sub)
        return result

    # ------------------------------------------------------------------
    # member lookup

    def fields_named(self, instance: ClassType, name: str):
        """Find a field by name in the instance or its ancestors.

        Returns (field Declaration, owning instantiated ClassType) or None.
        """
        for current in [instance] + list(self.ancestors(instance)):
            decl = self.project.types_by_name.get(current.decl_id)
            if decl is None:
                continue
            for f in decl.node.fields:
                if f.name == name:
                    return self.project.decl_of(f), current
        return None

    def methods_named(self, instance: ClassType, name: str):
        """All visible methods with the given name, nearest first, with the
        instantiated owner; shadowed duplicates (same erased signature in a
        supertype) are dropped."""
        found: list[tuple[Declaration, ClassType]] = []
        seen_sigs: set[tuple] = set()
        for current in [instance] + list(self.ancestors(instance)):
            decl = self.project.types_by_name.get(current.decl_id)
            if decl is None:
                continue
            for m in decl.node.methods:
                if m.name != name:
                    continue
                mdecl = self.project.decl_of(m)
                sig = self._erased_member_sig(mdecl)
                if sig in seen_sigs:
                    continue
                seen_sigs.add(sig)
                found.append((mdecl, current))
        return found

    # ------------------------------------------------------------------
    # erasure and overrides

    def erasure(self, ty: TypeRef) -> str:
        if isinstance(ty, Primitive):
            return ty.kind
        if isinstance(ty, ClassType):
            return ty.decl_id
        if isinstance(ty, ArrayType):
            return self.erasure(ty.element) + "[]"
        if isinstance(ty, TypeVar):
            bound = self.var_bounds.get(ty)
            return self.erasure(bound) if bound is not None else OBJECT_ID
        if isinstance(ty, Wildcard):
            return self.erasure(ty.bound) if ty.bound is not None else OBJECT_ID
        raise TypeError(f"cannot erase {ty!r}")

    def _erased_param_types(self, decl: Declaration) -> tuple[str, ...] | None:
        ctx = self.context_for(decl)
        out = []
        for p in decl.node.params:
            try:
                out.append(self.erasure(self.resolve_type_syntax(p.declared, ctx)))
            except (UnresolvedSymbolError, TypeSolveError, AmbiguousNameError):
                return None
        return tuple(out)

    def _erased_member_sig(self, decl: Declaration):
        return (decl.name, self._erased_param_types(decl))

    def _build_overrides(self):
        direct: dict[str, set[str]] = {}
        for decl in list(self.project.declarations.values()):
            if decl.kind is not DeclKind.METHOD or decl.node.is_static:
                continue
            owner = self.project.types_by_name.get(decl.container)
            if owner is None:
                continue
            my_sig = self._erased_member_sig(decl)
            if my_sig[1] is None:
                continue
            instance = ClassType(decl.container,
                                 tuple(self.type_vars_of(decl.container)))
            for ancestor in self.ancestors(instance):
                anc_decl = self.project.types_by_name.get(ancestor.decl_id)
                if anc_decl is None:
                    continue
                for m in anc_decl.node.methods:
                    if m.name != decl.name or m.is_static:
                        continue
                    other = self.project.decl_of(m)
                    if self._erased_member_sig(other) == my_sig:
                        direct.setdefault(decl.decl_id, set()).add(other.decl_id)
        # transitive closure
        closed: dict[str, frozenset[str]] = {}

        def close(mid: str, seen: set[str]) -> frozenset[str]:
            if mid in closed:
                return closed[mid]
            result = set(direct.get(mid, ()))
            for parent in list(result):
                if parent not in seen:
                    result |= close(parent, seen | {mid})
            closed[mid] = frozenset(result)
            return closed[mid]

        for mid in direct:
            close(mid, set())
        self.overrides = {m: s for m, s in closed.items() if s}
        inverse: dict[str, set[str]] = {}
        for m, parents in self.overrides.items():
            for p in parents:
                inverse.setdefault(p, set()).add(m)
        self.overridden_by = {p: frozenset(s) for p, s in inverse.items()}

    def override_family(self, method_id: str) -> frozenset[str]:
        """The method, everything it overrides, and everything overriding it."""
        family = {method_id}
        family |= self.overrides.get(method_id, frozenset())
        family |= self.overridden_by.get(method_id, frozenset())
        # overriding methods of the overridden roots too (siblings)
        for root in list(family):
            family |= self.overridden_by.get(root, frozenset())
        return frozenset(family)

    def dispatch(self, runtime_class: str, target: Declaration) -> Declaration | None:
        """The implementation a virtual call on `target` selects for an
        instance of `runtime_class` (class chain beats interface defaults)."""
        if target.kind is not DeclKind.METHOD or target.node.is_static:
            return target
        family = self.override_family(target.decl_id)
        for type_id in self.linearize(runtime_class):
            decl = self.project.types_by_name.get(type_id)
            if decl is None:
                continue
            for m in decl.node.methods:
                mdecl = self.project.decl_of(m)
                if mdecl.decl_id in family or mdecl.decl_id == target.decl_id:
                    return mdecl
        return None

    # ------------------------------------------------------------------
    # body/signature fact caches (populated by solver.resolve_*)

    def cached_body_facts(self, decl_id: str):
        return self._body_facts.get(decl_id)

    def cache_body_facts(self, decl_id: str, facts):
        self._body_facts[decl_id] = facts

    def cached_sig_facts(self, decl_id: str):
        return self._sig_facts.get(decl_id)

    def cache_sig_facts(self, decl_id: str, facts):
        self._sig_facts[decl_id] = facts


def build_symbol_table(project: Project, strict: bool = True) -> SymbolTable:
    """Build the symbol table and resolve every loaded body.

    strict=True raises UnresolvedSymbolError listing every unresolved
    reference; strict=False keeps them in table.resolution_errors so that
    minimization can strip the broken declarations instead.
    """
    from .solver import resolve_all  # local import to avoid a cycle

    table = SymbolTable(project)
    resolve_all(table)
    if strict:
        failures = list(table.resolution_errors)
        for facts in table._body_facts.values():
            failures.extend(facts.errors)
        for facts in table._sig_facts.values():
            failures.extend(facts.errors)
        if failures:
            raise UnresolvedSymbolError(failures)
    return table
