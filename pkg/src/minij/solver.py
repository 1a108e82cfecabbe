"""Expression typing, overload resolution, and generics propagation.

The solver walks each declaration body once, recording per-node resolution
targets and solved types plus "facts" (references, calls, creations,
assignments) that the mark phase and the interpreter both consume.

Generic member access uses wildcard capture: a wildcard type argument
contributes a fresh extends-wildcard bounded by the argument's own bound or,
for unbounded wildcards, by the declared bound of the corresponding type
parameter (with the class's variables blurred to wildcards). Substituting
these captures into a member's declared type is what turns
``Set<?>`` over ``EnumMap<K extends Enum<K>, V>`` into
``Set<? extends Enum<?>>``. A wildcard that ends up as the type of a whole
expression collapses to its upper bound.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .errors import (
    AmbiguousNameError, AmbiguousOverloadError, NoApplicableMethodError,
    TypeSolveError, UnresolvedSymbolError,
)
from .project import Declaration, DeclKind
from .symtab import OBJECT_ID, STRING_ID, SymbolTable, TypeContext
from .syntax import (
    Assign, Binary, Block, BoolLit, Cast, CharLit, CtorDecl, DoubleLit,
    ExplicitCtorCall, Expr, ExprStmt, FieldAccess, FieldDecl, For, If, IntLit,
    LocalVarDecl, MethodCall, MethodDecl, Name, NamedType, New, NullLit,
    Return, Stmt, StringLit, This, Throw, TypeDecl, Unary, While,
)
from .types import (
    BOOLEAN, CHAR, DOUBLE, INT, NULL, VOID, UNBOUNDED, ArrayType, ClassType,
    Primitive, TypeRef, TypeVar, Wildcard, free_type_vars, is_reference,
    substitute,
)

# Owner keys for assigned-type analysis
# ("field", field_decl_id) | ("param", member_decl_id, index) |
# ("local", member_decl_id, var_name)


@dataclass
class CallFact:
    node: MethodCall
    static_target: Declaration
    receiver_kind: str  # "value" | "this" | "static" | "implicit-this" | "implicit-static"
    receiver_type: TypeRef | None
    receiver_rhs: tuple | None
    arg_types: tuple[TypeRef, ...]
    arg_rhs: tuple[tuple, ...]


@dataclass
class CreationFact:
    node: New
    ctor: Declaration
    class_type: ClassType
    arg_types: tuple[TypeRef, ...]
    arg_rhs: tuple[tuple, ...]


@dataclass
class DelegationFact:
    kind: str  # "this" | "super" | "implicit-super"
    target: Declaration | None
    arg_types: tuple[TypeRef, ...] = ()
    arg_rhs: tuple[tuple, ...] = ()


@dataclass
class AssignFact:
    owner: tuple
    rhs: tuple  # rhs info


@dataclass
class BodyFacts:
    decl: Declaration
    type_refs: list = dc_field(default_factory=list)  # (Declaration, span)
    field_reads: list = dc_field(default_factory=list)
    field_writes: list = dc_field(default_factory=list)
    calls: list = dc_field(default_factory=list)
    creations: list = dc_field(default_factory=list)
    delegation: DelegationFact | None = None
    assignments: list = dc_field(default_factory=list)
    errors: list = dc_field(default_factory=list)  # (message, span)


@dataclass
class SigFacts:
    decl: Declaration
    type_refs: list = dc_field(default_factory=list)
    param_types: tuple[TypeRef, ...] | None = None
    return_type: TypeRef | None = None
    declared_type: TypeRef | None = None  # fields
    errors: list = dc_field(default_factory=list)


class _Unresolved(Exception):
    """Internal: aborts typing of the enclosing statement."""

    def __init__(self, message, span, category: str = "unresolved"):
        super().__init__(message)
        self.message = message
        self.span = span
        self.category = category


# ---------------------------------------------------------------------------
# subtyping and containment


def object_type(table: SymbolTable) -> ClassType | None:
    if OBJECT_ID in table.project.types_by_name:
        return ClassType(OBJECT_ID)
    return None


def collapse_top(table: SymbolTable, ty: TypeRef) -> TypeRef:
    """A wildcard as a whole expression type collapses to its upper bound."""
    if isinstance(ty, Wildcard):
        if ty.bound_kind == "extends" and ty.bound is not None:
            return ty.bound
        obj = object_type(table)
        return obj if obj is not None else ty
    return ty


def is_subtype(table: SymbolTable, a: TypeRef, b: TypeRef) -> bool:
    if a == b:
        return True
    if a == NULL:
        return is_reference(b)
    if isinstance(a, Primitive) or isinstance(b, Primitive):
        return False
    if isinstance(a, Wildcard):
        return is_subtype(table, collapse_top(table, a), b)
    if isinstance(b, Wildcard):
        return contains(table, b, a)
    if isinstance(a, TypeVar):
        bound = table.var_bounds.get(a)
        upper = bound if bound is not None else object_type(table)
        return upper is not None and is_subtype(table, upper, b)
    if isinstance(b, TypeVar):
        return False
    if isinstance(a, ArrayType):
        if isinstance(b, ArrayType):
            return is_subtype(table, a.element, b.element)
        return isinstance(b, ClassType) and b.decl_id == OBJECT_ID
    if isinstance(b, ArrayType):
        return False
    if isinstance(a, ClassType) and isinstance(b, ClassType):
        for instance in [a] + list(table.ancestors(a)):
            if instance.decl_id != b.decl_id:
                continue
            if not b.args and not instance.args:
                return True
            if len(b.args) != len(instance.args):
                continue
            if all(contains(table, bi, ai)
                   for bi, ai in zip(b.args, instance.args)):
                return True
        return False
    return False


def contains(table: SymbolTable, outer: TypeRef, inner: TypeRef) -> bool:
    """Type-argument containment (the generics rule behind ``Set<? extends T>``
    accepting ``Set<S>`` whenever ``S <: T``)."""
    if outer == inner:
        return True
    if isinstance(outer, Wildcard):
        if outer.bound_kind is None:
            return True
        if outer.bound_kind == "extends":
            if isinstance(inner, Wildcard):
                if inner.bound_kind == "extends" and inner.bound is not None:
                    return is_subtype(table, inner.bound, outer.bound)
                if inner.bound_kind is None:
                    obj = object_type(table)
                    return obj is not None and is_subtype(table, obj, outer.bound)
                return False
            return is_subtype(table, inner, outer.bound)
        if outer.bound_kind == "super":
            if isinstance(inner, Wildcard):
                if inner.bound_kind == "super" and inner.bound is not None:
                    return is_subtype(table, outer.bound, inner.bound)
                return False
            return is_subtype(table, outer.bound, inner)
    return False


def assignable(table: SymbolTable, arg: TypeRef, param: TypeRef) -> bool:
    if arg == param:
        return True
    if arg == NULL:
        return is_reference(param)
    if isinstance(param, Primitive) or isinstance(arg, Primitive):
        return False
    if isinstance(param, TypeVar):
        bound = table.var_bounds.get(param)
        upper = bound if bound is not None else object_type(table)
        if upper is None:
            return True
        return assignable(table, arg, upper)
    return is_subtype(table, arg, param)


# ---------------------------------------------------------------------------
# capture and unification


def capture_subst(table: SymbolTable, instance: ClassType) -> dict:
    """Substitution for member lookup on an instantiated receiver; wildcard
    arguments become fresh extends-wildcards (capture conversion)."""
    vars_ = table.type_vars_of(instance.decl_id)
    if not vars_ or not instance.args:
        return {}
    raw = dict(zip(vars_, instance.args))
    subst = {}
    for var, arg in raw.items():
        if not isinstance(arg, Wildcard):
            subst[var] = arg
            continue
        if arg.bound_kind == "extends" and arg.bound is not None:
            subst[var] = Wildcard("extends", arg.bound)
            continue
        declared = table.var_bounds.get(var)
        if declared is None or (isinstance(declared, ClassType)
                                and declared.decl_id == OBJECT_ID
                                and not declared.args):
            subst[var] = UNBOUNDED
        else:
            subst[var] = Wildcard("extends", substitute(declared, raw))
    return subst


def unify(table: SymbolTable, declared: TypeRef, arg: TypeRef,
          method_vars: set[TypeVar], bindings: dict) -> None:
    """One-way unification binding a method's type variables against the
    solved argument types; conflicting bindings blur to an unbounded wildcard."""
    if isinstance(declared, TypeVar) and declared in method_vars:
        value = collapse_top(table, arg) if isinstance(arg, Wildcard) else arg
        if value == NULL or isinstance(value, Primitive):
            return
        if declared in bindings and bindings[declared] != value:
            bindings[declared] = UNBOUNDED
        else:
            bindings.setdefault(declared, value)
        return
    if isinstance(declared, ArrayType) and isinstance(arg, ArrayType):
        unify(table, declared.element, arg.element, method_vars, bindings)
        return
    if isinstance(declared, Wildcard) and declared.bound is not None \
            and isinstance(arg, Wildcard) and arg.bound is not None:
        unify(table, declared.bound, arg.bound, method_vars, bindings)
        return
    if isinstance(declared, ClassType) and declared.args \
            and isinstance(arg, ClassType):
        for instance in [arg] + list(table.ancestors(arg)):
            if instance.decl_id == declared.decl_id \
                    and len(instance.args) == len(declared.args):
                for d, a in zip(declared.args, instance.args):
                    unify(table, d, a, method_vars, bindings)
                return


# ---------------------------------------------------------------------------
# signature resolution


def resolve_signature(table: SymbolTable, decl: Declaration) -> SigFacts:
    cached = table.cached_sig_facts(decl.decl_id)
    if cached is not None:
        return cached
    facts = SigFacts(decl)
    ctx = table.context_for(decl)

    def resolve(ts, record=True):
        ty = table.resolve_type_syntax(ts, ctx)
        if record:
            _record_type_refs(table, facts.type_refs, ty, ts.span)
        return ty

    try:
        if decl.kind in (DeclKind.METHOD, DeclKind.CTOR):
            params = []
            for p in decl.node.params:
                params.append(resolve(p.declared))
            facts.param_types = tuple(params)
            if decl.kind is DeclKind.METHOD:
                facts.return_type = resolve(decl.node.returns)
            for tp in getattr(decl.node, "type_params", ()) or ():
                if tp.bound is not None:
                    resolve(tp.bound)
        elif decl.kind is DeclKind.FIELD:
            facts.declared_type = resolve(decl.node.declared)
        elif decl.is_type:
            node: TypeDecl = decl.node
            for named in ([node.extends] if node.extends else []) + list(node.implements):
                resolve(named)
            for tp in node.type_params:
                if tp.bound is not None:
                    resolve(tp.bound)
    except (UnresolvedSymbolError, TypeSolveError, AmbiguousNameError) as exc:
        facts.errors.append((str(exc), decl.node.span))
    table.cache_sig_facts(decl.decl_id, facts)
    return facts


def _record_type_refs(table: SymbolTable, sink: list, ty: TypeRef, span):
    """Record every type declaration mentioned inside a resolved type."""
    if isinstance(ty, ClassType):
        target = table.project.types_by_name.get(ty.decl_id)
        if target is not None:
            sink.append((target, span))
        for a in ty.args:
            _record_type_refs(table, sink, a, span)
    elif isinstance(ty, ArrayType):
        _record_type_refs(table, sink, ty.element, span)
    elif isinstance(ty, Wildcard) and ty.bound is not None:
        _record_type_refs(table, sink, ty.bound, span)


# ---------------------------------------------------------------------------
# body resolution


class BodyResolver:
    def __init__(self, table: SymbolTable, decl: Declaration):
        self.table = table
        self.project = table.project
        self.decl = decl
        self.facts = BodyFacts(decl)
        self.ctx: TypeContext = table.context_for(decl)
        container = decl.container
        self.enclosing_id = container
        member_node = decl.node
        static = bool(getattr(member_node, "is_static", False))
        if decl.kind is DeclKind.FIELD:
            static = decl.node.is_static
        self.is_static = static
        if container is not None:
            vars_ = tuple(table.type_vars_of(container))
            self.this_type = ClassType(container, vars_)
        else:
            self.this_type = None
        self.scopes: list[dict[str, TypeRef]] = []

    # --- driver ---

    def run(self) -> BodyFacts:
        node = self.decl.node
        try:
            if self.decl.kind is DeclKind.FIELD:
                if node.init is not None:
                    self._solve_guarded(node.init)
                    if not self.facts.errors:
                        self.facts.assignments.append(AssignFact(
                            ("field", self.decl.decl_id),
                            self._rhs_info(node.init)))
            elif self.decl.kind in (DeclKind.METHOD, DeclKind.CTOR):
                self._push_params()
                if self.decl.kind is DeclKind.CTOR:
                    self._resolve_delegation(node)
                if node.body is not None:
                    body_stmts = node.body.stmts
                    if (self.decl.kind is DeclKind.CTOR and body_stmts
                            and isinstance(body_stmts[0], ExplicitCtorCall)):
                        body_stmts = body_stmts[1:]
                    self.scopes.append({})
                    for stmt in body_stmts:
                        self._stmt(stmt)
                    self.scopes.pop()
        finally:
            pass
        return self.facts

    def _push_params(self):
        sig = resolve_signature(self.table, self.decl)
        frame = {}
        if sig.param_types is not None:
            for p, ty in zip(self.decl.node.params, sig.param_types):
                frame[p.name] = ty
        self.scopes.append(frame)

    def _resolve_delegation(self, node: CtorDecl):
        explicit = None
        if node.body is not None and node.body.stmts \
                and isinstance(node.body.stmts[0], ExplicitCtorCall):
            explicit = node.body.stmts[0]
        try:
            if explicit is not None:
                arg_types = tuple(self._solve(a) for a in explicit.args)
                arg_rhs = tuple(self._rhs_info(a) for a in explicit.args)
                if explicit.target == "this":
                    owner = self.enclosing_id
                else:
                    owner = self._superclass_id()
                    if owner is None:
                        raise _Unresolved("no superclass for super(...)", explicit.span)
                target = self._resolve_ctor(owner, arg_types, explicit.span)
                self.table.node_target[id(explicit)] = target
                self.facts.delegation = DelegationFact(
                    explicit.target, target, arg_types, arg_rhs)
            else:
                owner = self._superclass_id()
                if owner is None:
                    self.facts.delegation = DelegationFact("implicit-super", None)
                    return
                target = self._resolve_ctor(owner, (), node.span)
                self.facts.delegation = DelegationFact("implicit-super", target)
        except _Unresolved as exc:
            self.facts.errors.append((exc.message, exc.span))
            if self.facts.delegation is None:
                self.facts.delegation = DelegationFact(
                    explicit.target if explicit is not None else "implicit-super", None)

    def _superclass_id(self) -> str | None:
        chain = self.table.superclass_chain(self.enclosing_id)
        return chain[1] if len(chain) > 1 else None

    def _resolve_ctor(self, owner_id: str, arg_types, span) -> Declaration:
        owner_decl = self.project.types_by_name.get(owner_id)
        if owner_decl is None:
            raise _Unresolved(f"unknown class {owner_id}", span)
        vars_ = tuple(self.table.type_vars_of(owner_id))
        instance = ClassType(owner_id, vars_)
        candidates = [(c, instance) for c in self.project.ctors_of(owner_id)]
        chosen = self._pick_overload(candidates, arg_types, None, span,
                                     f"constructor of {owner_id}")
        return chosen[0]

    # --- statements ---

    def _stmt(self, stmt: Stmt):
        try:
            self._stmt_inner(stmt)
        except _Unresolved as exc:
            self.facts.errors.append((exc.message, exc.span))

    def _stmt_inner(self, stmt: Stmt):
        if isinstance(stmt, Block):
            self.scopes.append({})
            for s in stmt.stmts:
                self._stmt(s)
            self.scopes.pop()
        elif isinstance(stmt, LocalVarDecl):
            ty = self._resolve_type(stmt.declared)
            if stmt.init is not None:
                self._solve(stmt.init)
                self.facts.assignments.append(AssignFact(
                    ("local", self.decl.decl_id, stmt.name),
                    self._rhs_info(stmt.init)))
            self.scopes[-1][stmt.name] = ty
            self.table.name_kind[id(stmt)] = ("local", stmt.name)
        elif isinstance(stmt, ExprStmt):
            self._solve(stmt.expr)
        elif isinstance(stmt, If):
            self._solve(stmt.cond)
            self._stmt(stmt.then)
            if stmt.orelse is not None:
                self._stmt(stmt.orelse)
        elif isinstance(stmt, While):
            self._solve(stmt.cond)
            self._stmt(stmt.body)
        elif isinstance(stmt, For):
            self.scopes.append({})
            if stmt.init is not None:
                self._stmt_inner(stmt.init)
            if stmt.cond is not None:
                self._solve(stmt.cond)
            if stmt.update is not None:
                self._solve(stmt.update)
            self._stmt(stmt.body)
            self.scopes.pop()
        elif isinstance(stmt, Return):
            if stmt.value is not None:
                self._solve(stmt.value)
        elif isinstance(stmt, Throw):
            self._solve(stmt.value)
        elif isinstance(stmt, ExplicitCtorCall):
            raise _Unresolved(
                "explicit constructor invocation must be the first statement",
                stmt.span)
        else:
            raise TypeError(f"unknown statement {stmt!r}")

    # --- expression typing ---

    def _solve_guarded(self, expr: Expr):
        try:
            return self._solve(expr)
        except _Unresolved as exc:
            self.facts.errors.append((exc.message, exc.span))
            return None

    def _resolve_type(self, ts) -> TypeRef:
        try:
            ty = self.table.resolve_type_syntax(ts, self.ctx)
        except (UnresolvedSymbolError, TypeSolveError, AmbiguousNameError) as exc:
            raise _Unresolved(str(exc), ts.span) from exc
        _record_type_refs(self.table, self.facts.type_refs, ty, ts.span)
        return ty

    def _lookup_local(self, name: str) -> TypeRef | None:
        for frame in reversed(self.scopes):
            if name in frame:
                return frame[name]
        return None

    def _param_index(self, name: str) -> int | None:
        for i, p in enumerate(getattr(self.decl.node, "params", ()) or ()):
            if p.name == name:
                return i
        return None

    def _solve(self, expr: Expr) -> TypeRef:
        ty = self._solve_inner(expr)
        self.table.node_type[id(expr)] = ty
        return ty

    def _solve_inner(self, expr: Expr) -> TypeRef:
        table = self.table
        if isinstance(expr, IntLit):
            return INT
        if isinstance(expr, DoubleLit):
            return DOUBLE
        if isinstance(expr, BoolLit):
            return BOOLEAN
        if isinstance(expr, CharLit):
            return CHAR
        if isinstance(expr, StringLit):
            if STRING_ID in self.project.types_by_name:
                string_decl = self.project.types_by_name[STRING_ID]
                self.facts.type_refs.append((string_decl, expr.span))
                return ClassType(STRING_ID)
            raise _Unresolved("string literals require a java.lang.String stub",
                              expr.span)
        if isinstance(expr, NullLit):
            return NULL
        if isinstance(expr, This):
            if self.this_type is None or self.is_static:
                raise _Unresolved("'this' used in a static context", expr.span)
            return self.this_type
        if isinstance(expr, Name):
            return self._solve_name(expr, write=False)
        if isinstance(expr, FieldAccess):
            kind, value = self._solve_scope(expr)
            if kind == "type":
                raise _Unresolved(f"type {value.decl_id} used as a value", expr.span)
            return value
        if isinstance(expr, MethodCall):
            return self._solve_call(expr)
        if isinstance(expr, New):
            return self._solve_new(expr)
        if isinstance(expr, Cast):
            target = self._resolve_type(expr.target)
            self._solve(expr.expr)
            return target
        if isinstance(expr, Unary):
            operand = self._solve(expr.operand)
            if expr.op == "!":
                return BOOLEAN
            if operand in (INT, DOUBLE, CHAR):
                return operand
            raise _Unresolved(f"cannot negate {operand}", expr.span)
        if isinstance(expr, Binary):
            return self._solve_binary(expr)
        if isinstance(expr, Assign):
            return self._solve_assign(expr)
        raise TypeError(f"unknown expression {expr!r}")

    def _solve_name(self, expr: Name, write: bool) -> TypeRef:
        local = self._lookup_local(expr.ident)
        if local is not None:
            idx = self._param_index(expr.ident)
            shadowed = any(expr.ident in frame for frame in self.scopes[1:])
            if idx is not None and not shadowed:
                self.table.name_kind[id(expr)] = ("param", idx)
            else:
                self.table.name_kind[id(expr)] = ("local", expr.ident)
            return local
        field_hit = self._find_field(expr.ident, expr.span)
        if field_hit is not None:
            fdecl, owner_instance = field_hit
            if not fdecl.node.is_static and self.is_static:
                raise _Unresolved(
                    f"instance field {expr.ident!r} referenced from a static context",
                    expr.span)
            self.table.name_kind[id(expr)] = ("field", fdecl)
            self.table.node_target[id(expr)] = fdecl
            (self.facts.field_writes if write else self.facts.field_reads).append(fdecl)
            return self._field_type(fdecl, owner_instance, expr.span)
        raise _Unresolved(f"cannot resolve {expr.ident!r}", expr.span)

    def _find_field(self, name: str, span):
        if self.this_type is None:
            return None
        return self.table.fields_named(self.this_type, name)

    def _field_type(self, fdecl: Declaration, owner_instance: ClassType, span) -> TypeRef:
        sig = resolve_signature(self.table, fdecl)
        if sig.declared_type is None:
            raise _Unresolved(f"field {fdecl.decl_id} has no resolvable type", span)
        subst = capture_subst(self.table, owner_instance)
        ty = collapse_top(self.table, substitute(sig.declared_type, subst))
        owner_type = self.project.types_by_name.get(fdecl.container)
        if owner_type is not None:
            self.facts.type_refs.append((owner_type, span))
        return ty

    def _solve_scope(self, expr: Expr):
        """Resolve an access scope to ("value", TypeRef) or ("type", Declaration)."""
        if isinstance(expr, Name):
            local = self._lookup_local(expr.ident)
            if local is not None:
                idx = self._param_index(expr.ident)
                shadowed = any(expr.ident in frame for frame in self.scopes[1:])
                if idx is not None and not shadowed:
                    self.table.name_kind[id(expr)] = ("param", idx)
                else:
                    self.table.name_kind[id(expr)] = ("local", expr.ident)
                self.table.node_type[id(expr)] = local
                return "value", local
            if self.this_type is not None:
                hit = self.table.fields_named(self.this_type, expr.ident)
                if hit is not None:
                    ty = self._solve_name(expr, write=False)
                    self.table.node_type[id(expr)] = ty
                    return "value", ty
            try:
                decl = self.table.resolve_type_name((expr.ident,), self.ctx, expr.span)
                self.table.name_kind[id(expr)] = ("type", decl)
                self.facts.type_refs.append((decl, expr.span))
                return "type", decl
            except (UnresolvedSymbolError, AmbiguousNameError):
                raise _Unresolved(f"cannot resolve {expr.ident!r}", expr.span)
        if isinstance(expr, FieldAccess):
            dotted = _dotted_chain(expr)
            if dotted is not None:
                joined = ".".join(dotted)
                decl = self.project.types_by_name.get(joined)
                if decl is not None:
                    self.table.name_kind[id(expr)] = ("type", decl)
                    self.facts.type_refs.append((decl, expr.span))
                    return "type", decl
            kind, value = self._solve_scope(expr.scope)
            if kind == "type":
                nested = self.project.types_by_name.get(
                    f"{value.decl_id}.{expr.name}")
                if nested is not None:
                    self.table.name_kind[id(expr)] = ("type", nested)
                    self.facts.type_refs.append((nested, expr.span))
                    return "type", nested
                instance = ClassType(value.decl_id,
                                     tuple(self.table.type_vars_of(value.decl_id)))
                hit = self.table.fields_named(instance, expr.name)
                if hit is None:
                    raise _Unresolved(
                        f"no field {expr.name!r} in {value.decl_id}", expr.span)
                fdecl, owner_instance = hit
                self.table.node_target[id(expr)] = fdecl
                self.facts.field_reads.append(fdecl)
                ty = self._field_type(fdecl, owner_instance, expr.span)
                self.table.node_type[id(expr)] = ty
                return "value", ty
            receiver = value
            hit = self._field_on_value(receiver, expr)
            ty = hit
            self.table.node_type[id(expr)] = ty
            return "value", ty
        ty = self._solve(expr)
        return "value", ty

    def _field_on_value(self, receiver: TypeRef, expr: FieldAccess) -> TypeRef:
        instance = self._as_class_instance(receiver, expr.span)
        hit = self.table.fields_named(instance, expr.name)
        if hit is None:
            raise _Unresolved(f"no field {expr.name!r} on {receiver}", expr.span)
        fdecl, owner_instance = hit
        self.table.node_target[id(expr)] = fdecl
        self.facts.field_reads.append(fdecl)
        return self._field_type(fdecl, owner_instance, expr.span)

    def _as_class_instance(self, receiver: TypeRef, span) -> ClassType:
        receiver = collapse_top(self.table, receiver)
        if isinstance(receiver, ClassType):
            return receiver
        if isinstance(receiver, TypeVar):
            bound = self.table.var_bounds.get(receiver)
            if bound is None:
                obj = object_type(self.table)
                if obj is not None:
                    return obj
            elif isinstance(bound, ClassType):
                return bound
        if isinstance(receiver, ArrayType):
            obj = object_type(self.table)
            if obj is not None:
                return obj
        raise _Unresolved(f"type {receiver} has no members", span)

    def _solve_call(self, expr: MethodCall) -> TypeRef:
        table = self.table
        arg_types = tuple(self._solve(a) for a in expr.args)
        arg_rhs = tuple(self._rhs_info(a) for a in expr.args)
        receiver_kind = "value"
        receiver_type: TypeRef | None = None
        receiver_rhs = None
        if expr.scope is None:
            if self.this_type is None:
                raise _Unresolved("unqualified call outside a class", expr.span)
            instance = self.this_type
            candidates = table.methods_named(instance, expr.name)
            receiver_kind = "implicit-this"
            receiver_type = instance
            receiver_rhs = ("this",)
        else:
            kind, value = self._solve_scope(expr.scope)
            if kind == "type":
                instance = ClassType(value.decl_id,
                                     tuple(table.type_vars_of(value.decl_id)))
                candidates = table.methods_named(instance, expr.name)
                receiver_kind = "static"
                receiver_type = instance
            else:
                receiver_type = value
                instance = self._as_class_instance(value, expr.span)
                candidates = table.methods_named(instance, expr.name)
                receiver_kind = "value"
                receiver_rhs = self._rhs_info(expr.scope)
        if not candidates:
            raise _Unresolved(
                f"no method {expr.name!r} on {instance.decl_id}", expr.span)
        explicit_targs = None
        if expr.type_args is not None:
            explicit_targs = tuple(
                self.table.resolve_type_syntax(t, self.ctx, allow_wildcard=True)
                for t in expr.type_args)
        try:
            chosen, full_subst = self._pick_overload(
                candidates, arg_types, explicit_targs, expr.span, expr.name)
        except _Unresolved as exc:
            self.table.node_error[id(expr)] = (exc.category, exc.message)
            raise
        if chosen.node.is_static:
            if receiver_kind == "implicit-this":
                receiver_kind = "implicit-static"
            elif receiver_kind == "value":
                raise _Unresolved(
                    f"static method {chosen.decl_id} called on an instance", expr.span)
        elif receiver_kind == "static":
            raise _Unresolved(
                f"instance method {chosen.decl_id} called statically", expr.span)
        elif receiver_kind == "implicit-this" and self.is_static:
            raise _Unresolved(
                f"instance method {chosen.decl_id} called from a static context",
                expr.span)
        self.table.node_target[id(expr)] = chosen
        fact = CallFact(expr, chosen, receiver_kind, receiver_type,
                        receiver_rhs, arg_types, arg_rhs)
        self.facts.calls.append(fact)
        owner_type = self.project.types_by_name.get(chosen.container)
        if owner_type is not None:
            self.facts.type_refs.append((owner_type, expr.span))
        sig = resolve_signature(table, chosen)
        if sig.return_type is None:
            raise _Unresolved(f"method {chosen.decl_id} has no resolvable return type",
                              expr.span)
        result = collapse_top(table, substitute(sig.return_type, full_subst))
        return result

    def _solve_new(self, expr: New) -> TypeRef:
        class_type = self._resolve_type(expr.type)
        if not isinstance(class_type, ClassType):
            raise _Unresolved("can only instantiate class types", expr.span)
        for a in class_type.args:
            if isinstance(a, Wildcard):
                raise _Unresolved("cannot instantiate with wildcard arguments",
                                  expr.span)
        target_decl = self.project.types_by_name.get(class_type.decl_id)
        if target_decl is not None and target_decl.kind is not DeclKind.CLASS:
            raise _Unresolved(f"cannot instantiate {target_decl.kind.value} "
                              f"{class_type.decl_id}", expr.span)
        if target_decl is not None and target_decl.node.is_abstract:
            raise _Unresolved(f"cannot instantiate abstract class {class_type.decl_id}",
                              expr.span)
        arg_types = tuple(self._solve(a) for a in expr.args)
        arg_rhs = tuple(self._rhs_info(a) for a in expr.args)
        instance = class_type
        candidates = [(c, instance)
                      for c in self.project.ctors_of(class_type.decl_id)]
        try:
            chosen, _ = self._pick_overload(candidates, arg_types, None, expr.span,
                                            f"constructor of {class_type.decl_id}")
        except _Unresolved as exc:
            self.table.node_error[id(expr)] = (exc.category, exc.message)
            raise
        self.table.node_target[id(expr)] = chosen
        self.facts.creations.append(CreationFact(
            expr, chosen, class_type, arg_types, arg_rhs))
        return class_type

    def _pick_overload(self, candidates, arg_types, explicit_targs, span, name):
        if isinstance(candidates, tuple):
            candidates = [candidates]
        applicable = []
        for item in candidates:
            decl, owner_instance = item if isinstance(item, tuple) else (item, None)
            sig = resolve_signature(self.table, decl)
            if sig.param_types is None or len(sig.param_types) != len(arg_types):
                continue
            subst = capture_subst(self.table, owner_instance) if owner_instance else {}
            method_vars = set(self.table.var_envs.get(decl.decl_id, {}).values())
            bindings: dict = {}
            if method_vars:
                if explicit_targs is not None:
                    ordered = [self.table.var_envs[decl.decl_id][tp.name]
                               for tp in decl.node.type_params]
                    for var, targ in zip(ordered, explicit_targs):
                        bindings[var] = targ
                else:
                    for p, a in zip(sig.param_types, arg_types):
                        unify(self.table, substitute(p, subst), a,
                              method_vars, bindings)
                for var in method_vars:
                    bindings.setdefault(var, UNBOUNDED)
            full = dict(subst)
            full.update(bindings)
            params = tuple(substitute(p, full) for p in sig.param_types)
            if all(assignable(self.table, a, p)
                   for a, p in zip(arg_types, params)):
                applicable.append((decl, full, params))
        if not applicable:
            shown = ", ".join(str(t) for t in arg_types)
            raise _Unresolved(
                f"no applicable overload of {name!r} for ({shown})", span,
                category="no-applicable")
        if len(applicable) == 1:
            return applicable[0][0], applicable[0][1]
        maximal = []
        for i, (decl_i, subst_i, params_i) in enumerate(applicable):
            beaten = False
            for j, (decl_j, _, params_j) in enumerate(applicable):
                if i == j:
                    continue
                if self._strictly_more_specific(params_j, params_i):
                    beaten = True
                    break
            if not beaten:
                maximal.append((decl_i, subst_i, params_i))
        if len(maximal) == 1:
            return maximal[0][0], maximal[0][1]
        names = ", ".join(d.decl_id for d, _, _ in maximal)
        raise _Unresolved(f"ambiguous call to {name!r}: {names}", span,
                          category="ambiguous")

    def _strictly_more_specific(self, params_a, params_b) -> bool:
        at_least = all(
            is_subtype(self.table, a, b) or contains(self.table, b, a)
            for a, b in zip(params_a, params_b))
        if not at_least:
            return False
        return params_a != params_b

    def _solve_binary(self, expr: Binary) -> TypeRef:
        left = self._solve(expr.left)
        right = self._solve(expr.right)
        op = expr.op
        if op in ("&&", "||"):
            return BOOLEAN
        if op in ("==", "!="):
            return BOOLEAN
        if op in ("<", ">", "<=", ">="):
            return BOOLEAN
        if op == "+" and (self._is_string(left) or self._is_string(right)):
            return ClassType(STRING_ID)
        if left == DOUBLE or right == DOUBLE:
            if left in (INT, DOUBLE) and right in (INT, DOUBLE):
                return DOUBLE
        if left == INT and right == INT:
            return INT
        raise _Unresolved(f"operator {op!r} undefined for {left} and {right}",
                          expr.span)

    def _is_string(self, ty: TypeRef) -> bool:
        return isinstance(ty, ClassType) and ty.decl_id == STRING_ID

    def _solve_assign(self, expr: Assign) -> TypeRef:
        value_type = self._solve(expr.value)
        target = expr.target
        if isinstance(target, Name):
            local = self._lookup_local(target.ident)
            if local is not None:
                idx = self._param_index(target.ident)
                shadowed = any(target.ident in frame for frame in self.scopes[1:])
                if idx is not None and not shadowed:
                    self.table.name_kind[id(target)] = ("param", idx)
                    owner = ("param", self.decl.decl_id, idx)
                else:
                    self.table.name_kind[id(target)] = ("local", target.ident)
                    owner = ("local", self.decl.decl_id, target.ident)
                self.table.node_type[id(target)] = local
                self.facts.assignments.append(
                    AssignFact(owner, self._rhs_info(expr.value)))
                return local
            ty = self._solve_name(target, write=True)
            self.table.node_type[id(target)] = ty
            fdecl = self.table.node_target.get(id(target))
            if fdecl is not None:
                self.facts.assignments.append(AssignFact(
                    ("field", fdecl.decl_id), self._rhs_info(expr.value)))
            return ty
        if isinstance(target, FieldAccess):
            kind, ty = self._solve_scope(target)
            if kind == "type":
                raise _Unresolved("cannot assign to a type", target.span)
            fdecl = self.table.node_target.get(id(target))
            if fdecl is None:
                raise _Unresolved("assignment target is not a field", target.span)
            # a pure write; undo the read recorded during scope solving
            if self.facts.field_reads and self.facts.field_reads[-1] is fdecl:
                self.facts.field_reads.pop()
            self.facts.field_writes.append(fdecl)
            self.facts.assignments.append(AssignFact(
                ("field", fdecl.decl_id), self._rhs_info(expr.value)))
            return ty
        raise _Unresolved("invalid assignment target", target.span)

    def _rhs_info(self, expr: Expr) -> tuple:
        if isinstance(expr, New):
            ty = self.table.node_type.get(id(expr))
            if isinstance(ty, ClassType):
                return ("new", ty)
            return ("other", ty)
        if isinstance(expr, StringLit):
            return ("new", ClassType(STRING_ID))
        if isinstance(expr, NullLit):
            return ("null",)
        if isinstance(expr, This):
            return ("this",)
        if isinstance(expr, Cast):
            return self._rhs_info(expr.expr)
        if isinstance(expr, Name):
            kind = self.table.name_kind.get(id(expr))
            if kind is None:
                return ("other", self.table.node_type.get(id(expr)))
            if kind[0] == "local":
                return ("var", ("local", self.decl.decl_id, kind[1]))
            if kind[0] == "param":
                return ("var", ("param", self.decl.decl_id, kind[1]))
            if kind[0] == "field":
                return ("var", ("field", kind[1].decl_id))
            return ("other", self.table.node_type.get(id(expr)))
        if isinstance(expr, FieldAccess):
            fdecl = self.table.node_target.get(id(expr))
            if fdecl is not None and fdecl.kind is DeclKind.FIELD:
                return ("var", ("field", fdecl.decl_id))
            return ("other", self.table.node_type.get(id(expr)))
        ty = self.table.node_type.get(id(expr))
        if isinstance(ty, Primitive):
            return ("primitive", ty)
        return ("other", ty)


def _dotted_chain(expr: Expr) -> list[str] | None:
    if isinstance(expr, Name):
        return [expr.ident]
    if isinstance(expr, FieldAccess):
        inner = _dotted_chain(expr.scope)
        if inner is None:
            return None
        return inner + [expr.name]
    return None


# ---------------------------------------------------------------------------
# public entry points


def resolve_body(table: SymbolTable, decl: Declaration) -> BodyFacts:
    cached = table.cached_body_facts(decl.decl_id)
    if cached is not None:
        return cached
    facts = BodyResolver(table, decl).run()
    table.cache_body_facts(decl.decl_id, facts)
    return facts


def _has_body(decl: Declaration) -> bool:
    if decl.kind is DeclKind.FIELD:
        return decl.node.init is not None
    if decl.kind is DeclKind.CTOR:
        return True  # includes implicit delegation
    if decl.kind is DeclKind.METHOD:
        return decl.node.body is not None
    return False


def resolve_all(table: SymbolTable) -> None:
    """Resolve every signature and (non-stub) body, caching the facts."""
    for decl in table.project.declarations.values():
        resolve_signature(table, decl)
    for decl in table.project.declarations.values():
        if decl.is_stub:
            continue
        if _has_body(decl):
            resolve_body(table, decl)


def solve_expr_type(table: SymbolTable, decl: Declaration, expr: Expr) -> TypeRef:
    """Most specific type of an expression inside decl's body."""
    resolve_body(table, decl)
    ty = table.node_type.get(id(expr))
    if ty is None:
        raise TypeSolveError(f"{expr.span}: expression was not typed")
    return ty


def resolve_call(table: SymbolTable, decl: Declaration, call: MethodCall) -> Declaration:
    """The static target of a call inside decl's body."""
    resolve_body(table, decl)
    target = table.node_target.get(id(call))
    if target is None:
        error = table.node_error.get(id(call))
        if error is not None:
            category, message = error
            if category == "ambiguous":
                raise AmbiguousOverloadError(message)
            raise NoApplicableMethodError(message)
        raise NoApplicableMethodError(f"{call.span}: call was not resolved")
    return target


def naive_expr_type(table: SymbolTable, decl: Declaration, expr: Expr) -> TypeRef:
    """Declared-return-type solving: generic information is blurred to
    unbounded wildcards instead of being propagated (the upper bound the
    real solver must stay within)."""
    resolve_body(table, decl)
    if isinstance(expr, MethodCall):
        target = table.node_target.get(id(expr))
        if target is None:
            raise TypeSolveError(f"{expr.span}: call was not resolved")
        sig = resolve_signature(table, target)
        blurred = {v: UNBOUNDED for v in free_type_vars(sig.return_type)}
        return substitute(sig.return_type, blurred)
    if isinstance(expr, (Name, FieldAccess)):
        target = table.node_target.get(id(expr))
        if target is not None and target.kind is DeclKind.FIELD:
            sig = resolve_signature(table, target)
            blurred = {v: UNBOUNDED for v in free_type_vars(sig.declared_type)}
            return substitute(sig.declared_type, blurred)
    return solve_expr_type(table, decl, expr)
