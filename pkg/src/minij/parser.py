"""Recursive-descent parser producing MiniJ ASTs.

Backtracking (index save/restore) resolves the two classic ambiguities:
local variable declarations vs expression statements, and casts vs
parenthesized expressions.
"""
from __future__ import annotations

from .errors import ParseError
from .syntax import (
    ArrayTypeSyntax, Assign, Binary, Block, BoolLit, Cast, CharLit,
    CompilationUnit, CtorDecl, DoubleLit, ExplicitCtorCall, Expr, ExprStmt,
    FieldAccess, FieldDecl, For, If, IntLit, LocalVarDecl, MethodCall,
    MethodDecl, Name, NamedType, New, NullLit, Param, PrimitiveType, Return,
    Stmt, StringLit, This, Throw, TypeDecl, TypeParam, TypeSyntax, While,
    WildcardType,
)
from .tokens import Token, TokenKind, tokenize

MODIFIERS = ("public", "private", "protected", "static", "abstract", "final")
PRIMITIVES = ("int", "boolean", "char", "double", "void")


class Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    # --- token plumbing ---

    def peek(self, offset: int = 0) -> Token:
        i = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[i]

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok.text == text and tok.kind in (TokenKind.PUNCT, TokenKind.KEYWORD)

    def accept(self, text: str) -> Token | None:
        if self.at(text):
            return self.advance()
        return None

    def expect(self, text: str) -> Token:
        if self.at(text):
            return self.advance()
        tok = self.peek()
        raise ParseError(f"expected {text!r}, found {tok.text or '<eof>'!r}", tok.span)

    def expect_ident(self) -> Token:
        tok = self.peek()
        if tok.kind is not TokenKind.IDENT:
            raise ParseError(f"expected identifier, found {tok.text or '<eof>'!r}", tok.span)
        return self.advance()

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind is not TokenKind.EOF:
            self.pos += 1
        return tok

    def _prev_span(self):
        return self.tokens[max(self.pos - 1, 0)].span

    def _span(self, start: Token):
        return start.span.cover(self._prev_span())

    # --- compilation unit ---

    def parse_unit(self, path: str = "<source>", is_stub: bool = False) -> CompilationUnit:
        start = self.peek()
        package: tuple[str, ...] = ()
        if self.at("package"):
            self.advance()
            package = self._qualified_name()
            self.expect(";")
        imports = []
        while self.at("import"):
            self.advance()
            imports.append(self._qualified_name())
            self.expect(";")
        types = []
        while self.peek().kind is not TokenKind.EOF:
            types.append(self.parse_type_decl(is_stub))
        if not types:
            raise ParseError("expected a type declaration", self.peek().span)
        return CompilationUnit(
            span=self._span(start), package=package, imports=tuple(imports),
            types=tuple(types), path=path, is_stub=is_stub,
        )

    def _qualified_name(self) -> tuple[str, ...]:
        parts = [self.expect_ident().text]
        while self.at("."):
            self.advance()
            parts.append(self.expect_ident().text)
        return tuple(parts)

    def _modifiers(self) -> frozenset[str]:
        mods = set()
        while self.peek().text in MODIFIERS and self.peek().kind is TokenKind.KEYWORD:
            mods.add(self.advance().text)
        return frozenset(mods)

    # --- type declarations ---

    def parse_type_decl(self, is_stub: bool) -> TypeDecl:
        start = self.peek()
        modifiers = self._modifiers()
        if self.at("enum"):
            return self._parse_enum(start, modifiers, is_stub)
        if self.at("class"):
            kind = "class"
        elif self.at("interface"):
            kind = "interface"
        else:
            raise ParseError(
                f"expected type declaration, found {self.peek().text!r}", self.peek().span)
        self.advance()
        name = self.expect_ident().text
        type_params = self._type_params()
        extends = None
        implements: list[NamedType] = []
        if self.accept("extends"):
            extends = self._named_type()
            if kind == "interface":
                # interfaces may extend several interfaces; model them all
                # through the implements list with the first as "extends"
                while self.accept(","):
                    implements.append(self._named_type())
        if self.accept("implements"):
            implements.append(self._named_type())
            while self.accept(","):
                implements.append(self._named_type())
        self.expect("{")
        fields: list[FieldDecl] = []
        methods: list[MethodDecl] = []
        ctors: list[CtorDecl] = []
        nested: list[TypeDecl] = []
        while not self.at("}"):
            self._parse_member(name, is_stub, fields, methods, ctors, nested)
        self.expect("}")
        return TypeDecl(
            span=self._span(start), kind=kind, name=name,
            type_params=type_params, extends=extends, implements=tuple(implements),
            fields=tuple(fields), methods=tuple(methods), ctors=tuple(ctors),
            nested=tuple(nested), modifiers=modifiers, is_stub=is_stub,
        )

    def _parse_enum(self, start: Token, modifiers: frozenset[str], is_stub: bool) -> TypeDecl:
        self.expect("enum")
        name = self.expect_ident().text
        self.expect("{")
        constants: list[FieldDecl] = []
        if self.peek().kind is TokenKind.IDENT:
            while True:
                tok = self.expect_ident()
                constants.append(FieldDecl(
                    span=tok.span, name=tok.text,
                    declared=NamedType(span=tok.span, name_parts=(name,)),
                    modifiers=frozenset({"public", "static"}), is_enum_constant=True))
                if not self.accept(","):
                    break
        self.accept(";")
        self.expect("}")
        return TypeDecl(
            span=self._span(start), kind="enum", name=name,
            fields=tuple(constants), modifiers=modifiers, is_stub=is_stub,
        )

    def _parse_member(self, class_name, is_stub, fields, methods, ctors, nested):
        start = self.peek()
        is_test = self.peek().kind is TokenKind.TEST_MARKER
        if is_test:
            self.advance()
        modifiers = self._modifiers()
        if self.peek().text in ("class", "interface", "enum") and \
                self.peek().kind is TokenKind.KEYWORD:
            nested.append(self.parse_type_decl(is_stub))
            return
        type_params: tuple[TypeParam, ...] = ()
        if self.at("<"):
            type_params = self._type_params()
        # constructor: the enclosing class name followed by '('
        if (self.peek().kind is TokenKind.IDENT and self.peek().text == class_name
                and self.peek(1).text == "(" and not type_params):
            self.advance()
            params = self._params()
            if self.at(";"):
                self.advance()
                body = None
            elif is_stub:
                raise ParseError("stub declarations cannot have bodies", self.peek().span)
            else:
                body = self.parse_block(in_ctor=True)
            ctors.append(CtorDecl(
                span=self._span(start), name=class_name, params=params,
                body=body, modifiers=modifiers))
            return
        declared = self.parse_type_syntax()
        name_tok = self.expect_ident()
        if self.at("("):
            params = self._params()
            body = self._method_tail(is_stub, abstract="abstract" in modifiers)
            methods.append(MethodDecl(
                span=self._span(start), name=name_tok.text, type_params=type_params,
                params=params, returns=declared, body=body, modifiers=modifiers,
                is_test=is_test))
            return
        if type_params or is_test:
            raise ParseError("fields cannot have type parameters or @Test", name_tok.span)
        init = None
        if self.accept("="):
            init = self.parse_expression()
        self.expect(";")
        fields.append(FieldDecl(
            span=self._span(start), name=name_tok.text, declared=declared,
            init=init, modifiers=modifiers))

    def _params(self) -> tuple[Param, ...]:
        self.expect("(")
        params: list[Param] = []
        if not self.at(")"):
            while True:
                ty = self.parse_type_syntax()
                tok = self.expect_ident()
                params.append(Param(span=ty.span.cover(tok.span), name=tok.text, declared=ty))
                if not self.accept(","):
                    break
        self.expect(")")
        return tuple(params)

    def _method_tail(self, is_stub: bool, abstract: bool = False) -> Block | None:
        if self.at(";"):
            self.advance()
            return None
        if is_stub:
            raise ParseError("stub declarations cannot have bodies", self.peek().span)
        if abstract:
            raise ParseError("abstract methods cannot have bodies", self.peek().span)
        return self.parse_block(in_ctor=False)

    def _type_params(self) -> tuple[TypeParam, ...]:
        if not self.at("<"):
            return ()
        self.advance()
        params: list[TypeParam] = []
        while True:
            tok = self.expect_ident()
            bound = None
            if self.accept("extends"):
                bound = self.parse_type_syntax()
            span = tok.span if bound is None else tok.span.cover(bound.span)
            params.append(TypeParam(span=span, name=tok.text, bound=bound))
            if not self.accept(","):
                break
        self.expect(">")
        return tuple(params)

    # --- type syntax ---

    def parse_type_syntax(self) -> TypeSyntax:
        start = self.peek()
        if start.text in PRIMITIVES and start.kind is TokenKind.KEYWORD:
            self.advance()
            ty: TypeSyntax = PrimitiveType(span=start.span, kind=start.text)
        else:
            ty = self._named_type()
        while self.at("[") and self.peek(1).text == "]":
            self.advance()
            self.advance()
            ty = ArrayTypeSyntax(span=self._span(start), element=ty)
        return ty

    def _named_type(self) -> NamedType:
        start = self.peek()
        parts = [self.expect_ident().text]
        while self.at(".") and self.peek(1).kind is TokenKind.IDENT:
            self.advance()
            parts.append(self.expect_ident().text)
        args = None
        if self.at("<"):
            self.advance()
            collected: list[TypeSyntax] = []
            while True:
                collected.append(self._type_arg())
                if not self.accept(","):
                    break
            self.expect(">")
            args = tuple(collected)
        return NamedType(span=self._span(start), name_parts=tuple(parts), args=args)

    def _type_arg(self) -> TypeSyntax:
        if self.at("?"):
            start = self.advance()
            bound_kind = None
            bound = None
            if self.at("extends") or self.at("super"):
                bound_kind = self.advance().text
                bound = self.parse_type_syntax()
            return WildcardType(span=self._span(start), bound_kind=bound_kind, bound=bound)
        return self.parse_type_syntax()

    # --- statements ---

    def parse_block(self, in_ctor: bool) -> Block:
        start = self.expect("{")
        stmts: list[Stmt] = []
        first = True
        while not self.at("}"):
            stmts.append(self.parse_statement(allow_ctor_call=in_ctor and first))
            first = False
        self.expect("}")
        return Block(span=self._span(start), stmts=tuple(stmts))

    def parse_statement(self, allow_ctor_call: bool = False) -> Stmt:
        start = self.peek()
        if self.at("{"):
            return self.parse_block(in_ctor=False)
        if self.at("if"):
            self.advance()
            self.expect("(")
            cond = self.parse_expression()
            self.expect(")")
            then = self.parse_statement()
            orelse = None
            if self.accept("else"):
                orelse = self.parse_statement()
            return If(span=self._span(start), cond=cond, then=then, orelse=orelse)
        if self.at("while"):
            self.advance()
            self.expect("(")
            cond = self.parse_expression()
            self.expect(")")
            body = self.parse_statement()
            return While(span=self._span(start), cond=cond, body=body)
        if self.at("for"):
            self.advance()
            self.expect("(")
            init = None
            if not self.at(";"):
                init = self._local_or_expr_stmt()
            else:
                self.advance()
            cond = None
            if not self.at(";"):
                cond = self.parse_expression()
            self.expect(";")
            update = None
            if not self.at(")"):
                update = self.parse_expression()
            self.expect(")")
            body = self.parse_statement()
            return For(span=self._span(start), init=init, cond=cond,
                       update=update, body=body)
        if self.at("return"):
            self.advance()
            value = None
            if not self.at(";"):
                value = self.parse_expression()
            self.expect(";")
            return Return(span=self._span(start), value=value)
        if self.at("throw"):
            self.advance()
            value = self.parse_expression()
            self.expect(";")
            return Throw(span=self._span(start), value=value)
        if (self.at("this") or self.at("super")) and self.peek(1).text == "(":
            if not allow_ctor_call:
                raise ParseError(
                    "explicit constructor invocation is only allowed as the first "
                    "statement of a constructor", start.span)
            target = self.advance().text
            args = self._args()
            self.expect(";")
            return ExplicitCtorCall(span=self._span(start), target=target, args=args)
        return self._local_or_expr_stmt()

    def _local_or_expr_stmt(self) -> Stmt:
        start = self.peek()
        saved = self.pos
        try:
            declared = self.parse_type_syntax()
            if self.peek().kind is TokenKind.IDENT and self.peek(1).text in ("=", ";"):
                name = self.advance().text
                init = None
                if self.accept("="):
                    init = self.parse_expression()
                self.expect(";")
                return LocalVarDecl(span=self._span(start), declared=declared,
                                    name=name, init=init)
        except ParseError:
            pass
        self.pos = saved
        expr = self.parse_expression()
        self.expect(";")
        return ExprStmt(span=self._span(start), expr=expr)

    # --- expressions ---

    def parse_expression(self) -> Expr:
        return self._assignment()

    def _assignment(self) -> Expr:
        left = self._binary(0)
        if self.at("="):
            if not isinstance(left, (Name, FieldAccess)):
                raise ParseError("invalid assignment target", left.span)
            self.advance()
            value = self._assignment()
            return Assign(span=left.span.cover(value.span), target=left, value=value)
        return left

    _LEVELS = (("||",), ("&&",), ("==", "!="), ("<", ">", "<=", ">="),
               ("+", "-"), ("*", "/", "%"))

    def _binary(self, level: int) -> Expr:
        if level >= len(self._LEVELS):
            return self._unary()
        ops = self._LEVELS[level]
        left = self._binary(level + 1)
        while self.peek().kind is TokenKind.PUNCT and self.peek().text in ops:
            op = self.advance().text
            right = self._binary(level + 1)
            left = Binary(span=left.span.cover(right.span), op=op, left=left, right=right)
        return left

    def _unary(self) -> Expr:
        tok = self.peek()
        if tok.kind is TokenKind.PUNCT and tok.text in ("!", "-"):
            self.advance()
            operand = self._unary()
            return Unary(span=tok.span.cover(operand.span), op=tok.text, operand=operand)
        return self._postfix()

    def _postfix(self) -> Expr:
        expr = self._primary()
        while self.at("."):
            self.advance()
            type_args = None
            if self.at("<"):
                self.advance()
                collected = [self._type_arg()]
                while self.accept(","):
                    collected.append(self._type_arg())
                self.expect(">")
                type_args = tuple(collected)
            name_tok = self.expect_ident()
            if self.at("("):
                args = self._args()
                expr = MethodCall(span=expr.span.cover(self._prev_span()),
                                  scope=expr, type_args=type_args,
                                  name=name_tok.text, args=args)
            else:
                if type_args is not None:
                    raise ParseError("type arguments require a method call", name_tok.span)
                expr = FieldAccess(span=expr.span.cover(name_tok.span),
                                   scope=expr, name=name_tok.text)
        return expr

    def _args(self) -> tuple[Expr, ...]:
        self.expect("(")
        args: list[Expr] = []
        if not self.at(")"):
            while True:
                args.append(self.parse_expression())
                if not self.accept(","):
                    break
        self.expect(")")
        return tuple(args)

    # Tokens that may start a cast operand; '-' is allowed after primitive
    # casts only, mirroring Java's grammar-level disambiguation.
    _CAST_FOLLOW = (TokenKind.IDENT, TokenKind.INT_LIT, TokenKind.DOUBLE_LIT,
                    TokenKind.STRING_LIT, TokenKind.CHAR_LIT)

    def _primary(self) -> Expr:
        tok = self.peek()
        if tok.kind is TokenKind.INT_LIT:
            self.advance()
            return IntLit(span=tok.span, value=int(tok.text))
        if tok.kind is TokenKind.DOUBLE_LIT:
            self.advance()
            return DoubleLit(span=tok.span, value=float(tok.text))
        if tok.kind is TokenKind.STRING_LIT:
            self.advance()
            return StringLit(span=tok.span, value=tok.text)
        if tok.kind is TokenKind.CHAR_LIT:
            self.advance()
            return CharLit(span=tok.span, value=tok.text)
        if self.at("true") or self.at("false"):
            self.advance()
            return BoolLit(span=tok.span, value=tok.text == "true")
        if self.at("null"):
            self.advance()
            return NullLit(span=tok.span)
        if self.at("this"):
            self.advance()
            return This(span=tok.span)
        if self.at("new"):
            self.advance()
            ty = self._named_type()
            args = self._args()
            return New(span=self._span(tok), type=ty, args=args)
        if self.at("("):
            cast = self._try_cast(tok)
            if cast is not None:
                return cast
            self.advance()
            inner = self.parse_expression()
            self.expect(")")
            return inner
        if tok.kind is TokenKind.IDENT:
            self.advance()
            if self.at("("):
                args = self._args()
                return MethodCall(span=self._span(tok), scope=None, type_args=None,
                                  name=tok.text, args=args)
            return Name(span=tok.span, ident=tok.text)
        raise ParseError(f"expected expression, found {tok.text or '<eof>'!r}", tok.span)

    def _try_cast(self, start: Token) -> Cast | None:
        saved = self.pos
        try:
            self.expect("(")
            target = self.parse_type_syntax()
            self.expect(")")
        except ParseError:
            self.pos = saved
            return None
        follow = self.peek()
        primitive = isinstance(target, PrimitiveType)
        ok = (
            follow.kind in self._CAST_FOLLOW
            or follow.text in ("(", "new", "this", "!", "true", "false", "null")
            or (primitive and follow.text == "-")
        )
        if not ok:
            self.pos = saved
            return None
        operand = self._unary()
        return Cast(span=self._span(start), target=target, expr=operand)


def parse_unit(tokens: list[Token], path: str = "<source>",
               is_stub: bool = False) -> CompilationUnit:
    """Parse a token sequence into a CompilationUnit."""
    parser = Parser(tokens)
    return parser.parse_unit(path=path, is_stub=is_stub)


def parse_source(text: str, path: str = "<source>",
                 is_stub: bool = False) -> CompilationUnit:
    return parse_unit(tokenize(text, path), path=path, is_stub=is_stub)
