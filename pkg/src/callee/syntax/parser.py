"""Lexer and LL(1) recursive-descent parser for ``.cle`` source files."""

from __future__ import annotations

import re
from dataclasses import dataclass

from callee.diagnostics import Diagnostic, DiagnosticError
from callee.syntax.ast import (
    Call, ClassDecl, ClassName, Effect, FieldAccess, FieldDecl, InterfaceDecl,
    Method, MethodEffect, New, Param, Program, Restrict, Selector, Signature,
    Span, TypeParam, TypeVar, Var, Wildcard, map_types,
)

KEYWORDS = {"class", "interface", "new", "restrict", "effect", "main"}

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<line_comment>//[^\n]*)
  | (?P<block_comment>/\*.*?\*/)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<sym>[(){}\[\]<>,;:.=*])
""", re.VERBOSE | re.DOTALL)


@dataclass(frozen=True)
class Token:
    kind: str   # "ident", "kw", "sym", "eof"
    text: str
    span: Span

    def describe(self):
        return "end of input" if self.kind == "eof" else f"'{self.text}'"


def _position(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            line, col = _position(text, pos)
            if text.startswith("/*", pos):
                msg = "unterminated block comment"
            else:
                msg = f"unexpected character {text[pos]!r}"
            raise DiagnosticError([Diagnostic("E001", msg, Span(pos, pos + 1, line, col))])
        kind = m.lastgroup
        if kind in ("ident", "sym"):
            word = m.group()
            line, col = _position(text, pos)
            if kind == "ident" and word in KEYWORDS:
                kind = "kw"
            tokens.append(Token(kind, word, Span(pos, m.end(), line, col)))
        pos = m.end()
    line, col = _position(text, len(text))
    tokens.append(Token("eof", "", Span(len(text), len(text), line, col)))
    return tokens


class Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    # -- token plumbing

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def at(self, text: str) -> bool:
        return self.tok.kind in ("sym", "kw") and self.tok.text == text

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.i += 1
        return t

    def error(self, expected: str):
        t = self.tok
        raise DiagnosticError([Diagnostic(
            "E001", f"expected {expected}, found {t.describe()}", t.span)])

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"'{text}'")
        return self.advance()

    def ident(self, what="identifier") -> Token:
        if self.tok.kind != "ident":
            self.error(what)
        return self.advance()

    def span_from(self, start: Token) -> Span:
        end = self.tokens[self.i - 1].span.end if self.i > 0 else start.span.end
        return Span(start.span.start, max(end, start.span.start), start.span.line, start.span.col)

    def comma_list(self, item, close: str):
        items = []
        if not self.at(close):
            items.append(item())
            while self.at(","):
                self.advance()
                items.append(item())
        return items

    # -- grammar

    def program(self) -> Program:
        decls = []
        while self.at("class") or self.at("interface"):
            decls.append(self.decl())
        main = None
        if self.at("main"):
            self.advance()
            self.expect("=")
            main = self.expr()
            self.expect(";")
        if self.tok.kind != "eof":
            self.error("'class', 'interface' or 'main'")
        return Program(tuple(decls), main)

    def decl(self):
        start = self.tok
        if self.at("interface"):
            self.advance()
            name = self.ident("interface name").text
            self.expect("{")
            sigs = []
            while not self.at("}"):
                sigs.append(_bind_type_params(self.sig()))
                self.expect(";")
            self.expect("}")
            return InterfaceDecl(name, tuple(sigs), self.span_from(start))
        self.expect("class")
        name = self.ident("class name").text
        self.expect("(")
        fields = self.comma_list(self.field_decl, ")")
        self.expect(")")
        interfaces = []
        if self.at(":"):
            self.advance()
            interfaces.append(self.class_name())
            while self.at(","):
                self.advance()
                interfaces.append(self.class_name())
        self.expect("{")
        methods = []
        while not self.at("}"):
            sig = self.sig()
            self.expect("=")
            body = self.expr()
            self.expect(";")
            sig, body = _bind_type_params(sig, body)
            methods.append(Method(sig, body))
        self.expect("}")
        return ClassDecl(name, tuple(fields), tuple(interfaces), tuple(methods),
                         self.span_from(start))

    def class_name(self) -> ClassName:
        t = self.ident("type name")
        return ClassName(t.text, t.span)

    def field_decl(self) -> FieldDecl:
        ty = self.class_name()
        t = self.ident("field name")
        return FieldDecl(ty, t.text, t.span)

    def param(self) -> Param:
        ty = self.class_name()
        t = self.ident("parameter name")
        return Param(ty, t.text, t.span)

    def type_param(self) -> TypeParam:
        t = self.ident("type parameter")
        self.expect(":")
        return TypeParam(TypeVar(t.text, t.span), self.class_name())

    def sig(self) -> Signature:
        start = self.tok
        ret = self.class_name()
        name = self.ident("method name")
        tparams = []
        if self.at("<"):
            self.advance()
            tparams.append(self.type_param())
            while self.at(","):
                self.advance()
                tparams.append(self.type_param())
            self.expect(">")
        self.expect("(")
        params = self.comma_list(self.param, ")")
        self.expect(")")
        self.expect("effect")
        effects = self.effect_list()
        return Signature(ret, name.text, tuple(tparams), tuple(params), effects,
                         Span(start.span.start, name.span.end, name.span.line, name.span.col))

    def effect_list(self) -> tuple[Effect, ...]:
        self.expect("[")
        effects = self.comma_list(self.effect, "]")
        self.expect("]")
        return tuple(effects)

    def effect(self) -> Effect:
        start = self.tok
        if self.at("*"):
            self.advance()
            return Wildcard(start.span)
        recv = self.class_name()
        self.expect(".")
        name = self.ident("method name")
        targs = self.type_args() if self.at("<") else ()
        sel = Selector(name.text, targs, self.span_from(name))
        return MethodEffect(recv, sel, self.span_from(start))

    def type_args(self):
        self.expect("<")
        args = [self.class_name()]
        while self.at(","):
            self.advance()
            args.append(self.class_name())
        self.expect(">")
        return tuple(args)

    def expr(self):
        start = self.tok
        e = self.prim()
        while self.at("."):
            self.advance()
            member = self.ident("field or method name")
            if self.at("<") or self.at("("):
                targs = self.type_args() if self.at("<") else ()
                sel = Selector(member.text, targs, self.span_from(member))
                self.expect("(")
                args = self.comma_list(self.expr, ")")
                self.expect(")")
                e = Call(e, sel, tuple(args), self.span_from(start))
            else:
                e = FieldAccess(e, member.text, self.span_from(start))
        return e

    def prim(self):
        start = self.tok
        if self.tok.kind == "ident":
            self.advance()
            return Var(start.text, start.span)
        if self.at("new"):
            self.advance()
            cls = self.class_name()
            self.expect("(")
            args = self.comma_list(self.expr, ")")
            self.expect(")")
            return New(cls, tuple(args), self.span_from(start))
        if self.at("restrict"):
            self.advance()
            bound = self.effect_list()
            body = self.expr()
            return Restrict(bound, body, self.span_from(start))
        if self.at("("):
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        self.error("expression")


def _bind_type_params(sig: Signature, body=None):
    """Turn names that refer to the method's own type parameters into TypeVars."""
    names = {tp.var.name for tp in sig.type_params}

    def resolve(t):
        if isinstance(t, ClassName) and t.name in names:
            return TypeVar(t.name, t.span)
        return t

    if names:
        sig = map_types(sig, resolve)
        if body is not None:
            body = map_types(body, resolve)
    return sig if body is None else (sig, body)


def parse_program(text: str) -> Program:
    """Parse a whole source file. Raises DiagnosticError (E001) on failure."""
    return Parser(text).program()


def parse_expr(text: str):
    """Parse a standalone expression (no enclosing method, so no type variables)."""
    p = Parser(text)
    e = p.expr()
    if p.tok.kind != "eof":
        p.error("end of input")
    return e
