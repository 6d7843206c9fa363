"""Abstract syntax of the core language.

All nodes are frozen dataclasses. Source spans are carried on every node but
excluded from equality, so two parses of differently formatted text compare
equal when they denote the same tree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union


@dataclass(frozen=True)
class Span:
    start: int
    end: int
    line: int
    col: int

    def __str__(self):
        return f"{self.line}:{self.col}"


NO_SPAN = Span(0, 0, 1, 1)


def _span():
    return field(default=NO_SPAN, compare=False, repr=False)


# -- types, selectors, effects ------------------------------------------------

@dataclass(frozen=True)
class ClassName:
    """A class or interface name."""
    name: str
    span: Span = _span()

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class TypeVar:
    """A generic method type parameter."""
    name: str
    span: Span = _span()

    def __str__(self):
        return self.name


Type = Union[ClassName, TypeVar]


@dataclass(frozen=True)
class Selector:
    """Method name applied to explicit type arguments, ``mm<T1,...,Tn>``."""
    name: str
    type_args: tuple[Type, ...] = ()
    span: Span = _span()

    def __str__(self):
        if not self.type_args:
            return self.name
        return f"{self.name}<{','.join(map(str, self.type_args))}>"


@dataclass(frozen=True)
class Wildcard:
    span: Span = _span()

    def __str__(self):
        return "*"


@dataclass(frozen=True)
class MethodEffect:
    receiver: Type
    selector: Selector
    span: Span = _span()

    def __str__(self):
        return f"{self.receiver}.{self.selector}"


Effect = Union[Wildcard, MethodEffect]
WILDCARD = Wildcard()


def show_effects(effects) -> str:
    return "[" + ", ".join(map(str, effects)) + "]"


# -- expressions ----------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str
    span: Span = _span()


@dataclass(frozen=True)
class New:
    cls: ClassName
    args: tuple[Expr, ...] = ()
    span: Span = _span()


@dataclass(frozen=True)
class FieldAccess:
    recv: Expr
    field: str
    span: Span = _span()


@dataclass(frozen=True)
class Call:
    recv: Expr
    selector: Selector
    args: tuple[Expr, ...] = ()
    span: Span = _span()
    # minimal static type of the receiver, filled in by the checker so the
    # interpreter can report which declaration the call was typed against
    recv_type: Optional[Type] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Restrict:
    bound: tuple[Effect, ...]
    body: Expr
    span: Span = _span()


Expr = Union[Var, New, FieldAccess, Call, Restrict]


# -- declarations ---------------------------------------------------------------

@dataclass(frozen=True)
class TypeParam:
    var: TypeVar
    bound: Type


@dataclass(frozen=True)
class Param:
    type: Type
    name: str
    span: Span = _span()


@dataclass(frozen=True)
class Signature:
    ret: Type
    name: str
    type_params: tuple[TypeParam, ...] = ()
    params: tuple[Param, ...] = ()
    effects: tuple[Effect, ...] = ()
    span: Span = _span()

    @property
    def type_vars(self) -> tuple[TypeVar, ...]:
        return tuple(tp.var for tp in self.type_params)


@dataclass(frozen=True)
class Method:
    sig: Signature
    body: Expr


@dataclass(frozen=True)
class FieldDecl:
    type: Type
    name: str
    span: Span = _span()


@dataclass(frozen=True)
class ClassDecl:
    name: str
    fields: tuple[FieldDecl, ...] = ()
    interfaces: tuple[ClassName, ...] = ()
    methods: tuple[Method, ...] = ()
    span: Span = _span()


@dataclass(frozen=True)
class InterfaceDecl:
    name: str
    sigs: tuple[Signature, ...] = ()
    span: Span = _span()


Decl = Union[ClassDecl, InterfaceDecl]


@dataclass(frozen=True)
class Program:
    decls: tuple[Decl, ...] = ()
    main: Optional[Expr] = None


# -- generic traversal ------------------------------------------------------------

def map_types(node, fn: Callable[[Type], Type]):
    """Rebuild ``node`` with ``fn`` applied to every type occurrence.

    Binding positions (the left of ``X: C`` in a type-parameter list) are left
    alone; bounds are mapped. Callers that need capture avoidance handle
    binders themselves (see :func:`callee.classtable.substitute`).
    """
    if isinstance(node, (ClassName, TypeVar)):
        return fn(node)
    if isinstance(node, Selector):
        return Selector(node.name, tuple(fn(t) for t in node.type_args), node.span)
    if isinstance(node, Wildcard):
        return node
    if isinstance(node, MethodEffect):
        return MethodEffect(fn(node.receiver), map_types(node.selector, fn), node.span)
    if isinstance(node, Var):
        return node
    if isinstance(node, New):
        cls = fn(node.cls)
        return New(cls, tuple(map_types(a, fn) for a in node.args), node.span)
    if isinstance(node, FieldAccess):
        return FieldAccess(map_types(node.recv, fn), node.field, node.span)
    if isinstance(node, Call):
        return Call(
            map_types(node.recv, fn),
            map_types(node.selector, fn),
            tuple(map_types(a, fn) for a in node.args),
            node.span,
            None if node.recv_type is None else fn(node.recv_type),
        )
    if isinstance(node, Restrict):
        return Restrict(tuple(map_types(e, fn) for e in node.bound),
                        map_types(node.body, fn), node.span)
    if isinstance(node, Signature):
        return Signature(
            fn(node.ret),
            node.name,
            tuple(TypeParam(tp.var, fn(tp.bound)) for tp in node.type_params),
            tuple(Param(fn(p.type), p.name, p.span) for p in node.params),
            tuple(map_types(e, fn) for e in node.effects),
            node.span,
        )
    if isinstance(node, Method):
        return Method(map_types(node.sig, fn), map_types(node.body, fn))
    if isinstance(node, ClassDecl):
        return ClassDecl(
            node.name,
            tuple(FieldDecl(fn(f.type), f.name, f.span) for f in node.fields),
            tuple(fn(i) for i in node.interfaces),
            tuple(map_types(m, fn) for m in node.methods),
            node.span,
        )
    if isinstance(node, InterfaceDecl):
        return InterfaceDecl(node.name, tuple(map_types(s, fn) for s in node.sigs), node.span)
    raise TypeError(f"cannot map types over {type(node).__name__}")


def subexprs(e: Expr) -> tuple[Expr, ...]:
    if isinstance(e, New):
        return e.args
    if isinstance(e, FieldAccess):
        return (e.recv,)
    if isinstance(e, Call):
        return (e.recv, *e.args)
    if isinstance(e, Restrict):
        return (e.body,)
    return ()


def walk(e: Expr):
    """Pre-order iteration over an expression tree."""
    yield e
    for sub in subexprs(e):
        yield from walk(sub)
