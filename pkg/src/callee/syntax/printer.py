"""Canonical pretty-printer; ``parse(show(x)) == x`` for every tree."""

from __future__ import annotations

from callee.syntax.ast import (
    Call, ClassDecl, FieldAccess, InterfaceDecl, New, Program, Restrict,
    Signature, Var, show_effects,
)


def show_expr(e) -> str:
    if isinstance(e, Var):
        return e.name
    if isinstance(e, New):
        return f"new {e.cls}({', '.join(map(show_expr, e.args))})"
    if isinstance(e, FieldAccess):
        return f"{_receiver(e.recv)}.{e.field}"
    if isinstance(e, Call):
        return f"{_receiver(e.recv)}.{e.selector}({', '.join(map(show_expr, e.args))})"
    if isinstance(e, Restrict):
        return f"restrict{show_effects(e.bound)} {show_expr(e.body)}"
    raise TypeError(f"not an expression: {e!r}")


def _receiver(e) -> str:
    # a restrict body extends as far right as possible, so it needs parens
    # when something is selected from it
    text = show_expr(e)
    return f"({text})" if isinstance(e, Restrict) else text


def show_sig(sig: Signature) -> str:
    tparams = ""
    if sig.type_params:
        tparams = "<" + ", ".join(f"{tp.var}: {tp.bound}" for tp in sig.type_params) + ">"
    params = ", ".join(f"{p.type} {p.name}" for p in sig.params)
    return f"{sig.ret} {sig.name}{tparams}({params}) effect{show_effects(sig.effects)}"


def show_decl(d) -> str:
    if isinstance(d, InterfaceDecl):
        lines = [f"interface {d.name} {{"]
        lines += [f"  {show_sig(s)};" for s in d.sigs]
    else:
        assert isinstance(d, ClassDecl)
        fields = ", ".join(f"{f.type} {f.name}" for f in d.fields)
        impl = f" : {', '.join(map(str, d.interfaces))}" if d.interfaces else ""
        lines = [f"class {d.name}({fields}){impl} {{"]
        lines += [f"  {show_sig(m.sig)} = {show_expr(m.body)};" for m in d.methods]
    lines.append("}")
    return "\n".join(lines)


def show(node) -> str:
    """Render a Program, declaration, signature or expression."""
    if isinstance(node, Program):
        parts = [show_decl(d) for d in node.decls]
        if node.main is not None:
            parts.append(f"main = {show_expr(node.main)};")
        return "\n\n".join(parts) + "\n" if parts else ""
    if isinstance(node, (ClassDecl, InterfaceDecl)):
        return show_decl(node)
    if isinstance(node, Signature):
        return show_sig(node)
    return show_expr(node)
