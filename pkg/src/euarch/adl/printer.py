"""Deterministic pretty-printer: same AST always yields byte-identical text."""

from __future__ import annotations

from ..constraints import format_expr
from . import ast

INDENT = "  "


def _lit(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        escaped = value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    return str(value)


def _ptype(ptype: str, enum_values: tuple = ()) -> str:
    if ptype == "enum":
        return "enum { " + ", ".join(enum_values) + " }"
    return ptype


def print_style(decl: ast.StyleDecl) -> str:
    lines = []
    head = f"style {decl.name}"
    if decl.parents:
        head += " extends " + ", ".join(decl.parents)
    lines.append(head + " {")
    for f in decl.formats:
        lines.append(f"{INDENT}format {f.name};")
    for d in decl.defaults:
        lines.append(f"{INDENT}default {d.name} = {_lit(d.value)};")
    for pt in decl.port_types:
        ov = "override " if pt.override else ""
        chan = f' on "{pt.channel}"' if pt.channel else ""
        lines.append(f"{INDENT}port type {ov}{pt.name} : {pt.data_format}{chan};")
    for kt in decl.connector_types:
        ov = "override " if kt.override else ""
        lines.append(f"{INDENT}connector type {ov}{kt.name} {{")
        for r in kt.roles:
            lines.append(f"{INDENT*2}role {r};")
        lines.append(f"{INDENT}}}")
    for ct in decl.component_types:
        ov = "override " if ct.override else ""
        lines.append(f"{INDENT}component type {ov}{ct.name} : {ct.kind} {{")
        for p in ct.ports:
            chan = f' on "{p.channel}"' if p.channel else ""
            opt = " optional" if p.optional else ""
            lines.append(f"{INDENT*2}port {p.direction} {p.name} : {p.type_ref}{chan}{opt};")
        for pr in ct.properties:
            dflt = f" = {_lit(pr.default)}" if pr.default is not None else ""
            lines.append(f"{INDENT*2}property {pr.name} : "
                         f"{_ptype(pr.ptype, pr.enum_values)}{dflt};")
        for pa in ct.params:
            dflt = f" = {_lit(pa.default)}" if pa.default is not None else ""
            req = " required" if pa.required else ""
            lines.append(f"{INDENT*2}param {pa.name} : {_ptype(pa.ptype)}{dflt}{req};")
        lines.append(f"{INDENT}}}")
    for r in decl.rules:
        if r.name is None:
            lines.append(f"{INDENT}rule {format_expr(r.expr)};")
        else:
            sev = f" {r.severity}" if r.severity != "error" or r.message else ""
            msg = f' "{r.message}"' if r.message else ""
            lines.append(f"{INDENT}rule {r.name}{sev}{msg} : {format_expr(r.expr)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _print_component(node: ast.ComponentNode, depth: int) -> list[str]:
    pad = INDENT * depth
    if not node.bindings:
        return [f"{pad}component {node.id} : {node.type};"]
    lines = [f"{pad}component {node.id} : {node.type} {{"]
    for b in node.bindings:
        value = (f"param {b.value.name}" if isinstance(b.value, ast.ParamRefNode)
                 else _lit(b.value))
        prefix = "param " if b.is_param else ""
        lines.append(f"{pad}{INDENT}{prefix}{b.name} = {value};")
    lines.append(f"{pad}}}")
    return lines


def _print_arch_body(decl, depth: int) -> list[str]:
    pad = INDENT * depth
    lines = []
    for c in decl.components:
        lines.extend(_print_component(c, depth))
    for k in decl.connectors:
        lines.append(f"{pad}connector {k.id} : {k.type};")
    for comp in decl.composites:
        lines.extend(_print_composite(comp, depth))
    restricts = decl.restricts if hasattr(decl, "restricts") else []
    for r in restricts:
        pairs = ", ".join(f"({a}, {b})" for a, b in r.pairs)
        lines.append(f'{pad}restrict channel "{r.channel}" to {pairs};')
    for a in sorted(decl.attachments, key=lambda a: a.sort_key()):
        lines.append(f"{pad}attach {a.component}.{a.port} to {a.connector}.{a.role};")
    return lines


def _print_composite(node: ast.CompositeNode, depth: int) -> list[str]:
    pad = INDENT * depth
    params = ""
    if node.params:
        parts = []
        for p in node.params:
            part = f"{p.name} : {_ptype(p.ptype)}"
            if p.default is not None:
                part += f" = {_lit(p.default)}"
            parts.append(part)
        params = "(" + ", ".join(parts) + ")"
    lines = [f"{pad}composite {node.name}{params} {{"]

    class _Body:
        components = node.components
        connectors = node.connectors
        composites = node.composites
        attachments = node.attachments
        restricts = []

    lines.extend(_print_arch_body(_Body, depth + 1))
    for e in node.exposes:
        lines.append(f"{pad}{INDENT}expose {e.exposed} as {e.component}.{e.port};")
    lines.append(f"{pad}}}")
    return lines


def print_architecture(decl: ast.ArchDecl) -> str:
    lines = [f"architecture {decl.name} : {decl.style} {{"]
    lines.extend(_print_arch_body(decl, 1))
    lines.append("}")
    return "\n".join(lines) + "\n"


def print_decl(decl) -> str:
    if isinstance(decl, ast.StyleDecl):
        return print_style(decl)
    if isinstance(decl, ast.ArchDecl):
        return print_architecture(decl)
    raise TypeError(f"cannot print {type(decl).__name__}")
