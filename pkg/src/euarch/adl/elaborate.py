"""Turn surface ASTs into core model values."""

from __future__ import annotations

from .. import errors
from ..model import (
    Architecture, Attachment, ComponentInstance, ComponentTypeDecl,
    CompositeDef, ConnectorInstance, ConnectorTypeDecl, Constraint, ParamRef,
    ParamSpec, PortDecl, PortTypeDecl, PropertySpec, ResolvedStyle, Style,
)
from . import ast


def style_from_decl(decl: ast.StyleDecl) -> Style:
    style = Style(name=decl.name, parents=list(decl.parents))
    for f in decl.formats:
        style.formats.add(f.name)
    for d in decl.defaults:
        style.default_properties[d.name] = d.value
    for pt in decl.port_types:
        if pt.name in style.port_types:
            raise errors.DuplicateId(f"duplicate port type '{pt.name}'")
        style.port_types[pt.name] = PortTypeDecl(name=pt.name, data_format=pt.data_format,
                                                 channel=pt.channel)
    for kt in decl.connector_types:
        if kt.name in style.connector_types:
            raise errors.DuplicateId(f"duplicate connector type '{kt.name}'")
        style.connector_types[kt.name] = ConnectorTypeDecl(
            name=kt.name, roles=list(kt.roles), override=kt.override)
    for ct in decl.component_types:
        if ct.name in style.component_types:
            raise errors.DuplicateId(f"duplicate component type '{ct.name}'")
        ports = [PortDecl(name=p.name, port_type=p.type_ref, direction=p.direction,
                          optional=p.optional)
                 for p in ct.ports]
        # inline `on "chan"` port declarations become anonymous port types
        for p, node in zip(ports, ct.ports):
            if node.channel is not None:
                anon = f"{ct.name}.{p.name}.type"
                style.port_types[anon] = PortTypeDecl(
                    name=anon, data_format=node.type_ref, channel=node.channel)
                p.port_type = anon
        props = {pr.name: PropertySpec(name=pr.name, type=pr.ptype,
                                       enum_values=pr.enum_values, default=pr.default)
                 for pr in ct.properties}
        params = [ParamSpec(name=pa.name, type=pa.ptype, default=pa.default,
                            required=pa.required)
                  for pa in ct.params]
        ctd = ComponentTypeDecl(name=ct.name, kind=ct.kind, ports=ports,
                                properties=props, param_specs=params, override=ct.override)
        ctd.validate()
        style.component_types[ct.name] = ctd
    for r in decl.rules:
        style.constraints.append(Constraint(expr=r.expr, id=r.name,
                                            severity=r.severity,
                                            message_template=r.message))
    return style


def _binding_value(value):
    if isinstance(value, ast.ParamRefNode):
        return ParamRef(name=value.name)
    return value


def _build_component(node: ast.ComponentNode) -> ComponentInstance:
    props, params = {}, {}
    for b in node.bindings:
        target = params if b.is_param else props
        if b.name in target:
            raise errors.DuplicateId(
                f"component '{node.id}' binds '{b.name}' twice")
        target[b.name] = _binding_value(b.value)
    return ComponentInstance(id=node.id, type=node.type, props=props, params=params)


def _build_composite(node: ast.CompositeNode, style: ResolvedStyle,
                     outer_names: set) -> CompositeDef:
    inner = Architecture(name=node.name, style=style.name)
    # names are in scope before bodies so composites may reference each other;
    # cycles are rejected later, at expansion
    local_names = set(outer_names) | {node.name} | {s.name for s in node.composites}
    for sub in node.composites:
        inner.composites[sub.name] = _build_composite(sub, style, local_names)
    _fill_architecture(inner, node, style, local_names)
    port_map = {}
    for e in node.exposes:
        if e.component not in inner.components:
            raise errors.BadPortMap(
                f"composite '{node.name}' exposes port of unknown component '{e.component}'")
        port_map[e.exposed] = (e.component, e.port)
    params = [ParamSpec(name=p.name, type=p.ptype, default=p.default) for p in node.params]
    return CompositeDef(name=node.name, formal_params=params, inner=inner, port_map=port_map)


def _fill_architecture(arch: Architecture, decl, style: ResolvedStyle, composites: dict):
    for c in decl.components:
        if c.id in arch.components:
            raise errors.DuplicateId(f"duplicate component id '{c.id}'")
        if c.type not in style.component_types and c.type not in composites:
            raise errors.UnknownType(f"unknown component type '{c.type}'")
        arch.components[c.id] = _build_component(c)
    for k in decl.connectors:
        if k.id in arch.connectors:
            raise errors.DuplicateId(f"duplicate connector id '{k.id}'")
        if k.type not in style.connector_types:
            raise errors.UnknownType(f"unknown connector type '{k.type}'")
        arch.connectors[k.id] = ConnectorInstance(id=k.id, type=k.type)
    for a in decl.attachments:
        if a.component not in arch.components:
            raise errors.BadAttachment(
                f"attachment references unknown component '{a.component}'")
        if a.connector not in arch.connectors:
            raise errors.BadAttachment(
                f"attachment references unknown connector '{a.connector}'")
        if arch.component_port(a.component, a.port, style) is None:
            raise errors.BadAttachment(
                f"attachment references unknown port '{a.component}.{a.port}'")
        ktype = style.connector_types[arch.connectors[a.connector].type]
        if ktype.roles and a.role not in ktype.roles:
            raise errors.BadAttachment(
                f"attachment references unknown role '{a.connector}.{a.role}'")
        att = Attachment(component=a.component, port=a.port,
                         connector=a.connector, role=a.role)
        if any(x.key() == att.key() for x in arch.attachments):
            raise errors.DuplicateId(f"duplicate attachment {att.key()}")
        arch.attachments.append(att)


def instantiate(style: ResolvedStyle, decl: ast.ArchDecl) -> Architecture:
    """Bind an architecture declaration against a resolved style.

    Unresolved type references raise rather than being silently dropped."""
    arch = Architecture(name=decl.name, style=decl.style)
    names = {c.name for c in decl.composites}
    for comp_node in decl.composites:
        arch.composites[comp_node.name] = _build_composite(comp_node, style, names)
    for r in decl.restricts:
        arch.restrictions.setdefault(r.channel, []).extend(r.pairs)
    _fill_architecture(arch, decl, style, names)
    return arch
