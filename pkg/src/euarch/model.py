"""In-memory model of styles and architecture instances.

Values are treated as immutable after construction; operations that change a
model return a new value (copy-on-write at the architecture level).
"""

from __future__ import annotations

import copy
import hashlib
from dataclasses import dataclass, field, replace
from typing import Optional

from . import errors
from .constraints import Expr, format_expr

# ---------------------------------------------------------------------------
# Style vocabulary


@dataclass
class ParamSpec:
    name: str
    type: str = "string"  # string | number | boolean | format
    default: object = None
    required: bool = False


@dataclass
class PropertySpec:
    name: str
    type: str = "string"  # string | number | boolean | format | enum
    enum_values: tuple = ()
    default: object = None


@dataclass
class PortDecl:
    name: str
    port_type: str  # a declared port type name, or a bare format tag
    direction: str  # in | out | publish | subscribe
    optional: bool = False


@dataclass
class PortTypeDecl:
    name: str
    data_format: str
    channel: Optional[str] = None


@dataclass
class ComponentTypeDecl:
    name: str
    kind: str  # transformer | source | sink | widget | converter
    ports: list[PortDecl] = field(default_factory=list)
    properties: dict[str, PropertySpec] = field(default_factory=dict)
    param_specs: list[ParamSpec] = field(default_factory=list)
    override: bool = False

    def validate(self):
        seen = set()
        for p in self.ports:
            if p.name in seen:
                raise errors.DuplicateId(
                    f"duplicate port '{p.name}' in component type '{self.name}'")
            seen.add(p.name)
        if self.kind == "source" and any(p.direction == "in" for p in self.ports):
            raise errors.ConflictingDecl(f"source type '{self.name}' declares an in-port")
        if self.kind == "sink" and any(p.direction == "out" for p in self.ports):
            raise errors.ConflictingDecl(f"sink type '{self.name}' declares an out-port")


@dataclass
class ConnectorTypeDecl:
    name: str
    roles: list[str] = field(default_factory=list)
    override: bool = False


@dataclass
class Constraint:
    expr: Expr
    id: Optional[str] = None
    severity: str = "error"
    message_template: str = ""

    def rule_id(self) -> str:
        if self.id:
            return self.id
        digest = hashlib.sha1(format_expr(self.expr).encode()).hexdigest()[:8]
        return f"rule_{digest}"


@dataclass
class Style:
    name: str
    parents: list[str] = field(default_factory=list)
    component_types: dict[str, ComponentTypeDecl] = field(default_factory=dict)
    connector_types: dict[str, ConnectorTypeDecl] = field(default_factory=dict)
    port_types: dict[str, PortTypeDecl] = field(default_factory=dict)
    constraints: list[Constraint] = field(default_factory=list)
    default_properties: dict = field(default_factory=dict)
    formats: set[str] = field(default_factory=set)


@dataclass
class ResolvedStyle:
    """Style after inheritance flattening: no parents left to chase."""
    name: str
    component_types: dict[str, ComponentTypeDecl] = field(default_factory=dict)
    connector_types: dict[str, ConnectorTypeDecl] = field(default_factory=dict)
    port_types: dict[str, PortTypeDecl] = field(default_factory=dict)
    constraints: list[Constraint] = field(default_factory=list)
    default_properties: dict = field(default_factory=dict)
    formats: set[str] = field(default_factory=set)

    @property
    def family(self) -> str:
        """'pubsub' when the vocabulary is widget/channel shaped, else 'workflow'."""
        for decl in self.component_types.values():
            if decl.kind == "widget":
                return "pubsub"
            if any(p.direction in ("publish", "subscribe") for p in decl.ports):
                return "pubsub"
        return "workflow"

    def port_format(self, port: PortDecl) -> str:
        pt = self.port_types.get(port.port_type)
        if pt is not None:
            return pt.data_format
        return port.port_type

    def port_channel(self, port: PortDecl) -> Optional[str]:
        pt = self.port_types.get(port.port_type)
        if pt is not None:
            return pt.channel
        return None


def _decl_eq(a, b) -> bool:
    return replace(copy.deepcopy(a), override=False) == replace(copy.deepcopy(b), override=False)


def _merge_decls(target: dict, incoming: dict, what: str):
    for name, decl in incoming.items():
        if name in target:
            if _decl_eq(target[name], decl):
                continue
            if getattr(decl, "override", False):
                target[name] = decl
                continue
            raise errors.ConflictingDecl(
                f"{what} '{name}' redeclared with a different shape and no override marker")
        else:
            target[name] = decl


def resolve_style(style: Style, registry: dict[str, Style]) -> ResolvedStyle:
    """Flatten inheritance: union of ancestor vocabularies, child shadows only
    with an explicit override marker, constraints accumulate exactly once."""
    order = []          # ancestors first, depth-first post-order, deduplicated
    visiting = []

    def visit(s: Style):
        if s.name in visiting:
            chain = " -> ".join(visiting + [s.name])
            raise errors.CyclicInheritance(f"style inheritance cycle: {chain}")
        if any(o.name == s.name for o in order):
            return
        visiting.append(s.name)
        for parent in s.parents:
            if parent not in registry:
                raise errors.MissingParent(f"style '{s.name}' extends unknown style '{parent}'")
            visit(registry[parent])
        visiting.pop()
        order.append(s)

    visit(style)

    resolved = ResolvedStyle(name=style.name)
    seen_constraints = {}
    for s in order:
        _merge_decls(resolved.component_types, s.component_types, "component type")
        _merge_decls(resolved.connector_types, s.connector_types, "connector type")
        _merge_decls(resolved.port_types, s.port_types, "port type")
        resolved.formats |= s.formats
        resolved.default_properties.update(s.default_properties)
        for c in s.constraints:
            key = c.rule_id()
            prior = seen_constraints.get(key)
            if prior is None:
                seen_constraints[key] = c
                resolved.constraints.append(c)
            elif format_expr(prior.expr) != format_expr(c.expr):
                raise errors.ConflictingDecl(
                    f"constraint '{key}' declared twice with different expressions")
    for decl in resolved.component_types.values():
        decl.validate()
        for p in decl.ports:
            if p.port_type not in resolved.port_types and p.port_type not in resolved.formats:
                raise errors.UnknownFormat(
                    f"port '{decl.name}.{p.name}' uses unregistered format or "
                    f"port type '{p.port_type}'")
    for pt in resolved.port_types.values():
        if pt.data_format not in resolved.formats:
            raise errors.UnknownFormat(
                f"port type '{pt.name}' uses unregistered format '{pt.data_format}'")
    from .constraints import check_expr
    for c in resolved.constraints:
        check_expr(c.expr, resolved)
    return resolved


# ---------------------------------------------------------------------------
# Architecture instances


@dataclass
class ParamRef:
    """Reference to a composite formal parameter inside an inner binding."""
    name: str


@dataclass
class ComponentInstance:
    id: str
    type: str
    props: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)


@dataclass
class ConnectorInstance:
    id: str
    type: str


@dataclass
class Attachment:
    component: str
    port: str
    connector: str
    role: str

    def key(self):
        return (self.component, self.port, self.connector, self.role)


@dataclass
class Architecture:
    name: str
    style: str
    components: dict[str, ComponentInstance] = field(default_factory=dict)
    connectors: dict[str, ConnectorInstance] = field(default_factory=dict)
    attachments: list[Attachment] = field(default_factory=list)
    composites: dict[str, "CompositeDef"] = field(default_factory=dict)
    # pub-sub channel restrictions: channel -> allowed (publisher, subscriber) pairs
    restrictions: dict[str, list[tuple[str, str]]] = field(default_factory=dict)

    def component_port(self, cid: str, port: str, style: ResolvedStyle) -> Optional[PortDecl]:
        inst = self.components.get(cid)
        if inst is None:
            return None
        if inst.type in self.composites:
            comp = self.composites[inst.type]
            target = comp.port_map.get(port)
            if target is None:
                return None
            return comp.inner.component_port(target[0], target[1], style)
        decl = style.component_types.get(inst.type)
        if decl is None:
            return None
        for p in decl.ports:
            if p.name == port:
                return p
        return None


@dataclass
class CompositeDef:
    name: str
    formal_params: list[ParamSpec] = field(default_factory=list)
    inner: Architecture = None
    port_map: dict[str, tuple[str, str]] = field(default_factory=dict)


def validate_architecture(arch: Architecture, style: ResolvedStyle) -> list[str]:
    """Pure validation pass over the model invariants; never mutates."""
    problems = []
    for cid, inst in arch.components.items():
        if inst.type not in style.component_types and inst.type not in arch.composites:
            problems.append(f"component '{cid}' has unknown type '{inst.type}'")
    for kid, inst in arch.connectors.items():
        if inst.type not in style.connector_types:
            problems.append(f"connector '{kid}' has unknown type '{inst.type}'")
    for a in arch.attachments:
        if a.component not in arch.components:
            problems.append(f"attachment references unknown component '{a.component}'")
        elif arch.component_port(a.component, a.port, style) is None:
            problems.append(
                f"attachment references unknown port '{a.component}.{a.port}'")
        if a.connector not in arch.connectors:
            problems.append(f"attachment references unknown connector '{a.connector}'")
        else:
            ktype = style.connector_types.get(arch.connectors[a.connector].type)
            if ktype is not None and ktype.roles and a.role not in ktype.roles:
                problems.append(
                    f"attachment references unknown role '{a.connector}.{a.role}'")
    _check_composite_recursion(arch, problems)
    return problems


def _composite_refs(comp: CompositeDef) -> set[str]:
    return {i.type for i in comp.inner.components.values() if i.type in comp.inner.composites} | {
        i.type for i in comp.inner.components.values()}


def _check_composite_recursion(arch: Architecture, problems: list[str]):
    graph = {}
    for name, comp in arch.composites.items():
        graph[name] = {i.type for i in comp.inner.components.values()
                       if i.type in arch.composites or i.type in comp.inner.composites}
    from .constraints import find_cycle
    edges = [(u, v) for u, vs in graph.items() for v in vs]
    cyc = find_cycle(set(graph) | {v for _, v in edges}, edges)
    if cyc:
        problems.append(f"recursive composite reference: {' -> '.join(cyc)}")


# ---------------------------------------------------------------------------
# Composite reuse: encapsulate and expand


def encapsulate(arch: Architecture, params: list[ParamSpec],
                exposed: dict[str, tuple[str, str]], name: str = None) -> CompositeDef:
    """Package an architecture as a reusable parameterized component type."""
    param_names = {p.name for p in params}
    for exp_name, (cid, port) in exposed.items():
        if cid not in arch.components:
            raise errors.BadPortMap(f"exposed port '{exp_name}' maps to unknown component '{cid}'")
        if any(a.component == cid and a.port == port for a in arch.attachments):
            raise errors.BadPortMap(
                f"exposed port '{exp_name}' maps to '{cid}.{port}' which is already attached")
    for inst in arch.components.values():
        for pname, value in list(inst.props.items()) + list(inst.params.items()):
            if isinstance(value, ParamRef) and value.name not in param_names:
                raise errors.UnboundParam(
                    f"component '{inst.id}' references formal '{value.name}' "
                    f"not covered by the composite's parameters")
    return CompositeDef(
        name=name or f"{arch.name}Composite",
        formal_params=list(params),
        inner=copy.deepcopy(arch),
        port_map=dict(exposed),
    )


def _bind_value(value, actuals: dict, where: str):
    if isinstance(value, ParamRef):
        if value.name not in actuals:
            raise errors.UnboundActual(f"{where}: actual for '{value.name}' not bound")
        return actuals[value.name]
    return value


def expand(arch: Architecture) -> Architecture:
    """Flatten all composite instances; inner ids get '<instance id>.' prefixes."""
    problems = []
    _check_composite_recursion(arch, problems)
    if problems:
        raise errors.RecursiveComposite(problems[0])

    result = Architecture(name=arch.name, style=arch.style,
                          restrictions=copy.deepcopy(arch.restrictions))
    rewires = {}  # (composite instance id, exposed port) -> (flat component id, port)

    for cid in arch.components:
        inst = arch.components[cid]
        if inst.type not in arch.composites:
            result.components[cid] = copy.deepcopy(inst)
            continue
        comp = arch.composites[inst.type]
        actuals = {}
        for spec in comp.formal_params:
            if spec.name in inst.params:
                actuals[spec.name] = inst.params[spec.name]
            elif spec.default is not None or not spec.required:
                actuals[spec.name] = spec.default
            else:
                raise errors.UnboundActual(
                    f"composite instance '{cid}' leaves required param '{spec.name}' unbound")
        inner = copy.deepcopy(comp.inner)
        inner.composites = dict(arch.composites) | dict(inner.composites)
        flat_inner = expand(inner)
        for iid, i_inst in flat_inner.components.items():
            new = ComponentInstance(
                id=f"{cid}.{iid}", type=i_inst.type,
                props={k: _bind_value(v, actuals, f"{cid}.{iid}") for k, v in i_inst.props.items()},
                params={k: _bind_value(v, actuals, f"{cid}.{iid}")
                        for k, v in i_inst.params.items()},
            )
            result.components[new.id] = new
        for kid, k_inst in flat_inner.connectors.items():
            result.connectors[f"{cid}.{kid}"] = ConnectorInstance(id=f"{cid}.{kid}",
                                                                 type=k_inst.type)
        for a in flat_inner.attachments:
            result.attachments.append(Attachment(
                component=f"{cid}.{a.component}", port=a.port,
                connector=f"{cid}.{a.connector}", role=a.role))
        for exp_name, (tcid, tport) in comp.port_map.items():
            rewires[(cid, exp_name)] = (f"{cid}.{tcid}", tport)

    for kid, k_inst in arch.connectors.items():
        result.connectors[kid] = copy.deepcopy(k_inst)
    for a in arch.attachments:
        target = rewires.get((a.component, a.port))
        if target is not None:
            result.attachments.append(Attachment(
                component=target[0], port=target[1], connector=a.connector, role=a.role))
        else:
            result.attachments.append(copy.deepcopy(a))
    return result


# ---------------------------------------------------------------------------
# Instantiation from surface declarations lives in adl.elaborate to keep the
# parser/model dependency one-way; re-exported here for the public API.

def instantiate(style: ResolvedStyle, decl) -> Architecture:
    from .adl.elaborate import instantiate as _inst
    return _inst(style, decl)
