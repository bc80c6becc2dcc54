"""Surface-syntax AST nodes. Every node carries a source span; spans are
excluded from structural equality so print/parse round trips compare clean."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..constraints import Expr, Span


@dataclass
class Diagnostic:
    span: Span
    message: str
    severity: str = "error"
    expected: tuple = ()

    def __str__(self):
        return f"{self.span}: {self.severity}: {self.message}"


class ParseFailure(Exception):
    """Raised when a source text cannot be turned into a complete AST.

    Carries a non-empty diagnostics list; no partial AST escapes."""

    def __init__(self, diagnostics: list[Diagnostic]):
        assert diagnostics
        self.diagnostics = diagnostics
        super().__init__("; ".join(str(d) for d in diagnostics))


@dataclass
class Node:
    span: Optional[Span] = field(default=None, compare=False, kw_only=True)


# -- style items --------------------------------------------------------------

@dataclass
class FormatDecl(Node):
    name: str = ""


@dataclass
class PortNode(Node):
    direction: str = "in"
    name: str = ""
    type_ref: str = ""       # port type name or bare format tag
    channel: Optional[str] = None
    optional: bool = False


@dataclass
class PropertyNode(Node):
    name: str = ""
    ptype: str = "string"
    enum_values: tuple = ()
    default: object = None


@dataclass
class ParamNode(Node):
    name: str = ""
    ptype: str = "string"
    default: object = None
    required: bool = False


@dataclass
class ComponentTypeNode(Node):
    name: str = ""
    kind: str = "transformer"
    override: bool = False
    ports: list[PortNode] = field(default_factory=list)
    properties: list[PropertyNode] = field(default_factory=list)
    params: list[ParamNode] = field(default_factory=list)


@dataclass
class ConnectorTypeNode(Node):
    name: str = ""
    override: bool = False
    roles: list[str] = field(default_factory=list)


@dataclass
class PortTypeNode(Node):
    name: str = ""
    data_format: str = ""
    channel: Optional[str] = None
    override: bool = False


@dataclass
class RuleNode(Node):
    expr: Expr = None
    name: Optional[str] = None
    severity: str = "error"
    message: str = ""


@dataclass
class DefaultPropNode(Node):
    name: str = ""
    value: object = None


@dataclass
class StyleDecl(Node):
    name: str = ""
    parents: list[str] = field(default_factory=list)
    formats: list[FormatDecl] = field(default_factory=list)
    component_types: list[ComponentTypeNode] = field(default_factory=list)
    connector_types: list[ConnectorTypeNode] = field(default_factory=list)
    port_types: list[PortTypeNode] = field(default_factory=list)
    rules: list[RuleNode] = field(default_factory=list)
    defaults: list[DefaultPropNode] = field(default_factory=list)


# -- architecture items -------------------------------------------------------

@dataclass
class ParamRefNode(Node):
    name: str = ""


@dataclass
class BindingNode(Node):
    name: str = ""
    value: object = None     # literal or ParamRefNode
    is_param: bool = False


@dataclass
class ComponentNode(Node):
    id: str = ""
    type: str = ""
    bindings: list[BindingNode] = field(default_factory=list)


@dataclass
class ConnectorNode(Node):
    id: str = ""
    type: str = ""


@dataclass
class AttachNode(Node):
    component: str = ""
    port: str = ""
    connector: str = ""
    role: str = ""

    def sort_key(self):
        return (self.component, self.port, self.connector, self.role)


@dataclass
class ExposeNode(Node):
    exposed: str = ""
    component: str = ""
    port: str = ""


@dataclass
class CompositeNode(Node):
    name: str = ""
    params: list[ParamNode] = field(default_factory=list)
    components: list[ComponentNode] = field(default_factory=list)
    connectors: list[ConnectorNode] = field(default_factory=list)
    attachments: list[AttachNode] = field(default_factory=list)
    composites: list["CompositeNode"] = field(default_factory=list)
    exposes: list[ExposeNode] = field(default_factory=list)


@dataclass
class RestrictNode(Node):
    channel: str = ""
    pairs: list[tuple[str, str]] = field(default_factory=list)


@dataclass
class ArchDecl(Node):
    name: str = ""
    style: str = ""
    components: list[ComponentNode] = field(default_factory=list)
    connectors: list[ConnectorNode] = field(default_factory=list)
    composites: list[CompositeNode] = field(default_factory=list)
    restricts: list[RestrictNode] = field(default_factory=list)
    attachments: list[AttachNode] = field(default_factory=list)
