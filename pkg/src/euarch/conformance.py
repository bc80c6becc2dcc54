"""Structural rule checking and style-constraint evaluation.

`check` is pure and deterministic: structural rules first, then style
constraints, each block sorted by culprit id.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import errors
from .constraints import evaluate, find_cycle
from .model import Architecture, ResolvedStyle


@dataclass
class Violation:
    rule_id: str
    culprits: list[str]
    message: str
    severity: str = "error"

    def to_dict(self):
        return {"rule_id": self.rule_id, "culprits": list(self.culprits),
                "message": self.message, "severity": self.severity}


def dataflow_edges(arch: Architecture, style: ResolvedStyle) -> set[tuple[str, str]]:
    """Raw directed edges u->v: a connector joins an out-port of u to an
    in-port of v. Works on any style family; used internally."""
    by_connector = {}
    for a in arch.attachments:
        port = arch.component_port(a.component, a.port, style)
        if port is None:
            continue
        by_connector.setdefault(a.connector, []).append((a.component, port))
    edges = set()
    for ends in by_connector.values():
        outs = [c for c, p in ends if p.direction == "out"]
        ins = [c for c, p in ends if p.direction == "in"]
        for u in outs:
            for v in ins:
                if u != v:
                    edges.add((u, v))
    return edges


def dataflow_graph(arch: Architecture, style: ResolvedStyle) -> dict[str, set[str]]:
    """Adjacency view over component ids. Rejects pub-sub models, whose
    topology is derived from channel matching instead (see analyses.pubsub)."""
    if style.family == "pubsub":
        raise errors.WrongStyleFamily(
            "dataflow_graph applies to workflow-family styles; "
            "use pubsub_topology for pub-sub models")
    adj = {c: set() for c in arch.components}
    for u, v in dataflow_edges(arch, style):
        adj[u].add(v)
    return adj


def _structural_violations(arch: Architecture, style: ResolvedStyle) -> list[Violation]:
    out = []

    # CYCLE
    cycle = find_cycle(arch.components, dataflow_edges(arch, style))
    if cycle is not None:
        out.append(Violation(
            rule_id="CYCLE", culprits=sorted(cycle),
            message="dataflow graph contains a directed cycle through: "
                    + ", ".join(sorted(cycle)),
            severity="error"))

    # DANGLING_CONNECTOR: a connector with a declared role nobody attached,
    # or with fewer than two attached ends.
    attached_roles = {}
    for a in arch.attachments:
        attached_roles.setdefault(a.connector, set()).add(a.role)
    dangling = []
    for kid in sorted(arch.connectors):
        ktype = style.connector_types.get(arch.connectors[kid].type)
        roles = set(ktype.roles) if ktype and ktype.roles else set()
        got = attached_roles.get(kid, set())
        if (roles and not roles <= got) or len(got) < 2:
            dangling.append(kid)
    for kid in dangling:
        out.append(Violation(
            rule_id="DANGLING_CONNECTOR", culprits=[kid],
            message=f"connector '{kid}' has an unattached role", severity="error"))

    # UNATTACHED_PORT: required in-ports must be attached; unconsumed out-ports
    # warn unless the port is optional or the component is sink-like.
    attached_ports = {(a.component, a.port) for a in arch.attachments}
    for cid in sorted(arch.components):
        inst = arch.components[cid]
        decl = style.component_types.get(inst.type)
        if decl is None:
            continue
        for p in decl.ports:
            if (cid, p.name) in attached_ports or p.optional:
                continue
            if p.direction == "in":
                out.append(Violation(
                    rule_id="UNATTACHED_PORT", culprits=[cid],
                    message=f"required in-port '{cid}.{p.name}' is not attached",
                    severity="error"))
            elif p.direction == "out" and decl.kind not in ("sink",):
                out.append(Violation(
                    rule_id="UNATTACHED_PORT", culprits=[cid],
                    message=f"out-port '{cid}.{p.name}' is never consumed",
                    severity="warning"))

    # FORMAT_MISMATCH: attached out-port format differs from in-port format.
    by_connector = {}
    for a in arch.attachments:
        port = arch.component_port(a.component, a.port, style)
        if port is not None:
            by_connector.setdefault(a.connector, []).append((a.component, port))
    for kid in sorted(by_connector):
        ends = by_connector[kid]
        outs = [(c, p) for c, p in ends if p.direction == "out"]
        ins = [(c, p) for c, p in ends if p.direction == "in"]
        for oc, op in outs:
            for ic, ip in ins:
                fo, fi = style.port_format(op), style.port_format(ip)
                if fo != fi:
                    out.append(Violation(
                        rule_id="FORMAT_MISMATCH", culprits=sorted([oc, ic]),
                        message=f"connector '{kid}' carries format '{fo}' from "
                                f"'{oc}.{op.name}' into '{ic}.{ip.name}' "
                                f"expecting '{fi}'",
                        severity="error"))
    return out


def check(arch: Architecture, style: ResolvedStyle) -> list[Violation]:
    """All structural violations plus one violation per failed style constraint."""
    structural = _structural_violations(arch, style)
    structural.sort(key=lambda v: (v.rule_id, v.culprits))

    constraint_violations = []
    for c in style.constraints:
        result = evaluate(arch, style, c.expr)
        if result.holds:
            continue
        culprits = sorted(set(result.witnesses))
        message = c.message_template or f"style constraint '{c.rule_id()}' failed"
        if culprits:
            message += " (culprits: " + ", ".join(culprits) + ")"
        constraint_violations.append(Violation(
            rule_id=c.rule_id(), culprits=culprits, message=message,
            severity=c.severity))
    constraint_violations.sort(key=lambda v: (v.rule_id, v.culprits))
    return structural + constraint_violations


def has_errors(violations: list[Violation]) -> bool:
    return any(v.severity == "error" for v in violations)
