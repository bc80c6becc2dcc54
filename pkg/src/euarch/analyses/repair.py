"""QoS-driven repair of data-format mismatches with converter chains.

Latency composes additively along a chain; fidelity composes multiplicatively
as the product of ``(1 - loss)`` terms. Chains are found by exhaustive simple-
path enumeration, which is the point: fixture graphs stay small (<= 8 formats)
and optimality is checkable.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

from .. import errors
from ..conformance import check
from ..model import Architecture, Attachment, ComponentInstance, ConnectorInstance, ResolvedStyle


@dataclass
class ConverterEdge:
    converter: str        # converter component type name
    src: str              # format tag consumed
    dst: str              # format tag produced
    latency_seconds: float = 0.0
    fidelity_loss: float = 0.0

    def __post_init__(self):
        if self.latency_seconds < 0:
            raise ValueError("latency_seconds must be >= 0")
        if not 0.0 <= self.fidelity_loss <= 1.0:
            raise ValueError("fidelity_loss must be in [0, 1]")


@dataclass
class ConverterGraph:
    edges: list[ConverterEdge] = field(default_factory=list)

    def formats(self) -> set[str]:
        return {e.src for e in self.edges} | {e.dst for e in self.edges}

    def reachable_from(self, fmt: str) -> set[str]:
        seen, stack = {fmt}, [fmt]
        while stack:
            cur = stack.pop()
            for e in self.edges:
                if e.src == cur and e.dst not in seen:
                    seen.add(e.dst)
                    stack.append(e.dst)
        return seen


@dataclass
class QosPreference:
    objective: str = "min_latency"   # min_latency | max_fidelity | weighted
    alpha: float = 0.5               # weighted only: latency weight in [0, 1]

    def __post_init__(self):
        if self.objective not in ("min_latency", "max_fidelity", "weighted"):
            raise ValueError(f"unknown objective '{self.objective}'")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must be in [0, 1]")


@dataclass
class RepairAction:
    connector: str
    from_format: str
    to_format: str
    chain: list[ConverterEdge] = field(default_factory=list)

    def to_dict(self):
        return {
            "connector": self.connector,
            "from_format": self.from_format,
            "to_format": self.to_format,
            "converters": [e.converter for e in self.chain],
        }


@dataclass
class RepairPlan:
    actions: list[RepairAction] = field(default_factory=list)

    def to_dict(self):
        return {"actions": [a.to_dict() for a in self.actions]}


def enumerate_chains(graph: ConverterGraph, src: str, dst: str) -> list[list[ConverterEdge]]:
    """All simple chains (no format visited twice) from src to dst."""
    if src == dst:
        return [[]]
    chains = []

    def walk(cur, visited, path):
        for e in graph.edges:
            if e.src != cur or e.dst in visited:
                continue
            if e.dst == dst:
                chains.append(path + [e])
            else:
                walk(e.dst, visited | {e.dst}, path + [e])

    walk(src, {src}, [])
    return chains


def chain_latency(chain) -> float:
    return sum(e.latency_seconds for e in chain)


def chain_fidelity(chain) -> float:
    fidelity = 1.0
    for e in chain:
        fidelity *= (1.0 - e.fidelity_loss)
    return fidelity


def best_chain(graph: ConverterGraph, src: str, dst: str,
               qos: QosPreference) -> list[ConverterEdge]:
    candidates = enumerate_chains(graph, src, dst)
    if not candidates:
        reachable = sorted(graph.reachable_from(src) - {src})
        raise errors.NoRepairPath(
            f"no converter chain from '{src}' to '{dst}'; "
            f"formats reachable from '{src}': {', '.join(reachable) or '(none)'}")
    if qos.objective == "min_latency":
        def score(chain):
            return chain_latency(chain)
    elif qos.objective == "max_fidelity":
        def score(chain):
            return 1.0 - chain_fidelity(chain)
    else:
        max_latency = max(chain_latency(c) for c in candidates)

        def score(chain):
            norm = chain_latency(chain) / max_latency if max_latency > 0 else 0.0
            return qos.alpha * norm + (1.0 - qos.alpha) * (1.0 - chain_fidelity(chain))
    return min(candidates,
               key=lambda c: (score(c), len(c), tuple(e.converter for e in c)))


def find_mismatches(arch: Architecture, style: ResolvedStyle):
    """(connector id, out format, in format) per mismatched attachment pair."""
    by_connector = {}
    for a in arch.attachments:
        port = arch.component_port(a.component, a.port, style)
        if port is not None:
            by_connector.setdefault(a.connector, []).append((a, port))
    found = []
    for kid in sorted(by_connector):
        ends = by_connector[kid]
        for oa, op in [(a, p) for a, p in ends if p.direction == "out"]:
            for ia, ip in [(a, p) for a, p in ends if p.direction == "in"]:
                fo, fi = style.port_format(op), style.port_format(ip)
                if fo != fi:
                    found.append((kid, fo, fi))
    return found


def mismatch_repair(arch: Architecture, style: ResolvedStyle,
                    converters: ConverterGraph, qos: QosPreference) -> RepairPlan:
    """Optimal converter chain per mismatched attachment under the QoS
    objective; ties broken by shorter chain, then lexicographic names."""
    plan = RepairPlan()
    for kid, fo, fi in find_mismatches(arch, style):
        chain = best_chain(converters, fo, fi, qos)
        plan.actions.append(RepairAction(connector=kid, from_format=fo,
                                         to_format=fi, chain=chain))
    return plan


def apply_repair(arch: Architecture, style: ResolvedStyle, plan: RepairPlan) -> Architecture:
    """Insert converter components along each planned chain; returns a new
    model, leaving the input untouched."""
    fixed = copy.deepcopy(arch)
    for n, action in enumerate(plan.actions):
        if not action.chain:
            continue
        kid = action.connector
        ktype = fixed.connectors[kid].type
        roles = style.connector_types[ktype].roles
        src_role, snk_role = (roles[0], roles[1]) if len(roles) >= 2 else ("src", "snk")
        # detach the consuming end of the mismatched connector
        consumer = None
        for a in list(fixed.attachments):
            port = fixed.component_port(a.component, a.port, style)
            if a.connector == kid and port is not None and port.direction == "in":
                consumer = a
                fixed.attachments.remove(a)
                break
        assert consumer is not None, "mismatch plan references a connector with no consumer"
        upstream = kid
        for i, edge in enumerate(action.chain):
            decl = style.component_types.get(edge.converter)
            if decl is None:
                raise errors.UnknownType(
                    f"repair chain names unknown converter type '{edge.converter}'")
            in_port = next(p.name for p in decl.ports if p.direction == "in")
            out_port = next(p.name for p in decl.ports if p.direction == "out")
            conv_id = f"repair{n}_{i}_{edge.converter}"
            fixed.components[conv_id] = ComponentInstance(id=conv_id, type=edge.converter)
            fixed.attachments.append(Attachment(component=conv_id, port=in_port,
                                                connector=upstream, role=snk_role))
            new_conn = f"repair{n}_{i}_conn"
            fixed.connectors[new_conn] = ConnectorInstance(id=new_conn, type=ktype)
            fixed.attachments.append(Attachment(component=conv_id, port=out_port,
                                                connector=new_conn, role=src_role))
            upstream = new_conn
        fixed.attachments.append(Attachment(component=consumer.component, port=consumer.port,
                                            connector=upstream, role=consumer.role))
    return fixed
