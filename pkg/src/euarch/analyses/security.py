"""Authentication-property and taint-reachability checks."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..conformance import Violation, dataflow_edges
from ..model import Architecture, ResolvedStyle


@dataclass
class SecurityPolicy:
    required_auth: str = "token"
    trusted_components: set[str] = field(default_factory=set)   # component type names
    private_data_sources: set[str] = field(default_factory=set)  # component ids


def _comm_edges(arch: Architecture, style: ResolvedStyle) -> set[tuple[str, str]]:
    edges = set(dataflow_edges(arch, style))
    if style.family == "pubsub":
        from .pubsub import pubsub_topology
        topo = pubsub_topology(arch, style)
        edges |= {(a, b) for a, b, _ in topo.edges}
    return edges


def _auth_of(arch, style, cid):
    inst = arch.components[cid]
    if "auth" in inst.props:
        return inst.props["auth"]
    decl = style.component_types.get(inst.type)
    if decl is not None:
        spec = decl.properties.get("auth")
        if spec is not None and spec.default is not None:
            return spec.default
    return None


def security_analysis(arch: Architecture, style: ResolvedStyle,
                      policy: SecurityPolicy) -> list[Violation]:
    """Flag components with the wrong auth scheme, and untrusted components
    reachable from private data sources (taint reachability)."""
    out = []
    for cid in sorted(arch.components):
        auth = _auth_of(arch, style, cid)
        if auth is not None and auth != policy.required_auth:
            out.append(Violation(
                rule_id="AUTH_SCHEME", culprits=[cid],
                message=f"component '{cid}' uses '{auth}' authentication; "
                        f"policy requires '{policy.required_auth}'",
                severity="error"))

    edges = _comm_edges(arch, style)
    adj = {}
    for u, v in edges:
        adj.setdefault(u, set()).add(v)
    for src in sorted(policy.private_data_sources):
        if src not in arch.components:
            continue
        # BFS recording one witness path per reached component
        paths = {src: [src]}
        frontier = [src]
        while frontier:
            nxt = []
            for u in frontier:
                for v in sorted(adj.get(u, ())):
                    if v not in paths:
                        paths[v] = paths[u] + [v]
                        nxt.append(v)
            frontier = nxt
        for cid in sorted(paths):
            if cid == src:
                continue
            if arch.components[cid].type in policy.trusted_components:
                continue
            out.append(Violation(
                rule_id="PRIVATE_DATA_FLOW", culprits=[cid],
                message=f"private data from '{src}' reaches untrusted component "
                        f"'{cid}' via path " + " -> ".join(paths[cid]),
                severity="error"))
    out.sort(key=lambda v: (v.rule_id, v.culprits, v.message))
    return out
