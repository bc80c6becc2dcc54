"""Publish-subscribe topology extraction, loss analysis, and topology search.

An edge (publisher, subscriber, channel) exists when the two widgets share a
channel and the channel's restriction list, if any, names the pair. Listing
any pair on a channel excludes every unlisted pair on that channel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product

from .. import errors
from ..conformance import Violation
from ..model import Architecture, ResolvedStyle


@dataclass
class CommTopology:
    edges: set[tuple[str, str, str]] = field(default_factory=set)
    restricted_channels: dict[str, set[tuple[str, str]]] = field(default_factory=dict)

    def to_dict(self):
        return {
            "edges": sorted(list(e) for e in self.edges),
            "restricted_channels": {c: sorted(list(p) for p in pairs)
                                    for c, pairs in sorted(self.restricted_channels.items())},
        }


def _require_pubsub(style: ResolvedStyle):
    if style.family != "pubsub":
        raise errors.WrongStyleFamily(
            "this analysis applies to pub-sub styles; workflow models use "
            "dataflow_graph-based analyses")


def _channel_ports(arch: Architecture, style: ResolvedStyle):
    """(component id, port, channel, format) for every publish/subscribe port."""
    pubs, subs = [], []
    for cid in sorted(arch.components):
        inst = arch.components[cid]
        decl = style.component_types.get(inst.type)
        if decl is None:
            continue
        for p in decl.ports:
            if p.direction not in ("publish", "subscribe"):
                continue
            channel = style.port_channel(p)
            if channel is None:
                continue
            rec = (cid, p.name, channel, style.port_format(p))
            (pubs if p.direction == "publish" else subs).append(rec)
    return pubs, subs


def pubsub_topology(arch: Architecture, style: ResolvedStyle) -> CommTopology:
    _require_pubsub(style)
    pubs, subs = _channel_ports(arch, style)
    restrictions = {c: set(pairs) for c, pairs in arch.restrictions.items()}
    edges = set()
    for (a, _, ch_a, _), (b, _, ch_b, _) in product(pubs, subs):
        if ch_a != ch_b or a == b:
            continue
        allowed = restrictions.get(ch_a)
        if allowed is not None and (a, b) not in allowed:
            continue
        edges.add((a, b, ch_a))
    return CommTopology(edges=edges, restricted_channels=restrictions)


def lost_information(arch: Architecture, style: ResolvedStyle) -> list[Violation]:
    """Warn on publishers nobody hears and on channel payload format skew."""
    _require_pubsub(style)
    topo = pubsub_topology(arch, style)
    pubs, subs = _channel_ports(arch, style)
    out = []
    received = {(a, ch) for a, _, ch in topo.edges}
    for cid, port, channel, _ in pubs:
        if (cid, channel) not in received:
            out.append(Violation(
                rule_id="LOST_INFORMATION", culprits=[cid],
                message=f"events published by '{cid}' on channel '{channel}' "
                        f"are never received",
                severity="warning"))
    sub_formats = {}
    for cid, port, channel, fmt in subs:
        sub_formats.setdefault(channel, []).append((cid, fmt))
    for pub_cid, _, channel, pub_fmt in pubs:
        for sub_cid, sub_fmt in sub_formats.get(channel, []):
            if (pub_cid, sub_cid, channel) not in topo.edges:
                continue
            if pub_fmt != sub_fmt:
                out.append(Violation(
                    rule_id="CHANNEL_FORMAT_MISMATCH", culprits=[pub_cid, sub_cid],
                    message=f"channel '{channel}' carries '{pub_fmt}' from "
                            f"'{pub_cid}' but '{sub_cid}' expects '{sub_fmt}'",
                    severity="warning"))
    out.sort(key=lambda v: (v.rule_id, v.culprits, v.message))
    return out


@dataclass
class WidgetDecl:
    id: str
    publishes: set[str] = field(default_factory=set)    # channel names
    subscribes: set[str] = field(default_factory=set)


def derive_topology(widgets: list[WidgetDecl],
                    restrictions: dict[str, set[tuple[str, str]]]) -> set[tuple[str, str, str]]:
    edges = set()
    for a, b in product(widgets, widgets):
        if a.id == b.id:
            continue
        for channel in a.publishes & b.subscribes:
            allowed = restrictions.get(channel)
            if allowed is not None and (a.id, b.id) not in allowed:
                continue
            edges.add((a.id, b.id, channel))
    return edges


def generate_topologies(widgets: list[WidgetDecl],
                        must: set[tuple[str, str]],
                        must_not: set[tuple[str, str]],
                        limit: int = 10) -> list[dict[str, set[tuple[str, str]]]]:
    """Enumerate restriction maps whose derived topology contains every `must`
    pair on some shared channel and no `must_not` pair.

    Results are ordered by fewest restricted channels, then fewest listed
    pairs, then lexicographically. Empty list means infeasible."""
    if must & must_not:
        raise errors.InconsistentSpec("must and must_not overlap: "
                                      + str(sorted(must & must_not)))
    ids = {w.id for w in widgets}
    for a, b in sorted(must | must_not):
        if a not in ids or b not in ids:
            raise errors.InconsistentSpec(f"pair ({a}, {b}) references undeclared widgets")
    by_id = {w.id: w for w in widgets}
    for a, b in sorted(must):
        if not by_id[a].publishes & by_id[b].subscribes:
            raise errors.InconsistentSpec(
                f"required pair ({a}, {b}) shares no publish/subscribe channel")

    channels = sorted({c for w in widgets for c in w.publishes | w.subscribes})
    potential = {}
    for ch in channels:
        pairs = sorted((a.id, b.id) for a, b in product(widgets, widgets)
                       if a.id != b.id and ch in a.publishes and ch in b.subscribes)
        potential[ch] = pairs

    def channel_options(ch):
        # None = unrestricted; otherwise an allowed pair subset (possibly empty)
        options = [None]
        pairs = potential[ch]
        for r in range(len(pairs) + 1):
            options.extend(set(c) for c in combinations(pairs, r))
        return options

    results = []
    for combo in product(*(channel_options(ch) for ch in channels)):
        restrictions = {ch: allowed for ch, allowed in zip(channels, combo)
                        if allowed is not None}
        edges = derive_topology(widgets, restrictions)
        pairs_seen = {(a, b) for a, b, _ in edges}
        if not must <= pairs_seen:
            continue
        if pairs_seen & must_not:
            continue
        results.append(restrictions)

    def sort_key(r):
        listed = sum(len(p) for p in r.values())
        lex = tuple((ch, tuple(sorted(r[ch]))) for ch in sorted(r))
        return (len(r), listed, lex)

    results.sort(key=sort_key)
    return results[:limit]
