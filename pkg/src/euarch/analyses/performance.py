"""Completion-time estimation over the workflow DAG.

Each step costs ``fixed + per_MB * inbound_size``. Data sizes propagate by a
per-component output-size factor (property ``size_factor``, default 1.0):
a step's output size is factor times the sum of its inbound sizes; sources
read their size from the supplied input map.

Unbounded workers give the critical-path length. A bounded worker count gives
the makespan of longest-processing-time list scheduling, a documented
heuristic rather than an optimum.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from graphlib import TopologicalSorter

from ..errors import MissingCostEntry
from ..conformance import dataflow_graph
from ..model import Architecture, ResolvedStyle


@dataclass
class CostEntry:
    fixed_seconds: float = 0.0
    per_megabyte_seconds: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.fixed_seconds) and self.fixed_seconds >= 0):
            raise ValueError("fixed_seconds must be finite and >= 0")
        if not (math.isfinite(self.per_megabyte_seconds) and self.per_megabyte_seconds >= 0):
            raise ValueError("per_megabyte_seconds must be finite and >= 0")


@dataclass
class CostModel:
    entries: dict[str, CostEntry] = field(default_factory=dict)  # component type -> entry

    def entry_for(self, type_name: str) -> CostEntry:
        entry = self.entries.get(type_name)
        if entry is None:
            raise MissingCostEntry(f"no cost entry for component type '{type_name}'")
        return entry


def _size_factor(arch, style, cid) -> float:
    inst = arch.components[cid]
    if "size_factor" in inst.props:
        return float(inst.props["size_factor"])
    decl = style.component_types.get(inst.type)
    if decl is not None:
        spec = decl.properties.get("size_factor")
        if spec is not None and spec.default is not None:
            return float(spec.default)
    return 1.0


def step_costs(arch: Architecture, style: ResolvedStyle,
               input_megabytes: dict[str, float], costs: CostModel) -> dict[str, float]:
    """Per-component processing seconds after propagating data sizes."""
    adj = dataflow_graph(arch, style)
    preds = {c: set() for c in adj}
    for u, vs in adj.items():
        for v in vs:
            preds[v].add(u)
    order = list(TopologicalSorter(preds).static_order())
    inbound, outbound, cost = {}, {}, {}
    for cid in order:
        if preds[cid]:
            inbound[cid] = sum(outbound[p] for p in preds[cid])
        else:
            inbound[cid] = float(input_megabytes.get(cid, 0.0))
        outbound[cid] = _size_factor(arch, style, cid) * inbound[cid]
        entry = costs.entry_for(arch.components[cid].type)
        cost[cid] = entry.fixed_seconds + entry.per_megabyte_seconds * inbound[cid]
    return cost


def critical_path_seconds(adj: dict[str, set[str]], cost: dict[str, float]) -> float:
    preds = {c: set() for c in adj}
    for u, vs in adj.items():
        for v in vs:
            preds[v].add(u)
    finish = {}
    for cid in TopologicalSorter(preds).static_order():
        start = max((finish[p] for p in preds[cid]), default=0.0)
        finish[cid] = start + cost[cid]
    return max(finish.values(), default=0.0)


def list_schedule_makespan(adj: dict[str, set[str]], cost: dict[str, float],
                           workers: int) -> float:
    """LPT list scheduling: whenever a worker frees up, start the ready task
    with the longest processing time (ties by smaller id)."""
    preds_left = {c: 0 for c in adj}
    for u, vs in adj.items():
        for v in vs:
            preds_left[v] += 1
    ready = [(-cost[c], c) for c in adj if preds_left[c] == 0]
    heapq.heapify(ready)
    running = []  # (finish_time, node)
    now = 0.0
    free = workers
    makespan = 0.0
    while ready or running:
        while ready and free > 0:
            _, node = heapq.heappop(ready)
            heapq.heappush(running, (now + cost[node], node))
            free -= 1
        if not running:
            break
        finish, node = heapq.heappop(running)
        now = finish
        makespan = max(makespan, finish)
        free += 1
        for v in adj[node]:
            preds_left[v] -= 1
            if preds_left[v] == 0:
                heapq.heappush(ready, (-cost[v], v))
        # release every co-finishing task before scheduling again
        while running and running[0][0] == now:
            _, node2 = heapq.heappop(running)
            free += 1
            for v in adj[node2]:
                preds_left[v] -= 1
                if preds_left[v] == 0:
                    heapq.heappush(ready, (-cost[v], v))
    return makespan


def performance_estimate(arch: Architecture, style: ResolvedStyle,
                         input_megabytes: dict[str, float], costs: CostModel,
                         workers: int | None = None) -> float:
    """Estimated seconds to complete the workflow on the given data set.

    ``workers=None`` means unbounded (critical path)."""
    adj = dataflow_graph(arch, style)
    cost = step_costs(arch, style, input_megabytes, costs)
    if workers is None:
        return critical_path_seconds(adj, cost)
    if workers < 1:
        raise ValueError("workers must be >= 1")
    return list_schedule_makespan(adj, cost, workers)
