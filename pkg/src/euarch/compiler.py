"""Compile a conforming workflow architecture into a portable execution plan.

The plan is a neutral DAG-of-steps document rather than an orchestration
script: step ids are the component ids, every connector becomes a shared
artifact slot, and the dependency edges are the transitive reduction of the
dataflow graph so independent branches stay independent.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from graphlib import CycleError, TopologicalSorter

from . import errors
from .conformance import dataflow_graph
from .model import Architecture, ParamRef, ResolvedStyle


@dataclass
class AdapterBinding:
    kind: str   # "builtin" | "command"
    ref: str    # builtin name, or command template with {param} {in:slot} {out:slot}

    def to_dict(self):
        return {"kind": self.kind, "ref": self.ref}


@dataclass
class Step:
    id: str
    component: str
    binding: AdapterBinding
    component_type: str = ""
    params: dict = field(default_factory=dict)
    input_slots: list[str] = field(default_factory=list)
    output_slots: list[str] = field(default_factory=list)

    def to_dict(self):
        return {
            "id": self.id,
            "component": self.component,
            "component_type": self.component_type,
            "binding": self.binding.to_dict(),
            "params": dict(sorted(self.params.items())),
            "input_slots": list(self.input_slots),
            "output_slots": list(self.output_slots),
        }


@dataclass
class ExecutionPlan:
    plan_id: str
    steps: dict[str, Step] = field(default_factory=dict)
    deps: set[tuple[str, str]] = field(default_factory=set)
    artifacts: dict[str, str] = field(default_factory=dict)   # slot -> format tag

    def to_dict(self):
        return {
            "plan_id": self.plan_id,
            "steps": {sid: self.steps[sid].to_dict() for sid in sorted(self.steps)},
            "deps": sorted(list(d) for d in self.deps),
            "artifacts": dict(sorted(self.artifacts.items())),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def fingerprint(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()

    @classmethod
    def from_dict(cls, data: dict) -> "ExecutionPlan":
        plan = cls(plan_id=data["plan_id"])
        for sid, s in data["steps"].items():
            plan.steps[sid] = Step(
                id=s["id"], component=s["component"],
                component_type=s.get("component_type", ""),
                binding=AdapterBinding(**s["binding"]),
                params=dict(s["params"]),
                input_slots=list(s["input_slots"]),
                output_slots=list(s["output_slots"]))
        plan.deps = {tuple(d) for d in data["deps"]}
        plan.artifacts = dict(data["artifacts"])
        return plan

    def predecessors(self) -> dict[str, set[str]]:
        preds = {s: set() for s in self.steps}
        for u, v in self.deps:
            preds[v].add(u)
        return preds

    def order_relation(self) -> set[tuple[str, str]]:
        """Transitive closure of the dependency edges."""
        adj = {s: set() for s in self.steps}
        for u, v in self.deps:
            adj[u].add(v)
        relation = set()
        for start in self.steps:
            stack, seen = [start], set()
            while stack:
                n = stack.pop()
                for m in adj[n]:
                    if m not in seen:
                        seen.add(m)
                        stack.append(m)
            relation |= {(start, t) for t in seen}
        return relation

    def producers(self) -> dict[str, str]:
        out = {}
        for sid, step in self.steps.items():
            for slot in step.output_slots:
                out[slot] = sid
        return out

    def external_input_slots(self) -> set[str]:
        produced = set(self.producers())
        needed = {slot for s in self.steps.values() for slot in s.input_slots}
        return needed - produced


def transitive_reduction(nodes, edges: set[tuple[str, str]]) -> set[tuple[str, str]]:
    adj = {n: set() for n in nodes}
    for u, v in edges:
        adj[u].add(v)
    closure = {}
    for n in nodes:
        stack, seen = [n], set()
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        closure[n] = seen
    reduced = set()
    for u, v in edges:
        if any(v in closure[w] for w in adj[u] if w != v):
            continue
        reduced.add((u, v))
    return reduced


def compile_architecture(arch: Architecture, style: ResolvedStyle,
                         bindings: dict[str, AdapterBinding]) -> ExecutionPlan:
    """Lower a conforming, composite-free workflow model to an execution plan."""
    if any(inst.type in arch.composites for inst in arch.components.values()):
        raise errors.UnboundActual("expand composites before compiling")
    adj = dataflow_graph(arch, style)
    try:
        preds = {c: set() for c in adj}
        for u, vs in adj.items():
            for v in vs:
                preds[v].add(u)
        list(TopologicalSorter(preds).static_order())
    except CycleError as exc:
        raise errors.NotADag(f"dataflow graph has a cycle: {exc}") from exc

    plan = ExecutionPlan(plan_id=f"plan-{arch.name}")
    for cid in sorted(arch.components):
        inst = arch.components[cid]
        binding = bindings.get(inst.type)
        if binding is None:
            raise errors.UnboundAdapter(
                f"component type '{inst.type}' has no adapter binding")
        decl = style.component_types[inst.type]
        attached = {}
        for a in arch.attachments:
            if a.component == cid:
                attached.setdefault(a.port, []).append(a.connector)
        input_slots, output_slots = [], []
        # fan-in argument order follows declared port order
        for p in decl.ports:
            conns = sorted(attached.get(p.name, []))
            if p.direction == "in":
                input_slots.extend(conns)
            elif p.direction == "out":
                if conns:
                    output_slots.extend(conns)
                    for k in conns:
                        plan.artifacts[k] = style.port_format(p)
                else:
                    slot = f"{cid}.{p.name}"
                    output_slots.append(slot)
                    plan.artifacts[slot] = style.port_format(p)
        params = {}
        for spec in decl.param_specs:
            if spec.name in inst.params:
                value = inst.params[spec.name]
                if isinstance(value, ParamRef):
                    raise errors.UnboundActual(
                        f"component '{cid}' param '{spec.name}' is an unbound formal")
                params[spec.name] = value
            elif spec.default is not None:
                params[spec.name] = spec.default
            elif spec.required:
                raise errors.UnboundActual(
                    f"component '{cid}' leaves required param '{spec.name}' unbound")
        plan.steps[cid] = Step(id=cid, component=cid, component_type=inst.type,
                               binding=binding, params=params,
                               input_slots=input_slots, output_slots=output_slots)

    edges = {(u, v) for u, vs in adj.items() for v in vs}
    plan.deps = transitive_reduction(set(arch.components), edges)
    # plan identity covers the whole structure, not just the name
    plan.plan_id = f"plan-{arch.name}-{hashlib.sha256(plan.to_json().encode()).hexdigest()[:12]}"
    return plan


def validate_plan(plan: ExecutionPlan) -> list[str]:
    """Re-verify the plan invariants; an empty list means executable."""
    diags = []
    preds = {s: set() for s in plan.steps}
    for u, v in plan.deps:
        if u not in plan.steps or v not in plan.steps:
            diags.append(f"dependency ({u}, {v}) references an unknown step")
            continue
        preds[v].add(u)
    try:
        list(TopologicalSorter(preds).static_order())
    except CycleError:
        diags.append("dependency edges form a cycle")
        return diags

    producers = {}
    for sid in sorted(plan.steps):
        for slot in plan.steps[sid].output_slots:
            if slot in producers:
                diags.append(f"slot '{slot}' is produced by both "
                             f"'{producers[slot]}' and '{sid}'")
            producers[slot] = sid

    order = plan.order_relation()
    for sid in sorted(plan.steps):
        for slot in plan.steps[sid].input_slots:
            producer = producers.get(slot)
            if producer is None:
                continue  # external input, bound at run time
            if producer != sid and (producer, sid) not in order:
                diags.append(f"step '{sid}' consumes slot '{slot}' but its producer "
                             f"'{producer}' is not a predecessor")
            if producer == sid:
                diags.append(f"step '{sid}' consumes its own output slot '{slot}'")

    for slot in plan.artifacts:
        if slot not in producers and slot not in plan.external_input_slots():
            diags.append(f"artifact slot '{slot}' is neither produced nor consumed")
    return diags
