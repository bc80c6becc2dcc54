"""Lowering workflow architectures to execution plans."""

import json
import random

import pytest

from euarch import errors, fixtures
from euarch.compiler import (
    AdapterBinding, ExecutionPlan, compile_architecture, transitive_reduction,
    validate_plan,
)
from euarch.conformance import dataflow_graph


@pytest.fixture
def email_plan(dna_style, email_arch):
    return compile_architecture(email_arch, dna_style, fixtures.DNA_BINDINGS)


def test_step_ids_are_component_ids(email_plan, email_arch):
    assert set(email_plan.steps) == set(email_arch.components)


def test_connectors_become_artifact_slots(email_plan):
    # every connector id appears as a slot; the dangling report port gets a
    # terminal slot named component.port
    assert {"k1", "k2", "k3", "k4", "k5", "k6", "topics.report"} == \
        set(email_plan.artifacts)
    assert email_plan.artifacts["k6"] == "DyNetML"
    assert email_plan.artifacts["topics.report"] == "Report"


def test_fan_in_order_follows_declared_ports(email_plan):
    # FilterText declares text before patterns
    assert email_plan.steps["filter"].input_slots == ["k1", "k2"]
    assert email_plan.steps["meta"].input_slots == ["k4", "k5"]


def test_params_resolve_with_defaults(email_plan):
    assert email_plan.steps["mail"].params["server"] == "mail.example.org"
    assert email_plan.steps["delete"].params["dictionary"] == "a,an,the,of,and"
    assert email_plan.steps["topics"].params["top"] == 5


def test_plan_id_covers_structure(dna_style, email_arch):
    a = compile_architecture(email_arch, dna_style, fixtures.DNA_BINDINGS)
    b = compile_architecture(email_arch, dna_style, fixtures.DNA_BINDINGS)
    assert a.plan_id == b.plan_id
    assert a.fingerprint() == b.fingerprint()
    changed = fixtures.architecture(
        fixtures.FIG5_ARCH.replace('param server = "mail.example.org";',
                                   'param server = "other.example.org";'),
        dna_style)
    c = compile_architecture(changed, dna_style, fixtures.DNA_BINDINGS)
    assert c.plan_id != a.plan_id


def test_plan_round_trips_through_json(email_plan):
    again = ExecutionPlan.from_dict(json.loads(email_plan.to_json()))
    assert again.to_dict() == email_plan.to_dict()
    assert again.fingerprint() == email_plan.fingerprint()


def test_validate_accepts_compiled_plan(email_plan):
    assert validate_plan(email_plan) == []


def test_missing_binding_raises(dna_style, email_arch):
    bindings = dict(fixtures.DNA_BINDINGS)
    del bindings["Delete"]
    with pytest.raises(errors.UnboundAdapter):
        compile_architecture(email_arch, dna_style, bindings)


def test_cyclic_architecture_rejected(dna_style):
    src = """architecture C : DNA {
      component a : Delete;
      component b : Delete;
      connector k1 : Pipe;
      connector k2 : Pipe;
      attach a.cleaned to k1.src;
      attach b.text to k1.snk;
      attach b.cleaned to k2.src;
      attach a.text to k2.snk;
    }"""
    arch = fixtures.architecture(src, dna_style)
    with pytest.raises(errors.NotADag):
        compile_architecture(arch, dna_style, fixtures.DNA_BINDINGS)


def test_unexpanded_composite_rejected(dna_style):
    src = """architecture U : DNA {
      component c : Box;
      composite Box {
        component inner : MailExtractor;
        expose out as inner.mail;
      }
    }"""
    arch = fixtures.architecture(src, dna_style)
    with pytest.raises(errors.UnboundActual):
        compile_architecture(arch, dna_style, fixtures.DNA_BINDINGS)


def test_unbound_formal_param_rejected(dna_style, email_arch):
    from euarch.model import ParamRef
    email_arch.components["mail"].params["server"] = ParamRef(name="host")
    with pytest.raises(errors.UnboundActual):
        compile_architecture(email_arch, dna_style, fixtures.DNA_BINDINGS)


def test_validate_catches_corrupted_plans(email_plan):
    broken = ExecutionPlan.from_dict(json.loads(email_plan.to_json()))
    broken.deps.add(("topics", "mail"))
    assert any("cycle" in d for d in validate_plan(broken))

    broken2 = ExecutionPlan.from_dict(json.loads(email_plan.to_json()))
    broken2.steps["mail"].input_slots.append(broken2.steps["mail"].output_slots[0])
    assert any("own output" in d for d in validate_plan(broken2))

    broken3 = ExecutionPlan.from_dict(json.loads(email_plan.to_json()))
    broken3.deps.discard(("mail", "filter"))
    assert any("not a predecessor" in d for d in validate_plan(broken3))


# -- transitive reduction and order relation ----------------------------------

def _closure(nodes, edges):
    out = set()
    adj = {n: set() for n in nodes}
    for u, v in edges:
        adj[u].add(v)
    for start in nodes:
        stack, seen = [start], set()
        while stack:
            n = stack.pop()
            for m in adj[n]:
                if m not in seen:
                    seen.add(m)
                    stack.append(m)
        out |= {(start, t) for t in seen}
    return out


def test_transitive_reduction_preserves_reachability():
    rng = random.Random(3)
    for _ in range(100):
        n = rng.randint(1, 8)
        nodes = [f"n{i}" for i in range(n)]
        edges = {(nodes[i], nodes[j]) for i in range(n) for j in range(i + 1, n)
                 if rng.random() < 0.4}
        reduced = transitive_reduction(nodes, edges)
        assert reduced <= edges
        assert _closure(nodes, reduced) == _closure(nodes, edges)
        # minimality: removing any kept edge loses reachability
        for e in reduced:
            assert _closure(nodes, reduced - {e}) != _closure(nodes, edges)


def _random_workflow(rng, style, n):
    """Random conforming linear-typed DAG over Delete transformers."""
    lines = [f"architecture R : DNA {{"]
    edges = []
    for i in range(n):
        lines.append(f"  component c{i} : "
                     f"{'MailExtractor' if i == 0 else 'Delete'};")
    k = 0
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.35:
                edges.append((f"c{i}", f"c{j}"))
    # each Delete takes one in-port, so keep at most one inbound edge
    seen_target = set()
    kept = []
    for u, v in edges:
        if v in seen_target:
            continue
        seen_target.add(v)
        kept.append((u, v))
    for u, v in kept:
        out_port = "mail" if u == "c0" else "cleaned"
        lines.append(f"  connector k{k} : Pipe;")
        lines.append(f"  attach {u}.{out_port} to k{k}.src;")
        lines.append(f"  attach {v}.text to k{k}.snk;")
        k += 1
    lines.append("}")
    return fixtures.architecture("\n".join(lines), style), kept


def test_order_relation_equals_dataflow_closure_on_random_dags(dna_style):
    rng = random.Random(11)
    for _ in range(200):
        arch, _ = _random_workflow(rng, dna_style, rng.randint(1, 7))
        plan = compile_architecture(arch, dna_style, fixtures.DNA_BINDINGS)
        adj = dataflow_graph(arch, dna_style)
        edges = {(u, v) for u, vs in adj.items() for v in vs}
        assert plan.order_relation() == _closure(set(arch.components), edges)
        assert validate_plan(plan) == []
