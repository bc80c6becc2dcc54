"""Command-line interface.

Exit codes: 0 success, 1 when violations or errors were found in the inputs,
2 on usage errors. Parse diagnostics print as `file:line:col: severity:
message` on standard error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import yaml

from . import errors
from .adl import ParseFailure, parse_architecture, parse_style, print_decl, style_from_decl
from .analyses import (
    ConverterGraph, CostModel, QosPreference, SecurityPolicy, WorkflowCorpus,
    lost_information, mismatch_repair, ordering_analysis, performance_estimate,
    pubsub_topology, security_analysis,
)
from .analyses.ordering import CorpusEntry
from .analyses.performance import CostEntry
from .analyses.repair import ConverterEdge
from .compiler import AdapterBinding, ExecutionPlan, compile_architecture
from .conformance import check, has_errors
from .executor import (
    AccessRule, ArtifactStore, DiskStore, HistoryLog, HistoryRecord, Runtime,
    RunOptions, User, run as run_plan, start as start_plan, step as step_plan,
    synthesize_workflow,
)
from .model import instantiate, resolve_style
from .repository import Ontology, Repository, metadata_for, scale_fixture


def _load_config(path: str):
    return yaml.safe_load(Path(path).read_text()) or {}


def _fail_parse(exc: ParseFailure):
    for diag in exc.diagnostics:
        click.echo(str(diag), err=True)
    sys.exit(1)


def _load_styles(style_paths):
    registry = {}
    for path in style_paths:
        decl = parse_style(Path(path).read_text(), path)
        style = style_from_decl(decl)
        registry[style.name] = style
    return registry


def _load_architecture(arch_path, style_paths):
    registry = _load_styles(style_paths)
    decl = parse_architecture(Path(arch_path).read_text(), arch_path)
    if decl.style not in registry:
        raise click.ClickException(
            f"architecture '{decl.name}' uses style '{decl.style}' but no "
            f"--style file declares it")
    style = resolve_style(registry[decl.style], registry)
    return instantiate(style, decl), style


def _print_violations(violations):
    for v in violations:
        click.echo(f"{v.severity}: {v.rule_id}: {v.message}")


@click.group()
def main():
    """End-user architecting workbench."""


@main.command("check")
@click.argument("arch_file", type=click.Path(exists=True))
@click.option("--style", "style_paths", multiple=True, required=True,
              type=click.Path(exists=True), help="Style file (repeatable).")
def check_cmd(arch_file, style_paths):
    """Check an architecture against its style's rules."""
    try:
        arch, style = _load_architecture(arch_file, style_paths)
        violations = check(arch, style)
    except ParseFailure as exc:
        _fail_parse(exc)
    except errors.EuarchError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    _print_violations(violations)
    sys.exit(1 if violations else 0)


@main.command("analyze")
@click.argument("analysis", type=click.Choice(
    ["security", "ordering", "performance", "repair", "topology",
     "lost_information"]))
@click.argument("arch_file", type=click.Path(exists=True))
@click.option("--style", "style_paths", multiple=True, required=True,
              type=click.Path(exists=True))
@click.option("--policy", type=click.Path(exists=True),
              help="Security policy document.")
@click.option("--corpus", type=click.Path(exists=True),
              help="Prior-workflow corpus document.")
@click.option("--min-support", type=int, default=None)
@click.option("--sizes", type=click.Path(exists=True),
              help="Input sizes in megabytes per source component.")
@click.option("--costs", type=click.Path(exists=True),
              help="Cost entries per component type.")
@click.option("--workers", type=int, default=None)
@click.option("--converters", type=click.Path(exists=True),
              help="Converter edge list for repair.")
@click.option("--objective", default="min_latency")
@click.option("--alpha", type=float, default=0.5)
def analyze_cmd(analysis, arch_file, style_paths, policy, corpus, min_support,
                sizes, costs, workers, converters, objective, alpha):
    """Run one analysis and print its result."""
    try:
        arch, style = _load_architecture(arch_file, style_paths)
        if analysis == "security":
            p = _load_config(policy) if policy else {}
            result = security_analysis(arch, style, SecurityPolicy(
                required_auth=p.get("required_auth", "token"),
                trusted_components=set(p.get("trusted_components", [])),
                private_data_sources=set(p.get("private_data_sources", []))))
        elif analysis == "ordering":
            entries = [CorpusEntry(id=e.get("id", f"w{i}"),
                                   edges=[tuple(x) for x in e.get("edges", [])])
                       for i, e in enumerate(_load_config(corpus) if corpus else [])]
            kwargs = {"min_support": min_support} if min_support is not None else {}
            result = ordering_analysis(arch, style, WorkflowCorpus(entries), **kwargs)
        elif analysis == "performance":
            model = CostModel(entries={
                t: CostEntry(**e)
                for t, e in (_load_config(costs) if costs else {}).items()})
            seconds = performance_estimate(
                arch, style, _load_config(sizes) if sizes else {}, model,
                workers=workers)
            click.echo(f"{seconds:.6g}")
            sys.exit(0)
        elif analysis == "repair":
            graph = ConverterGraph(edges=[
                ConverterEdge(**e)
                for e in (_load_config(converters) if converters else [])])
            plan = mismatch_repair(arch, style, graph,
                                   QosPreference(objective=objective, alpha=alpha))
            click.echo(json.dumps(plan.to_dict(), indent=2, sort_keys=True))
            sys.exit(0)
        elif analysis == "topology":
            click.echo(json.dumps(pubsub_topology(arch, style).to_dict(),
                                  indent=2, sort_keys=True))
            sys.exit(0)
        else:
            result = lost_information(arch, style)
    except ParseFailure as exc:
        _fail_parse(exc)
    except errors.EuarchError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    _print_violations(result)
    sys.exit(1 if result else 0)


@main.command("compile")
@click.argument("arch_file", type=click.Path(exists=True))
@click.option("--style", "style_paths", multiple=True, required=True,
              type=click.Path(exists=True))
@click.option("--bindings", type=click.Path(exists=True), required=True,
              help="Adapter bindings per component type.")
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Write the plan document here instead of standard output.")
def compile_cmd(arch_file, style_paths, bindings, out_path):
    """Compile a workflow architecture into an execution plan document."""
    try:
        arch, style = _load_architecture(arch_file, style_paths)
        binding_map = {t: AdapterBinding(**b)
                       for t, b in _load_config(bindings).items()}
        plan = compile_architecture(arch, style, binding_map)
    except ParseFailure as exc:
        _fail_parse(exc)
    except errors.EuarchError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    text = plan.to_json()
    if out_path:
        Path(out_path).write_text(text)
    else:
        click.echo(text)
    sys.exit(0)


def _runtime(store_path, rules_path, user_name):
    store = DiskStore(store_path) if store_path else ArtifactStore()
    if rules_path:
        rules = [AccessRule(principal=r["principal"], resource=r["resource"],
                            action=r["action"]) for r in _load_config(rules_path)]
    else:
        # no access-rule document: a local run acts on the caller's behalf
        rules = [AccessRule(principal=user_name, resource="*", action=a)
                 for a in ("use", "read")]
    return Runtime(store=store, rules=rules)


def _bind_inputs(runtime, plan, input_pairs):
    inputs = {}
    for pair in input_pairs:
        slot, _, path = pair.partition("=")
        if not path:
            raise click.UsageError(f"--input must look like slot=file, got '{pair}'")
        content = Path(path).read_bytes()
        inputs[slot] = runtime.store.put(content).digest
    return inputs


def _dump_history(runtime, history_out):
    if history_out:
        Path(history_out).write_text(json.dumps(
            [r.to_dict() for r in runtime.history.records()], indent=2))


@main.command("run")
@click.argument("plan_file", type=click.Path(exists=True))
@click.option("--input", "input_pairs", multiple=True,
              help="slot=file binding for an external input slot (repeatable).")
@click.option("--user", "user_name", default="operator")
@click.option("--role", "roles", multiple=True)
@click.option("--rules", "rules_path", type=click.Path(exists=True))
@click.option("--store", "store_path", type=click.Path())
@click.option("--workers", type=int, default=1)
@click.option("--breakpoint", "breakpoints", multiple=True)
@click.option("--history-out", type=click.Path())
def run_cmd(plan_file, input_pairs, user_name, roles, rules_path, store_path,
            workers, breakpoints, history_out):
    """Execute a compiled plan to completion."""
    plan = ExecutionPlan.from_dict(json.loads(Path(plan_file).read_text()))
    runtime = _runtime(store_path, rules_path, user_name)
    try:
        inputs = _bind_inputs(runtime, plan, input_pairs)
        session = run_plan(runtime, plan, inputs,
                           User(name=user_name, roles=frozenset(roles)),
                           RunOptions(max_workers=workers,
                                      breakpoints=set(breakpoints)))
    except errors.EuarchError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    _dump_history(runtime, history_out)
    click.echo(json.dumps(session.to_dict(), indent=2, sort_keys=True))
    sys.exit(0 if session.status == "Completed" else 1)


@main.command("step")
@click.argument("plan_file", type=click.Path(exists=True))
@click.option("--input", "input_pairs", multiple=True)
@click.option("--user", "user_name", default="operator")
@click.option("--role", "roles", multiple=True)
@click.option("--rules", "rules_path", type=click.Path(exists=True))
@click.option("--store", "store_path", type=click.Path())
@click.option("--count", type=int, default=1, help="How many steps to run.")
@click.option("--history-out", type=click.Path())
def step_cmd(plan_file, input_pairs, user_name, roles, rules_path, store_path,
             count, history_out):
    """Start a session paused and run it forward COUNT steps."""
    plan = ExecutionPlan.from_dict(json.loads(Path(plan_file).read_text()))
    runtime = _runtime(store_path, rules_path, user_name)
    try:
        inputs = _bind_inputs(runtime, plan, input_pairs)
        session = start_plan(runtime, plan, inputs,
                             User(name=user_name, roles=frozenset(roles)))
        for _ in range(count):
            if session.finished():
                break
            step_plan(runtime, session)
    except errors.EuarchError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    _dump_history(runtime, history_out)
    click.echo(json.dumps(session.to_dict(), indent=2, sort_keys=True))
    sys.exit(0 if session.status in ("Completed", "Paused") else 1)


# -- repository --------------------------------------------------------------

@main.group("repo")
def repo_group():
    """Component repository operations."""


@repo_group.command("search")
@click.argument("repo_dir", type=click.Path(exists=True))
@click.option("--prefix", default=None, help="Ontology path prefix a/b/c.")
@click.option("--text", default=None)
@click.option("--consumes", default=None)
@click.option("--produces", default=None)
@click.option("--max-params", type=int, default=None)
def repo_search_cmd(repo_dir, prefix, text, consumes, produces, max_params):
    """Search a repository directory with conjunctive filters."""
    repo = Repository.load(repo_dir)
    ids = repo.search(ontology_prefix=prefix.split("/") if prefix else None,
                      text=text, consumed_format=consumes,
                      produced_format=produces, max_param_count=max_params)
    for entry_id in ids:
        entry = repo.get(entry_id)
        click.echo(f"{entry_id}\tparams={entry.metadata.param_count}\t"
                   f"{'/'.join(entry.metadata.ontology_path)}")
    sys.exit(0)


@repo_group.command("register")
@click.argument("repo_dir", type=click.Path())
@click.argument("type_name")
@click.option("--style", "style_paths", multiple=True, required=True,
              type=click.Path(exists=True), help="Style file (repeatable).")
@click.option("--ontology", "ontology_path", required=True,
              help="Category path a/b/c.")
@click.option("--description", default="")
def repo_register_cmd(repo_dir, type_name, style_paths, ontology_path, description):
    """Register one component type declared in the given style files."""
    try:
        registry = _load_styles(style_paths)
        resolved = None
        for style in registry.values():
            candidate = resolve_style(style, registry)
            if type_name in candidate.component_types:
                resolved = candidate
                break
        if resolved is None:
            click.echo(f"error: no component type '{type_name}' declared", err=True)
            sys.exit(1)
        repo = (Repository.load(repo_dir)
                if (Path(repo_dir) / "index.json").exists()
                else Repository(Ontology()))
        path = ontology_path.split("/")
        if not repo.ontology.has_path(path):
            node = repo.ontology
            if path[0] != node.name:
                click.echo(f"error: path must start at '{node.name}'", err=True)
                sys.exit(1)
            for name in path[1:]:
                nxt = next((c for c in node.children if c.name == name), None)
                if nxt is None:
                    nxt = Ontology(name=name)
                    node.children.append(nxt)
                node = nxt
        decl = resolved.component_types[type_name]
        entry_id = repo.register(decl, metadata_for(
            decl, resolved, description=description, ontology_path=path))
        repo.save(repo_dir)
    except ParseFailure as exc:
        _fail_parse(exc)
    except errors.EuarchError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(entry_id)
    sys.exit(0)


@repo_group.command("seed")
@click.argument("repo_dir", type=click.Path())
@click.option("--count", type=int, default=60)
def repo_seed_cmd(repo_dir, count):
    """Populate a repository directory with synthetic entries."""
    repo = scale_fixture(count)
    Path(repo_dir).mkdir(parents=True, exist_ok=True)
    repo.save(repo_dir)
    click.echo(f"seeded {count} entries into {repo_dir}")
    sys.exit(0)


# -- history -----------------------------------------------------------------

def _load_history(path) -> list[HistoryRecord]:
    data = json.loads(Path(path).read_text())
    return [HistoryRecord(record_id=r["record_id"], seq=r["seq"], user=r["user"],
                          operation=r["operation"], params=r["params"],
                          input_digests=tuple(r["input_digests"]),
                          output_digests=tuple(r["output_digests"]),
                          started_at=r["started_at"], finished_at=r["finished_at"],
                          outcome=r["outcome"], chain_hash=r.get("chain_hash", ""))
            for r in data]


@main.group("history")
def history_group():
    """Invocation history operations."""


@history_group.command("list")
@click.argument("history_file", type=click.Path(exists=True))
@click.option("--user", "user_name", default=None)
def history_list_cmd(history_file, user_name):
    """Print the records in a history document."""
    records = _load_history(history_file)
    if user_name:
        records = [r for r in records if r.user == user_name]
    for r in records:
        click.echo(f"{r.record_id}\t{r.user}\t{r.operation}\t{r.outcome}\t"
                   f"in={len(r.input_digests)} out={len(r.output_digests)}")
    sys.exit(0)


@history_group.command("synth")
@click.argument("history_file", type=click.Path(exists=True))
@click.option("--style", "style_paths", multiple=True, required=True,
              type=click.Path(exists=True))
@click.option("--style-name", required=True)
@click.option("--store", "store_path", type=click.Path(exists=True),
              help="Artifact store directory for unmatched inputs.")
@click.option("--user", "user_name", default=None)
@click.option("--name", default="synthesized")
def history_synth_cmd(history_file, style_paths, style_name, store_path,
                      user_name, name):
    """Synthesize a workflow declaration from a history document."""
    try:
        registry = _load_styles(style_paths)
        if style_name not in registry:
            click.echo(f"error: no style '{style_name}' declared", err=True)
            sys.exit(1)
        style = resolve_style(registry[style_name], registry)
        records = _load_history(history_file)
        if user_name:
            records = [r for r in records if r.user == user_name]
        store = DiskStore(store_path) if store_path else None
        decl = synthesize_workflow(records, style, store=store, name=name)
    except ParseFailure as exc:
        _fail_parse(exc)
    except errors.EuarchError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(print_decl(decl))
    sys.exit(0)


# -- serve -------------------------------------------------------------------

@main.command("serve")
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--port", type=int, default=None)
def serve_cmd(config_path, port):
    """Start the HTTP gateway. EUARCH_PORT overrides the configured port."""
    import uvicorn

    from .gateway import GatewayConfig, GatewayState, create_app
    config = GatewayConfig.load(config_path) if config_path else GatewayConfig()
    app = create_app(GatewayState(config))
    uvicorn.run(app, host="127.0.0.1",
                port=port if port is not None else config.resolved_port())


if __name__ == "__main__":
    main()
