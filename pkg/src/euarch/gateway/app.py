"""HTTP/JSON gateway.

Every endpoint is a thin adapter: the response body is the serialized result
of the corresponding library call, wrapped in `{"schema_version": "1", ...}`.
Mutating (POST/PUT/DELETE) requests require a bearer token; reads are open.
Session progress is available both as an offset-polled JSON list and as a
server-sent event stream.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import yaml
from fastapi import Depends, FastAPI, HTTPException, Request
from fastapi.responses import StreamingResponse
from pydantic import BaseModel

from .. import errors
from ..adl import ParseFailure, parse_architecture, parse_style, print_decl, style_from_decl
from ..analyses import (
    ConverterGraph, CostModel, QosPreference, SecurityPolicy, WorkflowCorpus,
    lost_information, mismatch_repair, ordering_analysis, performance_estimate,
    pubsub_topology, security_analysis,
)
from ..analyses.ordering import CorpusEntry
from ..analyses.performance import CostEntry
from ..analyses.repair import ConverterEdge
from ..compiler import AdapterBinding, ExecutionPlan, compile_architecture
from ..conformance import check, dataflow_graph
from ..executor import (
    AccessRule, ArtifactStore, DiskStore, Runtime, RunOptions, User,
    replay, resume, run, start, step, synthesize_workflow,
)
from ..model import Style, instantiate, resolve_style
from ..repository import Ontology, Repository, scale_fixture

SCHEMA_VERSION = "1"


@dataclass
class GatewayConfig:
    """Startup configuration; loadable from a YAML document."""
    port: int = 8000
    repo_path: Optional[str] = None
    store_path: Optional[str] = None
    style_files: list[str] = field(default_factory=list)
    rule_file: Optional[str] = None          # access rules (YAML list)
    tokens: dict[str, dict] = field(default_factory=dict)  # token -> {user, roles}

    @classmethod
    def load(cls, path: str | Path) -> "GatewayConfig":
        path = Path(path)
        try:
            data = yaml.safe_load(path.read_text()) or {}
        except yaml.YAMLError as exc:
            mark = getattr(exc, "problem_mark", None)
            where = f"{path}:{mark.line + 1}" if mark else str(path)
            raise SystemExit(f"{where}: bad config: {exc}")
        known = {"port", "repo_path", "store_path", "style_files", "rule_file", "tokens"}
        unknown = set(data) - known
        if unknown:
            raise SystemExit(f"{path}: unknown config keys: {', '.join(sorted(unknown))}")
        return cls(**data)

    def resolved_port(self) -> int:
        return int(os.environ.get("EUARCH_PORT", self.port))


class GatewayState:
    """All server-side state; one instance per app."""

    def __init__(self, config: GatewayConfig = None):
        self.config = config or GatewayConfig()
        self.styles: dict[str, Style] = {}
        self.architectures: dict[str, dict] = {}   # id -> {source, decl, arch, style, version}
        self.plans: dict[str, ExecutionPlan] = {}
        self.bindings: dict[str, AdapterBinding] = {}
        self._next_arch = 1

        store = (DiskStore(self.config.store_path)
                 if self.config.store_path else ArtifactStore())
        rules = self._load_rules(self.config.rule_file)
        self.runtime = Runtime(store=store, rules=rules, bindings=self.bindings)
        self.repo = (Repository.load(self.config.repo_path)
                     if self.config.repo_path and
                        (Path(self.config.repo_path) / "index.json").exists()
                     else Repository(Ontology()))
        for path in self.config.style_files:
            self.add_style(Path(path).read_text(), filename=path)
        self.tokens = dict(self.config.tokens)

    @staticmethod
    def _load_rules(path: Optional[str]) -> list[AccessRule]:
        if not path:
            return []
        data = yaml.safe_load(Path(path).read_text()) or []
        try:
            return [AccessRule(principal=r["principal"], resource=r["resource"],
                               action=r["action"]) for r in data]
        except (TypeError, KeyError) as exc:
            raise SystemExit(f"{path}: bad access rule document: {exc}")

    # -- helpers -------------------------------------------------------------

    def add_style(self, source: str, filename: str = "<style>") -> str:
        decl = parse_style(source, filename)
        style = style_from_decl(decl)
        self.styles[style.name] = style
        return style.name

    def resolved(self, name: str):
        if name not in self.styles:
            raise errors.UnknownType(f"unknown style '{name}'")
        return resolve_style(self.styles[name], self.styles)

    def add_architecture(self, source: str) -> dict:
        decl = parse_architecture(source)
        style = self.resolved(decl.style)
        arch = instantiate(style, decl)
        arch_id = f"a{self._next_arch:04d}"
        self._next_arch += 1
        entry = {"id": arch_id, "name": arch.name, "style": decl.style,
                 "source": source, "decl": decl, "arch": arch,
                 "resolved_style": style, "version": 1}
        self.architectures[arch_id] = entry
        return entry

    def user_for_token(self, token: str) -> Optional[User]:
        info = self.tokens.get(token)
        if info is None:
            return None
        return User(name=info.get("user", "anonymous"),
                    roles=frozenset(info.get("roles", [])))


# -- request bodies ----------------------------------------------------------

class StyleBody(BaseModel):
    source: str


class ArchitectureBody(BaseModel):
    source: str


class AnalyzeBody(BaseModel):
    policy: Optional[dict] = None        # security
    corpus: Optional[list] = None        # ordering: [{id, edges:[[x,y],...]}]
    min_support: Optional[int] = None
    sizes: Optional[dict] = None         # performance: component id -> megabytes
    costs: Optional[dict] = None         # component type -> {fixed_seconds, per_megabyte_seconds}
    workers: Optional[int] = None
    converters: Optional[list] = None    # repair: [{converter, src, dst, latency_seconds, fidelity_loss}]
    objective: Optional[str] = None
    alpha: Optional[float] = None


class CompileBody(BaseModel):
    bindings: dict[str, dict] = {}       # component type -> {kind, ref}


class RunBody(BaseModel):
    inputs: dict[str, str] = {}          # external slot -> digest or inline "text:..." content
    breakpoints: list[str] = []
    max_workers: int = 1
    mode: str = "run"                    # run | start


class BreakpointsBody(BaseModel):
    set: list[str] = []
    clear: list[str] = []
    resume: bool = False


class RegisterBody(BaseModel):
    source: str                          # one-component-type style source
    type_name: str
    ontology_path: list[str]
    description: str = ""
    provider: str = ""
    auth: str = ""


class SeedBody(BaseModel):
    count: int = 60


class SynthesizeBody(BaseModel):
    record_ids: Optional[list[str]] = None
    style: str
    name: str = "synthesized"


class ReplayBody(BaseModel):
    record_ids: list[str]


def _ok(result) -> dict:
    return {"schema_version": SCHEMA_VERSION, "result": result}


_ERROR_STATUS = {
    errors.Forbidden: 403,
    errors.UnknownType: 404,
    errors.UnknownOperation: 404,
    errors.UnknownCategory: 404,
    errors.MissingArtifact: 404,
}


def create_app(state: GatewayState = None) -> FastAPI:
    state = state or GatewayState()
    app = FastAPI(title="euarch gateway")
    app.state.gateway = state

    def require_user(request: Request) -> User:
        header = request.headers.get("authorization", "")
        if header.lower().startswith("bearer "):
            user = state.user_for_token(header[7:])
            if user is not None:
                return user
        raise HTTPException(status_code=401, detail="missing or invalid token")

    @app.exception_handler(errors.EuarchError)
    async def _domain_error(request, exc):
        status = 400
        for etype, code in _ERROR_STATUS.items():
            if isinstance(exc, etype):
                status = code
                break
        from fastapi.responses import JSONResponse
        return JSONResponse(status_code=status,
                            content={"schema_version": SCHEMA_VERSION,
                                     "error": type(exc).__name__,
                                     "message": str(exc)})

    @app.exception_handler(ParseFailure)
    async def _parse_error(request, exc):
        from fastapi.responses import JSONResponse
        return JSONResponse(status_code=422, content={
            "schema_version": SCHEMA_VERSION, "error": "ParseFailure",
            "diagnostics": [str(d) for d in exc.diagnostics]})

    # -- styles --------------------------------------------------------------

    @app.get("/styles")
    def list_styles():
        return _ok(sorted(state.styles))

    @app.post("/styles")
    def post_style(body: StyleBody, user: User = Depends(require_user)):
        return _ok({"name": state.add_style(body.source)})

    # -- architectures -------------------------------------------------------

    @app.get("/architectures")
    def list_architectures():
        return _ok([{"id": e["id"], "name": e["name"], "style": e["style"],
                     "version": e["version"]}
                    for e in state.architectures.values()])

    @app.post("/architectures")
    def post_architecture(body: ArchitectureBody, user: User = Depends(require_user)):
        entry = state.add_architecture(body.source)
        return _ok({"id": entry["id"], "name": entry["name"],
                    "style": entry["style"], "version": entry["version"]})

    def _arch(arch_id: str) -> dict:
        entry = state.architectures.get(arch_id)
        if entry is None:
            raise HTTPException(status_code=404, detail=f"no architecture '{arch_id}'")
        return entry

    @app.get("/architectures/{arch_id}")
    def get_architecture(arch_id: str):
        entry = _arch(arch_id)
        arch, style = entry["arch"], entry["resolved_style"]
        adj = dataflow_graph(arch, style)
        structure = {
            "components": {c.id: c.type for c in arch.components.values()},
            "connectors": {k.id: k.type for k in arch.connectors.values()},
            "attachments": [{"component": a.component, "port": a.port,
                             "connector": a.connector, "role": a.role}
                            for a in arch.attachments],
            "dataflow": sorted([u, v] for u, vs in adj.items() for v in vs),
        }
        return _ok({"id": entry["id"], "name": entry["name"],
                    "style": entry["style"], "version": entry["version"],
                    "source": print_decl(entry["decl"]),
                    "structure": structure})

    @app.post("/architectures/{arch_id}/check")
    def check_architecture(arch_id: str):
        entry = _arch(arch_id)
        violations = check(entry["arch"], entry["resolved_style"])
        return _ok([v.to_dict() for v in violations])

    @app.post("/architectures/{arch_id}/analyze/{analysis}")
    def analyze_architecture(arch_id: str, analysis: str, body: AnalyzeBody = None):
        body = body or AnalyzeBody()
        entry = _arch(arch_id)
        arch, style = entry["arch"], entry["resolved_style"]
        if analysis == "security":
            p = body.policy or {}
            policy = SecurityPolicy(
                required_auth=p.get("required_auth", "token"),
                trusted_components=set(p.get("trusted_components", [])),
                private_data_sources=set(p.get("private_data_sources", [])))
            return _ok([v.to_dict() for v in security_analysis(arch, style, policy)])
        if analysis == "ordering":
            corpus = WorkflowCorpus(entries=[
                CorpusEntry(id=e.get("id", f"w{i}"),
                            edges=[tuple(edge) for edge in e.get("edges", [])])
                for i, e in enumerate(body.corpus or [])])
            kwargs = {}
            if body.min_support is not None:
                kwargs["min_support"] = body.min_support
            return _ok([v.to_dict()
                        for v in ordering_analysis(arch, style, corpus, **kwargs)])
        if analysis == "performance":
            costs = CostModel(entries={
                t: CostEntry(**e) for t, e in (body.costs or {}).items()})
            seconds = performance_estimate(arch, style, body.sizes or {}, costs,
                                           workers=body.workers)
            return _ok({"seconds": seconds, "workers": body.workers})
        if analysis == "repair":
            graph = ConverterGraph(edges=[ConverterEdge(**e)
                                          for e in (body.converters or [])])
            qos = QosPreference(objective=body.objective or "min_latency",
                                alpha=body.alpha if body.alpha is not None else 0.5)
            return _ok(mismatch_repair(arch, style, graph, qos).to_dict())
        if analysis == "topology":
            return _ok(pubsub_topology(arch, style).to_dict())
        if analysis == "lost_information":
            return _ok([v.to_dict() for v in lost_information(arch, style)])
        raise HTTPException(status_code=404, detail=f"no analysis '{analysis}'")

    @app.post("/architectures/{arch_id}/compile")
    def compile_arch(arch_id: str, body: CompileBody, user: User = Depends(require_user)):
        entry = _arch(arch_id)
        bindings = {t: AdapterBinding(**b) for t, b in body.bindings.items()}
        plan = compile_architecture(entry["arch"], entry["resolved_style"], bindings)
        state.plans[plan.plan_id] = plan
        state.bindings.update(bindings)
        state.runtime.bindings.update(bindings)
        return _ok(plan.to_dict())

    # -- plans and sessions --------------------------------------------------

    @app.post("/plans/{plan_id}/run")
    def run_plan(plan_id: str, body: RunBody, user: User = Depends(require_user)):
        plan = state.plans.get(plan_id)
        if plan is None:
            raise HTTPException(status_code=404, detail=f"no plan '{plan_id}'")
        inputs = {}
        for slot, value in body.inputs.items():
            if value.startswith("text:"):
                inputs[slot] = state.runtime.store.put(value[5:].encode()).digest
            else:
                inputs[slot] = value
        options = RunOptions(max_workers=body.max_workers,
                             breakpoints=set(body.breakpoints))
        fn = start if body.mode == "start" else run
        session = fn(state.runtime, plan, inputs, user, options)
        return _ok(session.to_dict())

    def _session(session_id: str):
        session = state.runtime.sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"no session '{session_id}'")
        return session

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return _ok(_session(session_id).to_dict())

    @app.post("/sessions/{session_id}/step")
    def step_session(session_id: str, user: User = Depends(require_user)):
        return _ok(step(state.runtime, _session(session_id)).to_dict())

    @app.post("/sessions/{session_id}/breakpoints")
    def breakpoints_session(session_id: str, body: BreakpointsBody,
                            user: User = Depends(require_user)):
        session = _session(session_id)
        session.breakpoints |= set(body.set)
        session.breakpoints -= set(body.clear)
        if body.resume:
            resume(state.runtime, session)
        return _ok(session.to_dict())

    @app.get("/sessions/{session_id}/artifacts")
    def session_artifacts(session_id: str):
        session = _session(session_id)
        out = {}
        for slot, digest in sorted(session.slot_digests.items()):
            meta = state.runtime.store.meta(digest)
            out[slot] = meta.to_dict()
        return _ok(out)

    @app.get("/sessions/{session_id}/artifacts/{slot}")
    def session_artifact_content(session_id: str, slot: str):
        session = _session(session_id)
        digest = session.slot_digests.get(slot)
        if digest is None:
            raise HTTPException(status_code=404, detail=f"no artifact in slot '{slot}'")
        return _ok({"slot": slot, "digest": digest,
                    "content": state.runtime.store.get(digest).decode(errors="replace")})

    @app.get("/sessions/{session_id}/events")
    def session_events(session_id: str, after: int = -1):
        session = _session(session_id)
        return _ok([e for e in session.events if e["seq"] > after])

    @app.get("/sessions/{session_id}/stream")
    def session_stream(session_id: str):
        session = _session(session_id)

        def sse():
            for event in list(session.events):
                yield f"data: {json.dumps(event, sort_keys=True)}\n\n"

        return StreamingResponse(sse(), media_type="text/event-stream")

    # -- repository ----------------------------------------------------------

    @app.get("/repo/search")
    def repo_search(prefix: str = None, text: str = None, consumes: str = None,
                    produces: str = None, max_params: int = None):
        ids = state.repo.search(
            ontology_prefix=prefix.split("/") if prefix else None,
            text=text, consumed_format=consumes, produced_format=produces,
            max_param_count=max_params)
        return _ok([state.repo.get(i).to_dict() for i in ids])

    @app.get("/repo/entries")
    def repo_entries():
        return _ok([e.to_dict() for e in state.repo.entries()])

    @app.post("/repo/entries")
    def repo_register(body: RegisterBody, user: User = Depends(require_user)):
        style = style_from_decl(parse_style(body.source))
        resolved = resolve_style(style, {style.name: style})
        decl = resolved.component_types.get(body.type_name)
        if decl is None:
            raise HTTPException(status_code=422,
                                detail=f"source declares no type '{body.type_name}'")
        from ..repository import metadata_for
        metadata = metadata_for(decl, resolved, description=body.description,
                                ontology_path=body.ontology_path,
                                provider=body.provider, auth=body.auth)
        entry_id = state.repo.register(decl, metadata)
        return _ok({"entry_id": entry_id})

    @app.post("/repo/seed")
    def repo_seed(body: SeedBody, user: User = Depends(require_user)):
        state.repo = scale_fixture(body.count)
        return _ok({"entries": len(state.repo.entries())})

    @app.get("/repo/ontology")
    def repo_ontology():
        return _ok(state.repo.ontology.to_config())

    # -- history -------------------------------------------------------------

    @app.get("/history")
    def history(user_name: str = None):
        log = state.runtime.history
        records = log.for_user(user_name) if user_name else log.records()
        return _ok([r.to_dict() for r in records])

    @app.post("/history/synthesize")
    def history_synthesize(body: SynthesizeBody, user: User = Depends(require_user)):
        log = state.runtime.history
        if body.record_ids is None:
            records = log.for_user(user.name)
        else:
            records = []
            for rid in body.record_ids:
                rec = log.get(rid)
                if rec is None:
                    raise HTTPException(status_code=404,
                                        detail=f"no history record '{rid}'")
                records.append(rec)
        decl = synthesize_workflow(records, state.resolved(body.style),
                                   store=state.runtime.store, name=body.name)
        return _ok({"source": print_decl(decl)})

    @app.post("/history/replay")
    def history_replay(body: ReplayBody, user: User = Depends(require_user)):
        session = replay(state.runtime, body.record_ids, user)
        return _ok(session.to_dict())

    return app
