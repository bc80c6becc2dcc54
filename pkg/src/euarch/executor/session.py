"""Plan execution: sessions with breakpoints, stepping, graceful failure,
access control, and invocation history."""

from __future__ import annotations

import shlex
import subprocess
import tempfile
import threading
import time
import uuid
from concurrent.futures import FIRST_COMPLETED, ThreadPoolExecutor, wait
from dataclasses import dataclass, field
from pathlib import Path

from .. import errors
from ..compiler import AdapterBinding, ExecutionPlan, Step, validate_plan
from .access import AccessRule, User, authorize
from .builtins import get_builtin
from .history import HistoryLog
from .store import ArtifactStore

PENDING, RUNNING, DONE, FAILED, SKIPPED = "Pending", "Running", "Done", "Failed", "Skipped"


@dataclass
class RunOptions:
    max_workers: int = 1
    breakpoints: set[str] = field(default_factory=set)
    step_timeout: float | None = None


class Runtime:
    """Shared executor state: store, history, access rules, adapter bindings."""

    def __init__(self, store: ArtifactStore = None, history: HistoryLog = None,
                 rules: list[AccessRule] = None,
                 bindings: dict[str, AdapterBinding] = None):
        self.store = store if store is not None else ArtifactStore()
        self.history = history if history is not None else HistoryLog()
        self.rules = list(rules or [])
        self.bindings = dict(bindings or {})
        self.sessions: dict[str, "Session"] = {}


class Session:
    def __init__(self, plan: ExecutionPlan, user: User, options: RunOptions):
        self.session_id = f"s-{uuid.uuid4().hex[:12]}"
        self.plan = plan
        self.fingerprint = plan.fingerprint()
        self.user = user
        self.options = options
        self.status = "Ready"
        self.step_states = {sid: PENDING for sid in plan.steps}
        self.breakpoints = set(options.breakpoints)
        self.armed: set[str] = set()      # breakpoints cleared by resume/step
        self.slot_digests: dict[str, str] = {}
        self.record_ids: list[str] = []
        self.events: list[dict] = []
        self.error: str | None = None
        self._lock = threading.Lock()
        self._log("session", state="Ready")

    def _log(self, kind: str, **extra):
        self.events.append({"ts": time.time(), "seq": len(self.events),
                            "kind": kind, **extra})

    def _set_status(self, status: str):
        self.status = status
        self._log("status", state=status)

    def _set_step(self, sid: str, state: str):
        self.step_states[sid] = state
        self._log("step", step=sid, state=state)

    def ready_steps(self) -> list[str]:
        preds = self.plan.predecessors()
        return sorted(
            sid for sid, st in self.step_states.items()
            if st == PENDING and all(self.step_states[p] == DONE for p in preds[sid]))

    def blocked_by_breakpoint(self, sid: str) -> bool:
        return sid in self.breakpoints and sid not in self.armed

    def finished(self) -> bool:
        return all(st in (DONE, FAILED, SKIPPED) for st in self.step_states.values())

    def to_dict(self):
        return {
            "session_id": self.session_id,
            "plan_id": self.plan.plan_id,
            "fingerprint": self.fingerprint,
            "user": self.user.name,
            "status": self.status,
            "step_states": dict(self.step_states),
            "breakpoints": sorted(self.breakpoints),
            "slot_digests": dict(self.slot_digests),
            "record_ids": list(self.record_ids),
            "error": self.error,
        }


def _invoke(runtime: Runtime, step: Step, params: dict, inputs: list[bytes]) -> list[bytes]:
    binding = step.binding
    if binding.kind == "builtin":
        out = get_builtin(binding.ref)(params, inputs)
        return out if isinstance(out, list) else [out]
    if binding.kind == "command":
        return _invoke_command(binding.ref, step, params, inputs)
    raise errors.UnboundAdapter(f"unknown adapter kind '{binding.kind}'")


def _invoke_command(template: str, step: Step, params: dict,
                    inputs: list[bytes]) -> list[bytes]:
    """Run an external command with {param}, {in:slot}, {out:slot} placeholders
    substituted by values and temp-file paths."""
    with tempfile.TemporaryDirectory(prefix="euarch-step-") as tmp:
        tmpdir = Path(tmp)
        in_paths = {}
        for i, slot in enumerate(step.input_slots):
            path = tmpdir / f"in{i}"
            path.write_bytes(inputs[i])
            in_paths[slot] = str(path)
        out_paths = {slot: str(tmpdir / f"out{i}")
                     for i, slot in enumerate(step.output_slots)}

        def substitute(token: str) -> str:
            for slot, path in in_paths.items():
                token = token.replace(f"{{in:{slot}}}", path)
            for slot, path in out_paths.items():
                token = token.replace(f"{{out:{slot}}}", path)
            for name, value in params.items():
                token = token.replace(f"{{{name}}}", str(value))
            return token

        argv = [substitute(tok) for tok in shlex.split(template)]
        proc = subprocess.run(argv, capture_output=True, timeout=600)
        if proc.returncode != 0:
            raise errors.StepFailed(
                f"command exited {proc.returncode}: {proc.stderr.decode(errors='replace')[:500]}")
        return [Path(out_paths[slot]).read_bytes() for slot in step.output_slots]


def _execute_step(runtime: Runtime, session: Session, sid: str,
                  external_inputs: dict[str, str]) -> None:
    step = session.plan.steps[sid]
    started = time.time()
    inputs = []
    for slot in step.input_slots:
        digest = session.slot_digests.get(slot) or external_inputs.get(slot)
        if digest is None:
            raise errors.MissingArtifact(f"slot '{slot}' has no artifact")
        inputs.append(runtime.store.get(digest))
    call = lambda: _invoke(runtime, step, step.params, inputs)
    if session.options.step_timeout is not None:
        with ThreadPoolExecutor(max_workers=1) as one:
            outputs = one.submit(call).result(timeout=session.options.step_timeout)
    else:
        outputs = call()
    if len(outputs) != len(step.output_slots):
        raise errors.StepFailed(
            f"step '{sid}' produced {len(outputs)} outputs, "
            f"expected {len(step.output_slots)}")
    with session._lock:
        out_digests = []
        for slot, content in zip(step.output_slots, outputs):
            artifact = runtime.store.put(
                content, format=session.plan.artifacts.get(slot, "bytes"),
                producing_step=sid)
            session.slot_digests[slot] = artifact.digest
            out_digests.append(artifact.digest)
        in_digests = [session.slot_digests.get(s) or external_inputs[s]
                      for s in step.input_slots]
        record = runtime.history.append(
            user=session.user.name, operation=_step_type(session.plan, sid),
            params=step.params, input_digests=in_digests,
            output_digests=out_digests, started_at=started,
            finished_at=time.time(), outcome="ok")
        session.record_ids.append(record.record_id)


def _step_type(plan: ExecutionPlan, sid: str) -> str:
    return plan.steps[sid].component_type or plan.steps[sid].component


def _skip_descendants(session: Session, sid: str):
    adj = {s: set() for s in session.plan.steps}
    for u, v in session.plan.deps:
        adj[u].add(v)
    stack, seen = [sid], {sid}
    while stack:
        n = stack.pop()
        for m in adj[n]:
            if m in seen:
                continue
            seen.add(m)
            if session.step_states[m] == PENDING:
                session._set_step(m, SKIPPED)
            stack.append(m)


def _run_one(runtime: Runtime, session: Session, sid: str,
             external_inputs: dict[str, str]):
    session._set_step(sid, RUNNING)
    try:
        _execute_step(runtime, session, sid, external_inputs)
    except Exception as exc:  # graceful: record, skip descendants, carry on
        with session._lock:
            session._set_step(sid, FAILED)
            session.error = f"step '{sid}' failed: {exc}"
            _skip_descendants(session, sid)
        return
    session._set_step(sid, DONE)


def _drive(runtime: Runtime, session: Session, external_inputs: dict[str, str]):
    """Run until completed or every remaining ready step sits on a breakpoint."""
    session._set_status("Running")
    workers = max(1, session.options.max_workers)
    if workers == 1:
        while True:
            runnable = [s for s in session.ready_steps()
                        if not session.blocked_by_breakpoint(s)]
            if not runnable:
                break
            _run_one(runtime, session, runnable[0], external_inputs)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {}
            while True:
                for sid in session.ready_steps():
                    if sid in futures or session.blocked_by_breakpoint(sid):
                        continue
                    futures[sid] = pool.submit(_run_one, runtime, session, sid,
                                               external_inputs)
                active = [f for f in futures.values() if not f.done()]
                if not active:
                    runnable = [s for s in session.ready_steps()
                                if not session.blocked_by_breakpoint(s)
                                and s not in futures]
                    if not runnable:
                        break
                    continue
                wait(active, return_when=FIRST_COMPLETED)
    if session.finished():
        if all(st == DONE for st in session.step_states.values()):
            session._set_status("Completed")
        else:
            session._set_status("Failed")
    else:
        session._set_status("Paused")


def _authorize_plan(runtime: Runtime, plan: ExecutionPlan, user: User,
                    external_inputs: dict[str, str]):
    for sid in sorted(plan.steps):
        resource = _step_type(plan, sid)
        if not authorize(user, resource, "use", runtime.rules):
            raise errors.Forbidden(
                f"user '{user.name}' may not use '{resource}' (step '{sid}')")
    for slot in sorted(external_inputs):
        if not authorize(user, slot, "read", runtime.rules):
            raise errors.Forbidden(
                f"user '{user.name}' may not read dataset '{slot}'")


def run(runtime: Runtime, plan: ExecutionPlan, inputs: dict[str, str],
        user: User, options: RunOptions = None) -> Session:
    """Execute a plan. `inputs` binds external input slots to artifact digests.

    Authorization is checked for every step and dataset before any step runs;
    a Forbidden run leaves the store untouched."""
    options = options or RunOptions()
    diags = validate_plan(plan)
    if diags:
        raise errors.NotADag("invalid plan: " + "; ".join(diags))
    unbound = plan.external_input_slots() - set(inputs)
    if unbound:
        raise errors.MissingArtifact(
            "external input slots not bound: " + ", ".join(sorted(unbound)))
    _authorize_plan(runtime, plan, user, inputs)
    for slot, digest in inputs.items():
        if digest not in runtime.store:
            raise errors.MissingArtifact(f"input artifact {digest} for slot '{slot}'")
    session = Session(plan, user, options)
    session._external_inputs = dict(inputs)
    runtime.sessions[session.session_id] = session
    _drive(runtime, session, inputs)
    return session


def start(runtime: Runtime, plan: ExecutionPlan, inputs: dict[str, str],
          user: User, options: RunOptions = None) -> Session:
    """Like run() but leaves the session Paused before any step, for stepping."""
    options = options or RunOptions()
    diags = validate_plan(plan)
    if diags:
        raise errors.NotADag("invalid plan: " + "; ".join(diags))
    _authorize_plan(runtime, plan, user, inputs)
    session = Session(plan, user, options)
    session._external_inputs = dict(inputs)
    session._set_status("Paused")
    runtime.sessions[session.session_id] = session
    return session


def step(runtime: Runtime, session: Session) -> Session:
    """Run exactly one eligible step (smallest step id) to completion."""
    if session.status not in ("Paused", "Ready"):
        raise errors.NoEligibleStep(f"session is {session.status}, not Paused")
    ready = session.ready_steps()
    if not ready:
        raise errors.NoEligibleStep("no step is ready to run")
    sid = ready[0]
    session._set_status("Stepping")
    _run_one(runtime, session, sid, getattr(session, "_external_inputs", {}))
    if session.finished():
        if all(st == DONE for st in session.step_states.values()):
            session._set_status("Completed")
        else:
            session._set_status("Failed")
    else:
        session._set_status("Paused")
    return session


def resume(runtime: Runtime, session: Session) -> Session:
    """Continue past the breakpoints the session is currently paused on."""
    if session.status != "Paused":
        raise errors.NoEligibleStep(f"session is {session.status}, not Paused")
    session.armed |= {s for s in session.ready_steps()
                      if session.blocked_by_breakpoint(s)}
    _drive(runtime, session, getattr(session, "_external_inputs", {}))
    return session


def replay(runtime: Runtime, record_ids: list[str], user: User,
           options: RunOptions = None) -> Session:
    """Re-execute recorded operations as a synthesized linear plan.

    History is never rewritten; the replay appends new records."""
    records = []
    for rid in record_ids:
        rec = runtime.history.get(rid)
        if rec is None:
            raise errors.MissingArtifact(f"history record '{rid}' does not exist")
        records.append(rec)

    plan = ExecutionPlan(plan_id=f"replay-{'-'.join(record_ids) or 'empty'}")
    slot_of = {}       # original output digest -> slot name
    external = {}
    prev_sid = None
    for i, rec in enumerate(records):
        binding = runtime.bindings.get(rec.operation)
        if binding is None:
            raise errors.UnboundAdapter(
                f"recorded operation '{rec.operation}' has no adapter binding")
        sid = f"r{i:03d}"
        input_slots = []
        for d in rec.input_digests:
            if d in slot_of:
                input_slots.append(slot_of[d])
            else:
                slot = f"art_{d[:12]}"
                if d not in runtime.store:
                    raise errors.MissingArtifact(
                        f"input artifact {d} of record '{rec.record_id}' "
                        f"is no longer in the store")
                external[slot] = d
                input_slots.append(slot)
        output_slots = []
        for d in rec.output_digests:
            slot = f"art_{d[:12]}"
            slot_of[d] = slot
            output_slots.append(slot)
            plan.artifacts[slot] = "bytes"
        plan.steps[sid] = Step(id=sid, component=sid, component_type=rec.operation,
                               binding=binding, params=dict(rec.params),
                               input_slots=input_slots, output_slots=output_slots)
        if prev_sid is not None:
            plan.deps.add((prev_sid, sid))
        prev_sid = sid

    session = run(runtime, plan, external, user, options)
    return session
