"""End-to-end walkthrough of the email-analysis workflow.

Checks the architecture, runs the security and performance analyses, compiles
it to an execution plan, executes it with a breakpoint, and finally
synthesizes a workflow declaration back out of the invocation history.

Usage: python3 scripts/demo_workflow.py
"""

import json

from euarch import fixtures
from euarch.adl.printer import print_architecture
from euarch.analyses import CostModel, SecurityPolicy, performance_estimate, security_analysis
from euarch.analyses.performance import CostEntry
from euarch.compiler import compile_architecture
from euarch.conformance import check
from euarch.executor import (
    AccessRule, Runtime, RunOptions, User, resume, run, synthesize_workflow,
)


def main():
    arch, style = fixtures.fig5()
    print("== conformance check ==")
    violations = check(arch, style)
    print("violations:", [v.to_dict() for v in violations] or "none")

    print("\n== security analysis (token auth required) ==")
    for v in security_analysis(arch, style, SecurityPolicy(required_auth="token")):
        print(f"  {v.severity}: {v.rule_id}: {v.message}")

    print("\n== performance estimate (unit costs) ==")
    costs = CostModel(entries={t: CostEntry(fixed_seconds=1.0)
                               for t in style.component_types})
    print("  unbounded workers:", performance_estimate(arch, style, {}, costs), "s")
    print("  one worker:       ",
          performance_estimate(arch, style, {}, costs, workers=1), "s")

    print("\n== compile ==")
    plan = compile_architecture(arch, style, fixtures.DNA_BINDINGS)
    print("  plan", plan.plan_id, "steps:", sorted(plan.steps))

    print("\n== execute with a breakpoint before 'meta' ==")
    runtime = Runtime(
        rules=[AccessRule(principal="analyst", resource="*", action="use"),
               AccessRule(principal="analyst", resource="*", action="read")],
        bindings=dict(fixtures.DNA_BINDINGS))
    user = User(name="ann", roles=frozenset({"analyst"}))
    session = run(runtime, plan, {}, user, RunOptions(breakpoints={"meta"}))
    print("  paused:", session.status, json.dumps(session.step_states))
    resume(runtime, session)
    print("  resumed:", session.status)
    report = runtime.store.get(session.slot_digests["topics.report"])
    print("  final report:\n" +
          "\n".join("    " + line for line in report.decode().splitlines()))

    print("\n== synthesize a workflow from the history ==")
    decl = synthesize_workflow(runtime.history.for_user("ann"), style,
                               store=runtime.store)
    print(print_architecture(decl))


if __name__ == "__main__":
    main()
