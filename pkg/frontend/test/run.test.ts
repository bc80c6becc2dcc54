import { describe, expect, it } from "vitest";

import { GatewayClient } from "../src/api.js";
import { SessionView, badgeSequence } from "../src/run.js";
import { GATEWAY_URL } from "./setup.gateway.js";
import { BINDINGS, EMAIL_WORKFLOW_SOURCE, TOKEN } from "./fixtures.js";

const client = new GatewayClient(GATEWAY_URL, TOKEN);

async function compiledPlan() {
  const { id } = await client.addArchitecture(EMAIL_WORKFLOW_SOURCE);
  const plan = await client.compile(id, BINDINGS);
  return plan;
}

describe("run view", () => {
  it("pauses at a breakpoint with earlier steps inspectable", async () => {
    const plan = await compiledPlan();
    const session = await client.runPlan(plan.plan_id, {
      breakpoints: ["meta"],
    });
    const view = new SessionView();
    view.applySnapshot(session);

    expect(view.status).toBe("Paused");
    expect(view.pausedAt()).toEqual(["meta"]);
    expect(view.doneSteps()).toEqual([
      "config_src",
      "delete",
      "filter",
      "mail",
      "patterns_src",
    ]);

    // artifacts of completed steps can be inspected
    const artifacts = await client.artifacts(session.session_id);
    expect(Object.keys(artifacts).sort()).toEqual(view.inspectableSlots);
    const preview = await client.artifact(session.session_id, "k1");
    expect(preview.content.length).toBeGreaterThan(0);

    // resuming past the breakpoint completes the run
    const resumed = await client.breakpoints(session.session_id, {
      clear: ["meta"],
      resume: true,
    });
    view.applySnapshot(resumed);
    expect(view.status).toBe("Completed");
    expect(view.finished).toBe(true);
    expect(view.inspectableSlots).toContain("topics.report");
  });

  it("steps one node at a time in start mode", async () => {
    const plan = await compiledPlan();
    const session = await client.runPlan(plan.plan_id, { mode: "start" });
    const view = new SessionView();
    view.applySnapshot(session);
    expect(view.doneSteps()).toEqual([]);

    view.applySnapshot(await client.step(session.session_id));
    expect(view.doneSteps()).toEqual(["config_src"]);
    view.applySnapshot(await client.step(session.session_id));
    expect(view.doneSteps()).toEqual(["config_src", "mail"]);
  });

  it("derives the same badges from the event log as from the snapshot", async () => {
    const plan = await compiledPlan();
    const session = await client.runPlan(plan.plan_id, {});
    const events = await client.events(session.session_id);

    const fromEvents = new SessionView();
    // seed the step set as a snapshot with everything pending would
    fromEvents.applySnapshot({ ...session, step_states: session.step_states });
    const replayView = new SessionView();
    replayView.applyEvents(events);

    expect(replayView.status).toBe("Completed");
    for (const [step, badge] of fromEvents.badges) {
      expect(replayView.badges.get(step)).toBe(badge);
    }

    // incremental polling from an offset yields no duplicates
    const offsetEvents = await client.events(
      session.session_id,
      events[4].seq,
    );
    expect(offsetEvents).toEqual(events.slice(5));
  });

  it("badge sequence from the stream matches the polled event log", async () => {
    const plan = await compiledPlan();
    const session = await client.runPlan(plan.plan_id, {});
    const polled = await client.events(session.session_id);
    const streamed = await client.streamEvents(session.session_id);
    expect(badgeSequence(streamed)).toEqual(badgeSequence(polled));
    // every step's final badge in the sequence is terminal
    const finals = new Map(badgeSequence(polled));
    for (const badge of finals.values()) {
      expect(["done", "failed", "skipped"]).toContain(badge);
    }
  });

  it("synthesizes a runnable workflow from the history panel", async () => {
    const plan = await compiledPlan();
    const session = await client.runPlan(plan.plan_id, {});
    expect(session.status).toBe("Completed");

    const synthesized = await client.synthesize("DNA");
    expect(synthesized.source).toContain("architecture");
    // "Generate workflow" opens the result as a new canvas: it must parse
    const opened = await client.addArchitecture(synthesized.source);
    expect(opened.id).toBeTruthy();

    const replayed = await client.replay(session.record_ids);
    expect(replayed.status).toBe("Completed");
    const original = new Set(Object.values(session.slot_digests));
    const after = new Set(Object.values(replayed.slot_digests));
    for (const digest of original) {
      expect(after.has(digest)).toBe(true);
    }
  });
});
