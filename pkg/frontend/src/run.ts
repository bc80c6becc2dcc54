/**
 * Live run view: per-node execution badges derived from session snapshots
 * and the session event log. A pure projection — the gateway is the single
 * source of truth for states.
 */

import type { SessionEvent, SessionInfo, StepState } from "./api.js";

export type Badge = "pending" | "running" | "done" | "failed" | "skipped";

const BADGE_OF: Record<StepState, Badge> = {
  Pending: "pending",
  Running: "running",
  Done: "done",
  Failed: "failed",
  Skipped: "skipped",
};

export class SessionView {
  status = "Ready";
  badges = new Map<string, Badge>();
  breakpoints = new Set<string>();
  private lastSeq = -1;
  error: string | null = null;
  /** Slots whose artifacts can be inspected (produced by Done steps). */
  inspectableSlots: string[] = [];

  /** Apply a full session snapshot from the gateway. */
  applySnapshot(session: SessionInfo): void {
    this.status = session.status;
    this.error = session.error;
    this.breakpoints = new Set(session.breakpoints);
    this.badges = new Map(
      Object.entries(session.step_states).map(([id, state]) => [
        id,
        BADGE_OF[state],
      ]),
    );
    this.inspectableSlots = Object.keys(session.slot_digests).sort();
  }

  /** Apply incremental events (from polling or the SSE stream). */
  applyEvents(events: SessionEvent[]): void {
    for (const event of events) {
      if (event.seq <= this.lastSeq) continue;
      this.lastSeq = event.seq;
      if (event.kind === "status" || event.kind === "session") {
        this.status = event.state;
      } else if (event.kind === "step" && event.step) {
        this.badges.set(event.step, BADGE_OF[event.state as StepState]);
      }
    }
  }

  /** The offset to pass to the next events poll. */
  get nextPollAfter(): number {
    return this.lastSeq;
  }

  /** Steps the session is currently paused in front of. */
  pausedAt(): string[] {
    if (this.status !== "Paused") return [];
    return [...this.breakpoints]
      .filter((step) => this.badges.get(step) === "pending")
      .sort();
  }

  /** Step ids whose work finished and whose outputs are inspectable. */
  doneSteps(): string[] {
    return [...this.badges.entries()]
      .filter(([, badge]) => badge === "done")
      .map(([id]) => id)
      .sort();
  }

  get finished(): boolean {
    return this.status === "Completed" || this.status === "Failed";
  }
}

/** The (step, state) sequence a badge display would animate through. */
export function badgeSequence(events: SessionEvent[]): [string, Badge][] {
  return events
    .filter((e) => e.kind === "step" && e.step)
    .map((e) => [e.step as string, BADGE_OF[e.state as StepState]]);
}
