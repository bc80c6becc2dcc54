/**
 * Canvas model: a client-side mirror of an architecture's structure plus
 * layout and violation overlays. The model is a pure projection of gateway
 * responses — it performs no validation of its own.
 */

import type { Structure, Violation } from "./api.js";

export interface CanvasNode {
  id: string;
  type: string;
  x: number;
  y: number;
}

export interface CanvasEdge {
  from: string;
  to: string;
}

export type OverlayColor = "red" | "amber";

export interface Overlay {
  nodeId: string;
  color: OverlayColor;
  messages: string[];
}

const COLUMN_SPACING = 180;
const ROW_SPACING = 90;

/** Longest-path layering: each node's column is its depth in the dataflow. */
function layerOf(structure: Structure): Map<string, number> {
  const preds = new Map<string, string[]>();
  for (const id of Object.keys(structure.components)) preds.set(id, []);
  for (const [from, to] of structure.dataflow) preds.get(to)?.push(from);
  const memo = new Map<string, number>();
  const depth = (id: string): number => {
    const known = memo.get(id);
    if (known !== undefined) return known;
    memo.set(id, 0); // guard against malformed cyclic input
    const above = (preds.get(id) ?? []).map(depth);
    const value = above.length === 0 ? 0 : Math.max(...above) + 1;
    memo.set(id, value);
    return value;
  };
  for (const id of Object.keys(structure.components)) depth(id);
  return memo;
}

export class CanvasModel {
  readonly nodes: CanvasNode[];
  readonly edges: CanvasEdge[];
  overlays: Overlay[] = [];
  /** Violations whose culprits are not on the canvas; shown in the list panel only. */
  panelOnly: Violation[] = [];

  constructor(structure: Structure) {
    const layers = layerOf(structure);
    const rowsUsed = new Map<number, number>();
    this.nodes = Object.keys(structure.components)
      .sort()
      .map((id) => {
        const column = layers.get(id) ?? 0;
        const row = rowsUsed.get(column) ?? 0;
        rowsUsed.set(column, row + 1);
        return {
          id,
          type: structure.components[id],
          x: column * COLUMN_SPACING,
          y: row * ROW_SPACING,
        };
      });
    this.edges = structure.dataflow.map(([from, to]) => ({ from, to }));
  }

  node(id: string): CanvasNode | undefined {
    return this.nodes.find((n) => n.id === id);
  }

  /** Replace the overlays with the given check/analyze result. */
  applyViolations(violations: Violation[]): void {
    const present = new Set(this.nodes.map((n) => n.id));
    const byNode = new Map<string, Overlay>();
    this.panelOnly = [];
    for (const violation of violations) {
      const onCanvas = violation.culprits.filter((c) => present.has(c));
      if (onCanvas.length === 0) {
        this.panelOnly.push(violation);
        continue;
      }
      const color: OverlayColor =
        violation.severity === "error" ? "red" : "amber";
      for (const nodeId of onCanvas) {
        const existing = byNode.get(nodeId);
        if (existing) {
          existing.messages.push(violation.message);
          if (color === "red") existing.color = "red";
        } else {
          byNode.set(nodeId, { nodeId, color, messages: [violation.message] });
        }
      }
    }
    this.overlays = [...byNode.values()].sort((a, b) =>
      a.nodeId.localeCompare(b.nodeId),
    );
  }

  clearOverlays(): void {
    this.overlays = [];
    this.panelOnly = [];
  }

  /** Green status chip when the last applied result had no violations. */
  get statusChip(): "green" | "issues" {
    return this.overlays.length === 0 && this.panelOnly.length === 0
      ? "green"
      : "issues";
  }
}

/** Order-independent topology key used to compare two canvases. */
export function topologyKey(structure: Structure): string {
  const nodes = Object.entries(structure.components)
    .map(([id, type]) => `${id}:${type}`)
    .sort();
  const edges = structure.dataflow
    .map(([from, to]) => `${from}->${to}`)
    .sort();
  return JSON.stringify({ nodes, edges });
}
