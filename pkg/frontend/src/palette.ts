/**
 * Repository palette: groups gateway search results into an ontology tree
 * with a parameter-count badge per entry. Filtering is done by the gateway;
 * this module only arranges the returned entries for display.
 */

import type { RepoEntry } from "./api.js";

export interface PaletteItem {
  entryId: string;
  name: string;
  version: number;
  paramCountBadge: number;
  description: string;
  produces: string[];
  consumes: string[];
}

export interface PaletteCategory {
  name: string;
  path: string[];
  children: PaletteCategory[];
  items: PaletteItem[];
}

export interface PaletteTree {
  root: PaletteCategory | null;
  /** True when the repository returned no entries at all. */
  emptyState: boolean;
}

function toItem(entry: RepoEntry): PaletteItem {
  return {
    entryId: entry.entry_id,
    name: entry.name,
    version: entry.version,
    paramCountBadge: entry.metadata.param_count,
    description: entry.metadata.description,
    produces: entry.metadata.produces,
    consumes: entry.metadata.consumes,
  };
}

export function buildPaletteTree(entries: RepoEntry[]): PaletteTree {
  if (entries.length === 0) return { root: null, emptyState: true };
  const rootName = entries[0].metadata.ontology_path[0] ?? "root";
  const root: PaletteCategory = {
    name: rootName,
    path: [rootName],
    children: [],
    items: [],
  };
  for (const entry of entries) {
    const path = entry.metadata.ontology_path;
    let node = root;
    for (const name of path.slice(1)) {
      let child = node.children.find((c) => c.name === name);
      if (!child) {
        child = { name, path: [...node.path, name], children: [], items: [] };
        node.children.push(child);
        node.children.sort((a, b) => a.name.localeCompare(b.name));
      }
      node = child;
    }
    node.items.push(toItem(entry));
  }
  const sortItems = (node: PaletteCategory): void => {
    node.items.sort(
      (a, b) => a.name.localeCompare(b.name) || b.version - a.version,
    );
    node.children.forEach(sortItems);
  };
  sortItems(root);
  return { root, emptyState: false };
}

/** Flatten a tree back into display order (pre-order walk). */
export function flattenItems(tree: PaletteTree): PaletteItem[] {
  if (!tree.root) return [];
  const out: PaletteItem[] = [];
  const walk = (node: PaletteCategory): void => {
    out.push(...node.items);
    node.children.forEach(walk);
  };
  walk(tree.root);
  return out;
}

/** Find the category node at the given ontology path, if present. */
export function categoryAt(
  tree: PaletteTree,
  path: string[],
): PaletteCategory | undefined {
  let node = tree.root ?? undefined;
  if (!node || node.name !== path[0]) return undefined;
  for (const name of path.slice(1)) {
    node = node?.children.find((c) => c.name === name);
    if (!node) return undefined;
  }
  return node;
}
