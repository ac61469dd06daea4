import type { NavNodeWire } from "./types.js";

/** Flattened navigation tree with parent links for O(1) lookups. */
export interface NavEntry {
  id: string;
  kind: NavNodeWire["kind"];
  title: string;
  childIds: string[];
  parentId: string | null;
}

export interface NavIndex {
  rootId: string;
  nodes: Map<string, NavEntry>;
}

export function buildNavIndex(root: NavNodeWire): NavIndex {
  const nodes = new Map<string, NavEntry>();
  const walk = (node: NavNodeWire, parentId: string | null): void => {
    nodes.set(node.id, {
      id: node.id,
      kind: node.kind,
      title: node.title,
      childIds: node.children.map((c) => c.id),
      parentId,
    });
    for (const child of node.children) walk(child, node.id);
  };
  walk(root, null);
  return { rootId: root.id, nodes };
}

/** A node is descendable when it is a section with at least one child. */
export function canDescend(nav: NavIndex, id: string): boolean {
  const entry = nav.nodes.get(id);
  return !!entry && entry.kind === "section" && entry.childIds.length > 0;
}

export function pathFromRoot(nav: NavIndex, id: string): string[] {
  const path: string[] = [];
  let cursor: string | null = id;
  const seen = new Set<string>();
  while (cursor !== null && !seen.has(cursor)) {
    seen.add(cursor);
    path.push(cursor);
    cursor = nav.nodes.get(cursor)?.parentId ?? null;
  }
  return path.reverse();
}
