import { buildNavIndex, type NavIndex } from "../src/nav.js";
import type { NavNodeWire } from "../src/types.js";

/** Deterministic PRNG so fuzzed runs are reproducible. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function randomInt(rng: () => number, lo: number, hi: number): number {
  return lo + Math.floor(rng() * (hi - lo + 1));
}

export function pick<T>(rng: () => number, items: T[]): T {
  return items[Math.floor(rng() * items.length)];
}

let nodeCounter = 0;

function makeSection(
  rng: () => number,
  depth: number,
  maxDepth: number
): NavNodeWire {
  const id = `n${nodeCounter++}`;
  const children: NavNodeWire[] = [];
  const childCount = depth >= maxDepth ? 0 : randomInt(rng, 0, 4);
  for (let i = 0; i < childCount; i++) {
    const roll = rng();
    if (roll < 0.45 && depth + 1 < maxDepth) {
      children.push(makeSection(rng, depth + 1, maxDepth));
    } else if (roll < 0.8) {
      children.push({
        id: `n${nodeCounter++}`,
        kind: "paragraph",
        title: "¶",
        children: [],
      });
    } else {
      children.push({
        id: `n${nodeCounter++}`,
        kind: rng() < 0.5 ? "figure" : "table",
        title: `Figure chip ${nodeCounter}`,
        children: [],
      });
    }
  }
  return { id, kind: "section", title: `Section ${id}`, children };
}

export function randomNav(seed: number, maxDepth = 4): NavIndex {
  const rng = mulberry32(seed);
  nodeCounter = 0;
  const root = makeSection(rng, 0, maxDepth);
  // guarantee at least one descendable child under the root
  if (root.children.length === 0) {
    root.children.push({
      id: `n${nodeCounter++}`,
      kind: "paragraph",
      title: "¶",
      children: [],
    });
  }
  return buildNavIndex(root);
}
