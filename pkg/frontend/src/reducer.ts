import { canDescend, type NavIndex } from "./nav.js";

/**
 * Reader state and the pure reducer over serializable UI actions.
 *
 * The navigation tree is fetched once per document and lives on the state;
 * node views and evidence payloads are fetched per focus change by the app
 * shell and are not part of reducer state.  Invalid actions are no-ops and
 * return the same state reference.
 */

export interface ReaderState {
  docId: string;
  nav: NavIndex;
  focusedNodeId: string;
  expandedNavIds: ReadonlySet<string>;
  hover: { nodeId: string; pointIndex: number } | null;
  loading: { view: boolean; evidence: boolean };
}

export type UiAction =
  | { type: "descend"; childId: string }
  | { type: "ascend" }
  | { type: "focusNav"; nodeId: string }
  | { type: "toggleNav"; nodeId: string }
  | { type: "hoverPoint"; nodeId: string; pointIndex: number }
  | { type: "unhover" }
  | { type: "reload" };

export function initialState(docId: string, nav: NavIndex): ReaderState {
  return {
    docId,
    nav,
    focusedNodeId: nav.rootId,
    expandedNavIds: new Set([nav.rootId]),
    hover: null,
    loading: { view: true, evidence: false },
  };
}

function focusOn(state: ReaderState, nodeId: string): ReaderState {
  return {
    ...state,
    focusedNodeId: nodeId,
    hover: null,
    loading: { ...state.loading, view: true, evidence: false },
  };
}

export function reduce(state: ReaderState, action: UiAction): ReaderState {
  const { nav } = state;
  switch (action.type) {
    case "descend": {
      const focused = nav.nodes.get(state.focusedNodeId);
      if (!focused) return state;
      if (!focused.childIds.includes(action.childId)) return state;
      if (!canDescend(nav, action.childId)) return state;
      return focusOn(state, action.childId);
    }
    case "ascend": {
      const focused = nav.nodes.get(state.focusedNodeId);
      if (!focused || focused.parentId === null) return state; // root: no-op
      return focusOn(state, focused.parentId);
    }
    case "focusNav": {
      if (!nav.nodes.has(action.nodeId)) return state;
      if (action.nodeId === state.focusedNodeId) return state;
      return focusOn(state, action.nodeId);
    }
    case "toggleNav": {
      const entry = nav.nodes.get(action.nodeId);
      if (!entry || entry.childIds.length === 0) return state;
      const expanded = new Set(state.expandedNavIds);
      if (expanded.has(action.nodeId)) expanded.delete(action.nodeId);
      else expanded.add(action.nodeId);
      return { ...state, expandedNavIds: expanded };
    }
    case "hoverPoint": {
      if (!nav.nodes.has(action.nodeId) || action.pointIndex < 0) return state;
      return {
        ...state,
        hover: { nodeId: action.nodeId, pointIndex: action.pointIndex },
        loading: { ...state.loading, evidence: true },
      };
    }
    case "unhover": {
      if (state.hover === null && !state.loading.evidence) return state;
      return {
        ...state,
        hover: null,
        loading: { ...state.loading, evidence: false },
      };
    }
    case "reload":
      return { ...state, loading: { ...state.loading, view: true } };
  }
}

/** Shell helper: mark the in-flight pane fetch as settled. */
export function withPaneLoaded(
  state: ReaderState,
  pane: "view" | "evidence"
): ReaderState {
  if (!state.loading[pane]) return state;
  return { ...state, loading: { ...state.loading, [pane]: false } };
}
