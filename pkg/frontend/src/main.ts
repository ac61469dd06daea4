import { ApiClient } from "./api.js";
import { replaceChildrenWith } from "./dom.js";
import { buildNavIndex } from "./nav.js";
import {
  initialState,
  reduce,
  withPaneLoaded,
  type ReaderState,
  type UiAction,
} from "./reducer.js";
import { renderView } from "./render.js";
import type { NodeView } from "./types.js";

/**
 * App shell: one document, one store loop.  Focus changes refetch the view;
 * hover fetches the evidence payload and shows it in a popover anchored at
 * the point's end marker.
 */

const params = new URLSearchParams(window.location.search);
const API_BASE = params.get("api") ?? "http://127.0.0.1:8601";
const DOC_ID = params.get("doc") ?? "";

const api = new ApiClient(API_BASE);
const rootEl = document.getElementById("app") as HTMLElement;
const popoverEl = document.getElementById("popover") as HTMLElement;

let state: ReaderState | null = null;
let currentView: NodeView | null = null;

function rerender(): void {
  if (!state || !currentView) return;
  replaceChildrenWith(rootEl, renderView(currentView, state), dispatch);
}

async function refetchView(): Promise<void> {
  if (!state) return;
  const view = await api.view(state.docId, state.focusedNodeId);
  if (view === null) return; // superseded by a newer focus
  currentView = view;
  state = withPaneLoaded(state, "view");
  rerender();
}

async function showEvidence(nodeId: string, pointIndex: number): Promise<void> {
  if (!state) return;
  try {
    const payload = await api.evidence(state.docId, nodeId, pointIndex);
    if (
      !state.hover ||
      state.hover.nodeId !== nodeId ||
      state.hover.pointIndex !== pointIndex
    ) {
      return; // hover moved on
    }
    state = withPaneLoaded(state, "evidence");
    const kind = payload.anchor?.match_kind ?? "unmatched";
    popoverEl.innerHTML = "";
    const quote = document.createElement("blockquote");
    quote.textContent = payload.source_excerpt;
    const meta = document.createElement("div");
    meta.className = `popover-meta popover-${kind}`;
    meta.textContent =
      kind === "unmatched"
        ? "⚠ evidence not found in the source"
        : `matched: ${kind}`;
    popoverEl.append(quote, meta);
    popoverEl.style.display = "block";
  } catch {
    popoverEl.style.display = "none";
  }
}

function dispatch(action: UiAction): void {
  if (!state) return;
  const next = reduce(state, action);
  if (next === state) return;
  const focusChanged = next.focusedNodeId !== state.focusedNodeId;
  const reloaded = action.type === "reload";
  state = next;
  if (action.type === "hoverPoint") {
    void showEvidence(action.nodeId, action.pointIndex);
  }
  if (action.type === "unhover") {
    popoverEl.style.display = "none";
  }
  rerender();
  if (focusChanged || reloaded) void refetchView();
}

async function boot(): Promise<void> {
  if (!DOC_ID) {
    rootEl.textContent =
      "Pass ?doc=<doc_id> (and optionally &api=<base url>) in the URL. " +
      "Ingest a document first via POST /documents or the CLI.";
    return;
  }
  let handle = await api.handle(DOC_ID);
  while (handle.status === "summarizing" || handle.status === "ingested") {
    await new Promise((resolve) => setTimeout(resolve, 400));
    handle = await api.handle(DOC_ID);
  }
  document.title = `${handle.title} — papertree`;
  const nav = buildNavIndex(await api.navTree(DOC_ID));
  state = initialState(DOC_ID, nav);
  await refetchView();
}

void boot();
