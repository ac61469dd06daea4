import type { NavIndex } from "./nav.js";
import type { ReaderState, UiAction } from "./reducer.js";
import type { CardWire, KeyPointWire, NodeView } from "./types.js";

/**
 * Declarative render layer: a NodeView plus ReaderState becomes a tree of
 * plain RenderNode records.  The DOM mounter (dom.ts) materializes them;
 * tests assert on the records directly.
 *
 * Law: exactly one card element per view card, in order; every key point
 * carries a hover affordance at its end; unmatched anchors carry a warning
 * badge.
 */

export interface RenderNode {
  tag: string;
  attrs?: Record<string, string>;
  text?: string;
  action?: UiAction;
  children?: RenderNode[];
}

function el(
  tag: string,
  attrs?: Record<string, string>,
  children?: RenderNode[],
  text?: string,
  action?: UiAction
): RenderNode {
  const node: RenderNode = { tag };
  if (attrs) node.attrs = attrs;
  if (children) node.children = children;
  if (text !== undefined) node.text = text;
  if (action) node.action = action;
  return node;
}

function renderPoint(card: CardWire, point: KeyPointWire, index: number): RenderNode {
  const children: RenderNode[] = [
    el("span", { class: "point-text" }, undefined, point.point_text),
  ];
  if (point.anchor && point.anchor.match_kind === "unmatched") {
    children.push(
      el(
        "span",
        { class: "badge-unmatched", title: "evidence not found in source" },
        undefined,
        "⚠ unverified"
      )
    );
  }
  // hover affordance sits at the end of the point, per the reading flow
  children.push(
    el(
      "span",
      { class: "evidence-hotspot", "data-point-index": String(index) },
      undefined,
      "ⓘ",
      { type: "hoverPoint", nodeId: card.child_id, pointIndex: index }
    )
  );
  return el("li", { class: "key-point" }, children);
}

function renderCard(nav: NavIndex, card: CardWire): RenderNode {
  const children: RenderNode[] = [
    el(
      "div",
      { class: `card-title card-kind-${card.kind}` },
      undefined,
      card.display_title
    ),
  ];
  if (card.key_points.length > 0) {
    children.push(
      el(
        "ul",
        { class: "card-points" },
        card.key_points.map((p, i) => renderPoint(card, p, i))
      )
    );
  } else if (card.kind === "section" || card.kind === "paragraph") {
    children.push(
      el("div", { class: "card-placeholder" }, undefined, "summarizing…")
    );
  }
  if (card.can_descend) {
    children.push(
      el(
        "button",
        { class: "descend-button" },
        undefined,
        "→",
        { type: "descend", childId: card.child_id }
      )
    );
  }
  return el(
    "div",
    { class: "card", "data-child-id": card.child_id },
    children
  );
}

function renderNav(state: ReaderState): RenderNode {
  const { nav } = state;
  const renderEntry = (id: string): RenderNode => {
    const entry = nav.nodes.get(id);
    if (!entry) return el("li");
    const expanded = state.expandedNavIds.has(id);
    const label = entry.kind === "paragraph" ? "¶" : entry.title;
    const row: RenderNode[] = [];
    if (entry.childIds.length > 0) {
      row.push(
        el(
          "span",
          { class: "nav-toggle" },
          undefined,
          expanded ? "▾" : "▸",
          { type: "toggleNav", nodeId: id }
        )
      );
    }
    row.push(
      el(
        "span",
        {
          class:
            id === state.focusedNodeId ? "nav-label nav-focused" : "nav-label",
        },
        undefined,
        label,
        { type: "focusNav", nodeId: id }
      )
    );
    const children: RenderNode[] = [el("div", { class: "nav-row" }, row)];
    if (expanded && entry.childIds.length > 0) {
      children.push(
        el("ul", { class: "nav-children" }, entry.childIds.map(renderEntry))
      );
    }
    return el("li", { class: "nav-entry", "data-node-id": id }, children);
  };
  return el("ul", { class: "nav-tree" }, [renderEntry(nav.rootId)]);
}

function renderContextual(state: ReaderState, view: NodeView): RenderNode {
  const { nav } = state;
  const figures = el(
    "div",
    { class: "contextual-figures" },
    view.contextual.figures.map((figureId) =>
      el(
        "div",
        { class: "figure-chip", "data-node-id": figureId },
        undefined,
        nav.nodes.get(figureId)?.title ?? figureId
      )
    )
  );
  const panel = view.contextual.source_panel;
  const source =
    panel.kind === "text"
      ? el("div", { class: "source-text" }, undefined, panel.text)
      : el(
          "div",
          { class: "source-children" },
          panel.entries.map((entry) =>
            el("div", { class: "source-entry" }, [
              el("div", { class: "source-entry-title" }, undefined, entry.title),
              el(
                "ul",
                { class: "source-entry-points" },
                entry.points.map((p) =>
                  el("li", undefined, undefined, p)
                )
              ),
            ])
          )
        );
  return el("div", { class: "contextual-pane" }, [figures, source]);
}

export function renderView(view: NodeView, state: ReaderState): RenderNode {
  const breadcrumb = el(
    "div",
    { class: "breadcrumb" },
    view.breadcrumb.map((crumb) =>
      el(
        "span",
        { class: "crumb", "data-node-id": crumb.id },
        undefined,
        crumb.title,
        { type: "focusNav", nodeId: crumb.id }
      )
    )
  );
  const cards = el(
    "div",
    { class: "card-list" },
    view.cards.map((card) => renderCard(state.nav, card))
  );
  const ascend = el(
    "button",
    view.parent_id === null
      ? { class: "ascend-button", disabled: "disabled" }
      : { class: "ascend-button" },
    undefined,
    "←",
    view.parent_id === null ? undefined : { type: "ascend" }
  );
  const middle = el("div", { class: "main-pane" }, [
    breadcrumb,
    cards,
    el("div", { class: "nav-buttons" }, [ascend]),
  ]);
  return el("div", { class: "reader" }, [
    el("div", { class: "nav-pane" }, [renderNav(state)]),
    middle,
    renderContextual(state, view),
  ]);
}

export function collectByClass(root: RenderNode, className: string): RenderNode[] {
  const found: RenderNode[] = [];
  const walk = (node: RenderNode): void => {
    const classes = (node.attrs?.class ?? "").split(/\s+/);
    if (classes.includes(className)) found.push(node);
    for (const child of node.children ?? []) walk(child);
  };
  walk(root);
  return found;
}
