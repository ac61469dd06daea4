import type { RenderNode } from "./render.js";
import type { UiAction } from "./reducer.js";

/** Materialize a RenderNode tree into real DOM, wiring action dispatch. */
export function mount(
  node: RenderNode,
  dispatch: (action: UiAction) => void
): HTMLElement {
  const element = document.createElement(node.tag);
  for (const [name, value] of Object.entries(node.attrs ?? {})) {
    element.setAttribute(name, value);
  }
  if (node.text !== undefined) element.textContent = node.text;
  const action = node.action;
  if (action) {
    if (action.type === "hoverPoint") {
      element.addEventListener("mouseenter", () => dispatch(action));
      element.addEventListener("mouseleave", () => dispatch({ type: "unhover" }));
    } else {
      element.addEventListener("click", (event) => {
        event.stopPropagation();
        dispatch(action);
      });
    }
  }
  for (const child of node.children ?? []) {
    element.appendChild(mount(child, dispatch));
  }
  return element;
}

export function replaceChildrenWith(
  container: HTMLElement,
  node: RenderNode,
  dispatch: (action: UiAction) => void
): void {
  container.replaceChildren(mount(node, dispatch));
}
