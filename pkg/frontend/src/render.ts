/** DOM rendering: toolbar, SVG ego graph, condition/provenance panel.
 *
 * Rendering is a full redraw from (state, details); nothing is drawn that is
 * not present in the last applied API response.
 */

import type { SentenceRecord } from "./api.js";
import { layoutEgo } from "./layout.js";
import type { ViewState } from "./state.js";

const SVG_NS = "http://www.w3.org/2000/svg";
export const GRAPH_WIDTH = 860;
export const GRAPH_HEIGHT = 560;

export interface EdgeDetails {
  edgeId: string | null;
  sentences: SentenceRecord[] | null; // null while the fetch is in flight
}

export interface Handlers {
  onSearch(term: string): void;
  onToggleFilter(lemma: string): void;
  onDirection(direction: "in" | "out" | "both"): void;
  onRecenter(key: string): void;
  onSelectEdge(id: string): void;
  onDismissError(): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function svgEl(tag: string, attrs: Record<string, string>): SVGElement {
  const node = document.createElementNS(SVG_NS, tag) as SVGElement;
  for (const [k, v] of Object.entries(attrs)) {
    node.setAttribute(k, v);
  }
  return node;
}

/** Predicate lemmas offered as filter chips: everything seen since the last
 * fresh search plus anything already active. */
export function filterChips(state: ViewState): string[] {
  return [...new Set([...state.knownLemmas, ...state.filters])].sort();
}

function renderToolbar(state: ViewState, handlers: Handlers): HTMLElement {
  const bar = el("div", "toolbar");

  const form = el("form", "search");
  const input = el("input");
  input.type = "search";
  input.id = "concept-input";
  input.placeholder = "concept, e.g. apoptosis";
  input.value = state.center ?? "";
  const button = el("button", "", "Search");
  button.type = "submit";
  form.append(input, button);
  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    if (input.value.trim()) handlers.onSearch(input.value.trim());
  });
  bar.append(form);

  const chips = el("div", "chips");
  for (const lemma of filterChips(state)) {
    const active = state.filters.includes(lemma);
    const chip = el("button", active ? "chip active" : "chip", lemma);
    chip.type = "button";
    chip.dataset.lemma = lemma;
    chip.addEventListener("click", () => handlers.onToggleFilter(lemma));
    chips.append(chip);
  }
  bar.append(chips);

  const select = el("select", "direction");
  for (const dir of ["both", "in", "out"] as const) {
    const opt = el("option", "", dir);
    opt.value = dir;
    opt.selected = dir === state.direction;
    select.append(opt);
  }
  select.addEventListener("change", () => {
    handlers.onDirection(select.value as "in" | "out" | "both");
  });
  bar.append(select);
  return bar;
}

function renderGraph(state: ViewState, handlers: Handlers): HTMLElement {
  const wrap = el("div", "graph-wrap");
  if (!state.graph || !state.center) {
    wrap.append(el("div", "placeholder", "search for a concept to explore its facts"));
    return wrap;
  }
  if (state.graph.edges.length === 0) {
    wrap.append(el("div", "placeholder", "no facts found"));
    return wrap;
  }

  const layout = layoutEgo(state.graph, state.center, GRAPH_WIDTH, GRAPH_HEIGHT);
  const svg = svgEl("svg", {
    id: "graph",
    viewBox: `0 0 ${GRAPH_WIDTH} ${GRAPH_HEIGHT}`,
    width: String(GRAPH_WIDTH),
    height: String(GRAPH_HEIGHT),
  });

  for (const edge of layout.edges) {
    const group = svgEl("g", { class: "edge", "data-id": edge.id });
    if (state.selectedEdge === edge.id) {
      group.setAttribute("class", "edge selected");
    }
    group.append(
      svgEl("line", {
        x1: String(edge.x1),
        y1: String(edge.y1),
        x2: String(edge.x2),
        y2: String(edge.y2),
      }),
    );
    const label = svgEl("text", {
      class: "predicate",
      x: String(edge.labelX),
      y: String(edge.labelY),
      "text-anchor": "middle",
    });
    label.textContent = `${edge.predicate} (${edge.support})`;
    group.append(label);
    if (edge.hasConditions) {
      const badge = svgEl("text", {
        class: "condition-badge",
        x: String(edge.labelX),
        y: String(edge.labelY + 16),
        "text-anchor": "middle",
      });
      badge.textContent = "⚑ conditional";
      group.append(badge);
    }
    group.addEventListener("click", () => handlers.onSelectEdge(edge.id));
    svg.append(group);
  }

  for (const node of layout.nodes) {
    const group = svgEl("g", {
      class: node.isCenter ? "node center" : "node",
      "data-key": node.key,
    });
    group.append(
      svgEl("circle", {
        cx: String(node.x),
        cy: String(node.y),
        r: node.isCenter ? "34" : "26",
      }),
    );
    const label = svgEl("text", {
      x: String(node.x),
      y: String(node.y + (node.isCenter ? 52 : 42)),
      "text-anchor": "middle",
    });
    label.textContent = node.key;
    group.append(label);
    if (!node.isCenter) {
      group.addEventListener("click", () => handlers.onRecenter(node.key));
    }
    svg.append(group);
  }
  wrap.append(svg);
  return wrap;
}

function renderPanel(state: ViewState, details: EdgeDetails): HTMLElement {
  const panel = el("aside", "panel");
  panel.id = "panel";
  const edge = state.graph?.edges.find((e) => e.id === state.selectedEdge);
  if (!edge) {
    panel.append(el("p", "hint", "click an edge to inspect its conditions and sources"));
    return panel;
  }
  const subj = edge.subj_attr ? `${edge.subj_key}:${edge.subj_attr}` : edge.subj_key;
  const obj = edge.obj_attr ? `${edge.obj_key}:${edge.obj_attr}` : edge.obj_key;
  panel.append(el("h2", "", `${subj} —${edge.pred_lemma}→ ${obj}`));
  panel.append(
    el(
      "p",
      "meta",
      `support ${edge.support} · surfaces ${Object.keys(edge.pred_surfaces).join(", ")}`,
    ),
  );

  panel.append(el("h3", "", "Conditions"));
  if (edge.conditions.length === 0) {
    panel.append(el("p", "hint", "no recorded conditions"));
  } else {
    const list = el("ul", "conditions");
    for (const cond of edge.conditions) {
      const cs = cond.subj_attr ? `${cond.subj_key}:${cond.subj_attr}` : cond.subj_key;
      const co = cond.obj_attr ? `${cond.obj_key}:${cond.obj_attr}` : cond.obj_key;
      list.append(el("li", "condition", `${cs} —${cond.pred}→ ${co} (×${cond.count})`));
    }
    panel.append(list);
  }

  panel.append(el("h3", "", "Provenance"));
  if (details.edgeId !== edge.id || details.sentences === null) {
    panel.append(el("p", "hint loading", "loading sentences…"));
  } else if (details.sentences.length === 0) {
    panel.append(el("p", "hint", "no sentences available"));
  } else {
    const list = el("ul", "sentences");
    for (const s of details.sentences) {
      list.append(el("li", "sentence", `${s.text} [${s.doc_id}/${s.sent_index}]`));
    }
    panel.append(list);
  }
  return panel;
}

export function render(
  root: HTMLElement,
  state: ViewState,
  details: EdgeDetails,
  handlers: Handlers,
): void {
  root.textContent = "";
  root.append(renderToolbar(state, handlers));
  if (state.error !== null) {
    const banner = el("div", "banner error");
    banner.append(el("span", "", state.error));
    const dismiss = el("button", "dismiss", "×");
    dismiss.type = "button";
    dismiss.addEventListener("click", () => handlers.onDismissError());
    banner.append(dismiss);
    root.append(banner);
  }
  const main = el("div", "content");
  main.append(renderGraph(state, handlers));
  main.append(renderPanel(state, details));
  root.append(main);
}
