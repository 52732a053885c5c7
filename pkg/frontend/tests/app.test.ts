import { beforeEach, describe, expect, it } from "vitest";

import type { ConceptSummary, EgoGraph, GraphApi, SentenceRecord } from "../src/api.js";
import { ApiError } from "../src/api.js";
import { createApp } from "../src/app.js";
import { condition, edge, graph, waitFor } from "./helpers.js";

class FakeApi implements GraphApi {
  graphs = new Map<string, EgoGraph>();
  failNext = false;
  egoCalls: Array<{ concept: string; predicates: string[] }> = [];

  async concepts(): Promise<ConceptSummary[]> {
    return [];
  }

  async ego(concept: string, predicates: string[] = []): Promise<EgoGraph> {
    this.egoCalls.push({ concept, predicates });
    if (this.failNext) {
      this.failNext = false;
      throw new ApiError("boom", 500);
    }
    const g = this.graphs.get(concept);
    if (!g) {
      return { center: null, edges: [] };
    }
    const edges = predicates.length
      ? g.edges.filter((e) => predicates.includes(e.pred_lemma))
      : g.edges;
    return { center: g.center, edges };
  }

  async sentence(docId: string, sentIndex: number): Promise<SentenceRecord> {
    return { doc_id: docId, sent_index: sentIndex, text: `stored text of ${docId}/${sentIndex}` };
  }
}

function fixtureGraph(): EgoGraph {
  return graph(
    [
      edge({ id: "e1", subj_key: "x1", pred_lemma: "increase", conditions: [condition()] }),
      edge({ id: "e2", subj_key: "x2", pred_lemma: "reduce", conditions: [condition()] }),
      edge({ id: "e3", subj_key: "x3", pred_lemma: "block" }),
    ],
    "apoptosis",
  );
}

let root: HTMLElement;
let api: FakeApi;

beforeEach(() => {
  document.body.innerHTML = "";
  root = document.createElement("div");
  document.body.append(root);
  api = new FakeApi();
  api.graphs.set("apoptosis", fixtureGraph());
});

describe("explorer app", () => {
  it("renders edges with predicate labels and condition badges", async () => {
    const app = createApp(root, api, { useHistory: false });
    await app.search("apoptosis");
    expect(root.querySelectorAll(".edge")).toHaveLength(3);
    expect(root.querySelectorAll(".edge .condition-badge")).toHaveLength(2);
    const labels = [...root.querySelectorAll(".edge .predicate")].map((n) => n.textContent);
    expect(labels.some((l) => l?.startsWith("increase"))).toBe(true);
    app.destroy();
  });

  it("shows the no-facts placeholder for an empty result", async () => {
    const app = createApp(root, api, { useHistory: false });
    await app.search("unknown thing");
    expect(root.querySelector(".placeholder")?.textContent).toBe("no facts found");
    app.destroy();
  });

  it("filter chips refetch with active lemmas and stay visible", async () => {
    const app = createApp(root, api, { useHistory: false });
    await app.search("apoptosis");
    const chip = [...root.querySelectorAll<HTMLButtonElement>(".chip")].find(
      (c) => c.dataset.lemma === "increase",
    )!;
    chip.click();
    await waitFor(() => api.egoCalls.length === 2);
    await waitFor(() => root.querySelectorAll(".edge").length === 1);
    expect(api.egoCalls[1].predicates).toEqual(["increase"]);
    // the reduce chip must still be offered even though its edges are hidden
    const lemmas = [...root.querySelectorAll<HTMLButtonElement>(".chip")].map(
      (c) => c.dataset.lemma,
    );
    expect(lemmas).toContain("reduce");
    app.destroy();
  });

  it("clicking an edge opens the panel with conditions and fetched sentences", async () => {
    const app = createApp(root, api, { useHistory: false });
    await app.search("apoptosis");
    const edgeEl = root.querySelector<SVGGElement>('.edge[data-id="e1"]')!;
    edgeEl.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    await waitFor(() => root.querySelectorAll("#panel .sentence").length > 0);
    expect(root.querySelectorAll("#panel .condition")).toHaveLength(1);
    expect(root.querySelector("#panel .sentence")?.textContent).toContain("stored text of d/0");
    app.destroy();
  });

  it("keeps the previous view and raises a banner when the API fails", async () => {
    const app = createApp(root, api, { useHistory: false });
    await app.search("apoptosis");
    api.failNext = true;
    await app.recenter("x1");
    expect(root.querySelector(".banner.error")?.textContent).toContain("boom");
    expect(root.querySelectorAll(".edge")).toHaveLength(3); // old view retained
    expect(app.state.center).toBe("apoptosis");
    root.querySelector<HTMLButtonElement>(".banner .dismiss")!.click();
    expect(root.querySelector(".banner.error")).toBeNull();
    app.destroy();
  });

  it("clicking a neighbor node re-centers", async () => {
    api.graphs.set("x1", graph([edge({ id: "e9", subj_key: "x1", obj_key: "q" })], "x1"));
    const app = createApp(root, api, { useHistory: false });
    await app.search("apoptosis");
    const node = root.querySelector<SVGGElement>('.node[data-key="x1"]')!;
    node.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    await waitFor(() => app.state.center === "x1");
    expect(root.querySelector(".node.center")?.getAttribute("data-key")).toBe("x1");
    expect(app.state.expanded).toEqual(["apoptosis", "x1"]);
    app.destroy();
  });

  it("never renders edges that are not in the last response", async () => {
    const app = createApp(root, api, { useHistory: false });
    await app.search("apoptosis");
    const ids = [...root.querySelectorAll(".edge")].map((e) => e.getAttribute("data-id"));
    const allowed = new Set(app.state.graph!.edges.map((e) => e.id));
    for (const id of ids) {
      expect(allowed.has(id!)).toBe(true);
    }
    app.destroy();
  });
});
