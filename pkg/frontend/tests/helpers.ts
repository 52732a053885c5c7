import type { ConditionRecord, EgoEdge, EgoGraph } from "../src/api.js";

export function edge(partial: Partial<EgoEdge> & { id: string }): EgoEdge {
  return {
    subj_key: "a",
    pred_lemma: "increase",
    obj_key: "b",
    pred_surfaces: { increases: 1 },
    support: 1,
    max_confidence: 1,
    conditions: [],
    provenance: [{ doc_id: "d", sent_index: 0 }],
    sentences: [{ doc_id: "d", sent_index: 0, text: "a increases b." }],
    ...partial,
  };
}

export function condition(partial: Partial<ConditionRecord> = {}): ConditionRecord {
  return { subj_key: "b", pred: "in", obj_key: "cells", count: 1, ...partial };
}

export function graph(edges: EgoEdge[], centerKey = "b"): EgoGraph {
  return {
    center: { key: centerKey, display: centerKey, freq: edges.length },
    edges,
  };
}

export async function waitFor(
  predicate: () => boolean,
  timeoutMs = 10_000,
  stepMs = 25,
): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (predicate()) {
      return;
    }
    await new Promise((resolve) => setTimeout(resolve, stepMs));
  }
  throw new Error("waitFor: condition not met in time");
}
