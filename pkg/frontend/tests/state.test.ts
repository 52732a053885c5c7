import { describe, expect, it } from "vitest";

import {
  applyEgo,
  applyError,
  beginRequest,
  dismissError,
  initialState,
  selectEdge,
  setDirection,
  toggleFilter,
} from "../src/state.js";
import { edge, graph } from "./helpers.js";

describe("view state transitions", () => {
  it("applies a fresh ego response and centers on it", () => {
    let s = beginRequest(initialState());
    const g = graph([edge({ id: "e1" })], "apoptosis");
    s = applyEgo(s, s.requestSeq, "apoptosis", g, "search");
    expect(s.center).toBe("apoptosis");
    expect(s.graph).toBe(g);
    expect(s.expanded).toContain("apoptosis");
    expect(s.error).toBeNull();
  });

  it("ignores stale responses: last write wins by sequence number", () => {
    let s = initialState();
    s = beginRequest(s);
    const oldSeq = s.requestSeq;
    s = beginRequest(s);
    const newSeq = s.requestSeq;
    const fresh = graph([edge({ id: "new" })], "fresh");
    s = applyEgo(s, newSeq, "fresh", fresh, "search");
    const stale = graph([edge({ id: "old" })], "stale");
    const after = applyEgo(s, oldSeq, "stale", stale, "search");
    expect(after).toBe(s);
    expect(after.center).toBe("fresh");
  });

  it("recentering accumulates the expanded set and always keeps the center", () => {
    let s = beginRequest(initialState());
    s = applyEgo(s, s.requestSeq, "a", graph([edge({ id: "e1" })], "a"), "search");
    s = beginRequest(s);
    s = applyEgo(s, s.requestSeq, "b", graph([edge({ id: "e2" })], "b"), "recenter");
    expect(s.expanded).toEqual(["a", "b"]);
    expect(s.expanded).toContain(s.center!);
    // a fresh search resets the trail
    s = beginRequest(s);
    s = applyEgo(s, s.requestSeq, "c", graph([], "c"), "search");
    expect(s.expanded).toEqual(["c"]);
  });

  it("keeps the previous view on errors, only raising a banner", () => {
    let s = beginRequest(initialState());
    const g = graph([edge({ id: "e1" })], "a");
    s = applyEgo(s, s.requestSeq, "a", g, "search");
    s = beginRequest(s);
    s = applyError(s, s.requestSeq, "network error");
    expect(s.error).toBe("network error");
    expect(s.graph).toBe(g);
    expect(s.center).toBe("a");
    s = dismissError(s);
    expect(s.error).toBeNull();
  });

  it("stale errors are dropped after a newer response applied", () => {
    let s = initialState();
    s = beginRequest(s);
    const oldSeq = s.requestSeq;
    s = beginRequest(s);
    s = applyEgo(s, s.requestSeq, "a", graph([], "a"), "search");
    const after = applyError(s, oldSeq, "slow failure");
    expect(after.error).toBeNull();
  });

  it("only displayed edges are selectable", () => {
    let s = beginRequest(initialState());
    s = applyEgo(s, s.requestSeq, "a", graph([edge({ id: "e1" })], "a"), "search");
    s = selectEdge(s, "e1");
    expect(s.selectedEdge).toBe("e1");
    const unchanged = selectEdge(s, "ghost");
    expect(unchanged.selectedEdge).toBe("e1");
    expect(selectEdge(s, null).selectedEdge).toBeNull();
  });

  it("drops the selection when a new response no longer contains the edge", () => {
    let s = beginRequest(initialState());
    s = applyEgo(s, s.requestSeq, "a", graph([edge({ id: "e1" })], "a"), "search");
    s = selectEdge(s, "e1");
    s = beginRequest(s);
    s = applyEgo(s, s.requestSeq, "a", graph([edge({ id: "e2" })], "a"), "recenter");
    expect(s.selectedEdge).toBeNull();
  });

  it("toggles predicate filters and keeps them sorted", () => {
    let s = initialState();
    s = toggleFilter(s, "reduce");
    s = toggleFilter(s, "increase");
    expect(s.filters).toEqual(["increase", "reduce"]);
    s = toggleFilter(s, "reduce");
    expect(s.filters).toEqual(["increase"]);
  });

  it("changes direction", () => {
    const s = setDirection(initialState(), "in");
    expect(s.direction).toBe("in");
  });

  it("remembers lemmas across filtered refetches of the same center", () => {
    let s = beginRequest(initialState());
    const full = graph(
      [edge({ id: "e1", pred_lemma: "increase" }), edge({ id: "e2", pred_lemma: "reduce" })],
      "a",
    );
    s = applyEgo(s, s.requestSeq, "a", full, "search");
    expect(s.knownLemmas).toEqual(["increase", "reduce"]);
    s = beginRequest(s);
    const filtered = graph([edge({ id: "e1", pred_lemma: "increase" })], "a");
    s = applyEgo(s, s.requestSeq, "a", filtered, "recenter");
    expect(s.knownLemmas).toEqual(["increase", "reduce"]);
    // fresh search resets
    s = beginRequest(s);
    s = applyEgo(s, s.requestSeq, "z", graph([edge({ id: "e9", pred_lemma: "block" })], "z"), "search");
    expect(s.knownLemmas).toEqual(["block"]);
  });
});
