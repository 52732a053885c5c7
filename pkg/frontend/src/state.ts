/** View state and its pure transitions.
 *
 * Responses are applied last-write-wins keyed on a request sequence number:
 * a response (or failure) is ignored whenever anything newer has already
 * been applied, so slow stale fetches can never clobber the current view.
 *
 * Invariants kept by every transition:
 *  - the expanded node set always contains the center;
 *  - the selected edge is always one of the currently displayed edges;
 *  - displayed edges come verbatim from the last applied API response.
 */

import type { Direction, EgoGraph } from "./api.js";

export interface ViewState {
  center: string | null;
  filters: string[];
  direction: Direction;
  expanded: string[];
  graph: EgoGraph | null;
  /** every predicate lemma seen since the last fresh search; keeps filter
   * chips visible while a filter hides their edges */
  knownLemmas: string[];
  selectedEdge: string | null;
  error: string | null;
  requestSeq: number;
  appliedSeq: number;
}

export type LoadMode = "search" | "recenter";

export function initialState(): ViewState {
  return {
    center: null,
    filters: [],
    direction: "both",
    expanded: [],
    graph: null,
    knownLemmas: [],
    selectedEdge: null,
    error: null,
    requestSeq: 0,
    appliedSeq: 0,
  };
}

/** Claim the next request sequence number; `state.requestSeq` is the id. */
export function beginRequest(state: ViewState): ViewState {
  return { ...state, requestSeq: state.requestSeq + 1 };
}

export function applyEgo(
  state: ViewState,
  seq: number,
  centerKey: string,
  graph: EgoGraph,
  mode: LoadMode,
): ViewState {
  if (seq <= state.appliedSeq) {
    return state; // a newer response already won
  }
  const expanded =
    mode === "recenter" && state.center !== null
      ? unique([...state.expanded, centerKey])
      : [centerKey];
  const lemmas = graph.edges.map((e) => e.pred_lemma);
  const knownLemmas =
    mode === "recenter" ? unique([...state.knownLemmas, ...lemmas]).sort() : unique(lemmas).sort();
  const selectedEdge =
    state.selectedEdge !== null && graph.edges.some((e) => e.id === state.selectedEdge)
      ? state.selectedEdge
      : null;
  return {
    ...state,
    center: centerKey,
    graph,
    expanded,
    knownLemmas,
    selectedEdge,
    error: null,
    appliedSeq: seq,
  };
}

/** Record a failure: banner only, previous view retained. */
export function applyError(state: ViewState, seq: number, message: string): ViewState {
  if (seq <= state.appliedSeq) {
    return state;
  }
  return { ...state, error: message, appliedSeq: seq };
}

export function dismissError(state: ViewState): ViewState {
  return { ...state, error: null };
}

export function selectEdge(state: ViewState, edgeId: string | null): ViewState {
  if (edgeId === null) {
    return { ...state, selectedEdge: null };
  }
  if (!state.graph || !state.graph.edges.some((e) => e.id === edgeId)) {
    return state; // never select an edge that is not displayed
  }
  return { ...state, selectedEdge: edgeId };
}

export function toggleFilter(state: ViewState, lemma: string): ViewState {
  const filters = state.filters.includes(lemma)
    ? state.filters.filter((f) => f !== lemma)
    : [...state.filters, lemma].sort();
  return { ...state, filters };
}

export function setDirection(state: ViewState, direction: Direction): ViewState {
  return { ...state, direction };
}

function unique(items: string[]): string[] {
  return [...new Set(items)];
}
