/** Explorer application: wires the API client, view state, rendering and
 * browser history together.  Pure logic lives in state.ts/layout.ts; this
 * module owns side effects (fetches, DOM, pushState).
 */

import { ApiError } from "./api.js";
import type { Direction, GraphApi, SentenceRecord } from "./api.js";
import { render } from "./render.js";
import type { EdgeDetails } from "./render.js";
import {
  applyEgo,
  applyError,
  beginRequest,
  dismissError,
  initialState,
  selectEdge,
  setDirection,
  toggleFilter,
} from "./state.js";
import type { LoadMode, ViewState } from "./state.js";

export interface AppOptions {
  /** push center changes onto the browser history (default true) */
  useHistory?: boolean;
  /** provenance sentences fetched per edge selection */
  maxSentences?: number;
}

export class ExplorerApp {
  state: ViewState = initialState();
  private details: EdgeDetails = { edgeId: null, sentences: null };
  private detailSeq = 0;
  private readonly useHistory: boolean;
  private readonly maxSentences: number;
  private readonly popStateListener: (ev: PopStateEvent) => void;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: GraphApi,
    options: AppOptions = {},
  ) {
    this.useHistory = options.useHistory ?? true;
    this.maxSentences = options.maxSentences ?? 5;
    this.popStateListener = (ev: PopStateEvent) => {
      const concept = (ev.state && (ev.state as { concept?: string }).concept) || null;
      if (concept) {
        void this.load(concept, "search", false);
      }
    };
    if (this.useHistory && typeof window !== "undefined") {
      window.addEventListener("popstate", this.popStateListener);
    }
    this.render();
  }

  destroy(): void {
    if (this.useHistory && typeof window !== "undefined") {
      window.removeEventListener("popstate", this.popStateListener);
    }
  }

  search(concept: string): Promise<void> {
    return this.load(concept, "search", true);
  }

  recenter(key: string): Promise<void> {
    return this.load(key, "recenter", true);
  }

  async toggleFilter(lemma: string): Promise<void> {
    this.state = toggleFilter(this.state, lemma);
    this.render();
    if (this.state.center) {
      await this.load(this.state.center, "recenter", false);
    }
  }

  async setDirection(direction: Direction): Promise<void> {
    this.state = setDirection(this.state, direction);
    this.render();
    if (this.state.center) {
      await this.load(this.state.center, "recenter", false);
    }
  }

  async selectEdge(edgeId: string): Promise<void> {
    this.state = selectEdge(this.state, edgeId);
    if (this.state.selectedEdge !== edgeId) {
      return; // not a displayed edge
    }
    const edge = this.state.graph?.edges.find((e) => e.id === edgeId);
    if (!edge) {
      return;
    }
    const seq = ++this.detailSeq;
    this.details = { edgeId, sentences: null };
    this.render();

    // The ego response already carries sentence texts; re-fetch through the
    // sentence endpoint so the panel always shows the stored source text.
    const refs = edge.provenance.slice(0, this.maxSentences);
    try {
      const sentences: SentenceRecord[] = [];
      for (const ref of refs) {
        sentences.push(await this.api.sentence(ref.doc_id, ref.sent_index));
      }
      if (seq === this.detailSeq) {
        this.details = { edgeId, sentences };
        this.render();
      }
    } catch (err) {
      if (seq === this.detailSeq) {
        this.details = { edgeId, sentences: edge.sentences ?? [] };
        this.state = { ...this.state, error: describe(err) };
        this.render();
      }
    }
  }

  dismissError(): void {
    this.state = dismissError(this.state);
    this.render();
  }

  private async load(concept: string, mode: LoadMode, push: boolean): Promise<void> {
    this.state = beginRequest(this.state);
    const seq = this.state.requestSeq;
    try {
      const graph = await this.api.ego(
        concept,
        this.state.filters,
        this.state.direction,
      );
      const centerKey = graph.center ? graph.center.key : concept.trim().toLowerCase();
      const before = this.state.center;
      this.state = applyEgo(this.state, seq, centerKey, graph, mode);
      if (this.state.selectedEdge === null) {
        this.details = { edgeId: null, sentences: null };
      }
      if (
        push &&
        this.useHistory &&
        typeof window !== "undefined" &&
        this.state.center !== before &&
        this.state.appliedSeq === seq
      ) {
        window.history.pushState(
          { concept: this.state.center },
          "",
          `#concept=${encodeURIComponent(this.state.center ?? "")}`,
        );
      }
    } catch (err) {
      this.state = applyError(this.state, seq, describe(err));
    }
    this.render();
  }

  private render(): void {
    render(this.root, this.state, this.details, {
      onSearch: (term) => void this.search(term),
      onToggleFilter: (lemma) => void this.toggleFilter(lemma),
      onDirection: (direction) => void this.setDirection(direction),
      onRecenter: (key) => void this.recenter(key),
      onSelectEdge: (id) => void this.selectEdge(id),
      onDismissError: () => this.dismissError(),
    });
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) {
    return err.message;
  }
  return String(err);
}

export function createApp(
  root: HTMLElement,
  api: GraphApi,
  options: AppOptions = {},
): ExplorerApp {
  return new ExplorerApp(root, api, options);
}
