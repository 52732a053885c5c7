/** Typed client for the knowledge-graph read API. */

export interface ConceptSummary {
  key: string;
  display: string;
  freq: number;
}

export interface ConditionRecord {
  subj_key: string;
  subj_attr?: string;
  pred: string;
  obj_key: string;
  obj_attr?: string;
  count: number;
}

export interface ProvenanceRef {
  doc_id: string;
  sent_index: number;
}

export interface SentenceRecord extends ProvenanceRef {
  text: string;
}

export interface EgoEdge {
  id: string;
  subj_key: string;
  subj_attr?: string;
  pred_lemma: string;
  obj_key: string;
  obj_attr?: string;
  pred_surfaces: Record<string, number>;
  support: number;
  max_confidence: number;
  conditions: ConditionRecord[];
  provenance: ProvenanceRef[];
  sentences: SentenceRecord[];
}

export interface EgoGraph {
  center: ConceptSummary | null;
  edges: EgoEdge[];
}

export type Direction = "in" | "out" | "both";

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status?: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

/** The surface the explorer needs; ApiClient is the HTTP implementation. */
export interface GraphApi {
  concepts(prefix: string, limit?: number): Promise<ConceptSummary[]>;
  ego(
    concept: string,
    predicates?: string[],
    direction?: Direction,
    limit?: number,
  ): Promise<EgoGraph>;
  sentence(docId: string, sentIndex: number): Promise<SentenceRecord>;
}

export class ApiClient implements GraphApi {
  constructor(readonly baseUrl: string = "") {}

  private async get<T>(path: string, params: Record<string, string>): Promise<T> {
    const query = new URLSearchParams(params).toString();
    const url = `${this.baseUrl}${path}${query ? `?${query}` : ""}`;
    let resp: Response;
    try {
      resp = await fetch(url);
    } catch (err) {
      throw new ApiError(`network error: ${String(err)}`);
    }
    const body = (await resp.json().catch(() => null)) as T | { error?: string } | null;
    if (!resp.ok) {
      const detail =
        body && typeof body === "object" && "error" in body && body.error
          ? String(body.error)
          : `HTTP ${resp.status}`;
      throw new ApiError(detail, resp.status);
    }
    return body as T;
  }

  async concepts(prefix: string, limit = 20): Promise<ConceptSummary[]> {
    const body = await this.get<{ concepts: ConceptSummary[] }>("/api/concepts", {
      prefix,
      limit: String(limit),
    });
    return body.concepts;
  }

  ego(
    concept: string,
    predicates: string[] = [],
    direction: Direction = "both",
    limit = 50,
  ): Promise<EgoGraph> {
    return this.get<EgoGraph>("/api/ego", {
      concept,
      predicates: predicates.join(","),
      direction,
      limit: String(limit),
    });
  }

  sentence(docId: string, sentIndex: number): Promise<SentenceRecord> {
    return this.get<SentenceRecord>("/api/sentence", {
      doc_id: docId,
      sent_index: String(sentIndex),
    });
  }
}
