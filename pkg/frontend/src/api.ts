/**
 * Typed client for the archeodb HTTP service.
 *
 * Response shapes mirror the server's JSON exactly; nothing is renamed
 * or reshaped on the way in, so a record printed in the devtools matches
 * what `curl` shows. The client is the only module that talks to the
 * network.
 */

export type QueryParams = Record<string, string>;

export interface SearchHit {
  notice_id: string;
  score: number;
  matched_spans: [number, number][];
}

export interface SearchResponse {
  total: number;
  hits: SearchHit[];
}

export interface NoticeRecord {
  notice_id: string;
  doc_id: string;
  number: number;
  municipality: string;
  start: number;
  end: number;
  zones: [string, number, number][];
  tokens: [number, number, string][];
}

export interface MentionRecord {
  mention_id: string;
  notice_id: string;
  kind: string;
  start: number;
  end: number;
  surface: string;
  normalized: string;
  concept_id: string | null;
  from_year: number | null;
  to_year: number | null;
}

export interface NoticeDetail {
  notice: NoticeRecord;
  text: string;
  mentions: MentionRecord[];
}

/** Labels are [display, normalized] pairs grouped by language. */
export interface ConceptRecord {
  concept_id: string;
  labels: Record<string, [string, string][]>;
  preferred: Record<string, string>;
  notes: string;
}

export interface ConceptListResponse {
  total: number;
  concepts: ConceptRecord[];
}

export interface TermMember {
  form: string;
  freq: number;
}

export interface TermCluster {
  key: string;
  total_freq: number;
  members: TermMember[];
}

export interface TermListResponse {
  total: number;
  terms: TermCluster[];
}

export interface HealthResponse {
  status: string;
  store_version: number;
  notices: number;
}

/** Error body from the service: always {code, message}. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

const JSON_HEADERS = { "content-type": "application/json" };

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, init);
    if (!response.ok) {
      let code = "error";
      let message = `HTTP ${response.status}`;
      try {
        const body = await response.json();
        if (typeof body.code === "string") code = body.code;
        if (typeof body.message === "string") message = body.message;
      } catch {
        // non-JSON error body; keep the status-line message
      }
      throw new ApiError(response.status, code, message);
    }
    return response.json() as Promise<T>;
  }

  private static withQuery(path: string, params: QueryParams): string {
    const qs = new URLSearchParams(params).toString();
    return qs ? `${path}?${qs}` : path;
  }

  health(): Promise<HealthResponse> {
    return this.request("/healthz");
  }

  search(params: QueryParams, signal?: AbortSignal): Promise<SearchResponse> {
    return this.request(ApiClient.withQuery("/search", params), { signal });
  }

  /** Notice ids contain '#', so the path segment must be encoded. */
  getNotice(noticeId: string): Promise<NoticeDetail> {
    return this.request(`/notices/${encodeURIComponent(noticeId)}`);
  }

  getConcept(conceptId: string): Promise<ConceptRecord> {
    return this.request(`/concepts/${encodeURIComponent(conceptId)}`);
  }

  listConcepts(params: QueryParams = {}): Promise<ConceptListResponse> {
    return this.request(ApiClient.withQuery("/concepts", params));
  }

  listTerms(params: QueryParams = {}): Promise<TermListResponse> {
    return this.request(ApiClient.withQuery("/terms", params));
  }

  addLabel(
    conceptId: string,
    body: { language: string; label: string },
  ): Promise<ConceptRecord> {
    return this.request(`/concepts/${encodeURIComponent(conceptId)}/labels`, {
      method: "POST",
      headers: JSON_HEADERS,
      body: JSON.stringify(body),
    });
  }

  mergeConcepts(body: {
    keep_id: string;
    merge_id: string;
  }): Promise<ConceptRecord> {
    return this.request("/concepts/merge", {
      method: "POST",
      headers: JSON_HEADERS,
      body: JSON.stringify(body),
    });
  }
}
