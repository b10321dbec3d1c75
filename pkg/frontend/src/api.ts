/** Typed client for the run service.
 *
 * Every JSON response carries a `run_id` and `seeds` envelope; errors
 * arrive as `{"error": ...}` with a 4xx/5xx status and surface here as
 * ApiError so callers can tell a rejected request from a dead service.
 */

export interface LevelInfo {
  level: number;
  communities: number;
  modularity: number | null;
}

export interface HierarchyInfo {
  run_id: string;
  seeds: Record<string, number>;
  algorithm: string;
  params: Record<string, unknown>;
  n_posts: number;
  levels: LevelInfo[];
}

export interface ClusterSummary {
  community: number;
  size: number;
  top_terms: string[];
  representative: string;
  label: string | null;
}

export interface LevelView {
  level: number;
  communities: ClusterSummary[];
}

export interface PostView {
  id: string;
  text: string;
  author: string | null;
  created_at: number | null;
  communities: Record<string, number>;
}

export interface ClusterView {
  level: number;
  community: number;
  size: number;
  page: number;
  page_size: number;
  top_terms: string[];
  representative: string;
  label: string | null;
  members: PostView[];
}

export interface LabelRecord {
  level: number;
  community: number;
  text: string;
  analyst: string;
  ts: number;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

async function unwrap<T>(res: Response): Promise<T> {
  let doc: unknown;
  try {
    doc = await res.json();
  } catch {
    throw new ApiError(res.status, `non-JSON response (${res.status})`);
  }
  if (!res.ok) {
    const msg =
      doc && typeof doc === "object" && "error" in doc
        ? String((doc as { error: unknown }).error)
        : `request failed (${res.status})`;
    throw new ApiError(res.status, msg);
  }
  return doc as T;
}

export class ApiClient {
  constructor(
    private readonly base: string,
    private readonly fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  private get<T>(path: string): Promise<T> {
    return this.fetchImpl(this.base + path).then((res) => unwrap<T>(res));
  }

  hierarchy(): Promise<HierarchyInfo> {
    return this.get("/api/hierarchy");
  }

  level(t: number): Promise<LevelView> {
    return this.get(`/api/level/${t}`);
  }

  /** Always requests an explicit page so drill-down is uniformly paged. */
  cluster(t: number, c: number, page = 0): Promise<ClusterView> {
    return this.get(`/api/level/${t}/cluster/${c}?page=${page}`);
  }

  post(id: string): Promise<{ post: PostView }> {
    return this.get(`/api/post/${encodeURIComponent(id)}`);
  }

  search(q: string): Promise<{ query: string; matches: PostView[] }> {
    return this.get(`/api/search?q=${encodeURIComponent(q)}`);
  }

  labels(): Promise<{ labels: LabelRecord[] }> {
    return this.get("/api/labels");
  }

  async label(
    level: number,
    community: number,
    text: string,
    analyst = "",
  ): Promise<LabelRecord> {
    const res = await this.fetchImpl(this.base + "/api/label", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ level, community, text, analyst }),
    });
    const doc = await unwrap<{ label: LabelRecord }>(res);
    return doc.label;
  }
}
