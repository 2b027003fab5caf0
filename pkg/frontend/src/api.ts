/** Typed client for the screening service API.
 *
 * Every number the console displays comes from these endpoints; the
 * console never recomputes model math on its own.
 */

export interface Measurements {
  rel: number;
  vote: number;
  type: number;
  div: number;
  con: number;
  epr: number;
}

export interface QueueEntry {
  idea_id: string;
  title: string;
  p: number | null;
  status: "pending" | "decided";
  posted_date: string | null;
  measurements: Measurements;
  terms: { rt: string[]; kt: string[] };
  decision: DecisionEvent | null;
}

export interface StepOutcome {
  p: number;
  sampled_index: number;
  mistake: boolean;
  refit_performed: boolean;
  capacity_hit: boolean;
  loss: number;
}

export interface DecisionEvent {
  seq?: number;
  idea_id: string;
  label: number;
  actor: string;
  decided_at?: string;
  resulting_p: number | null;
  outcome: StepOutcome | null;
  initialized_model: boolean;
  committed: boolean;
}

export interface ModelInfo {
  initialized: boolean;
  ensemble_size?: number;
  weights?: number[];
  weights_histogram?: number[];
  mistake_count?: number;
  observed?: number;
  empirical_regret?: number | null;
  theory_bound?: number | null;
  hyperparameters: Record<string, number>;
  backend: string;
}

export interface MetricsInfo {
  ideas: number;
  pending: number;
  decisions: number;
  prequential: {
    scored: number;
    tp: number;
    fp: number;
    fn: number;
    tn: number;
    accuracy: number | null;
    precision: number | null;
    recall: number | null;
  };
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public detail?: unknown,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class Client {
  constructor(
    private base: string = "",
    private fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.base + path, init);
    if (!response.ok) {
      let code = `http_${response.status}`;
      let message = response.statusText;
      let detail: unknown;
      try {
        const body = await response.json();
        code = body.code ?? code;
        message = body.message ?? message;
        detail = body.detail;
      } catch {
        // non-JSON error body: keep the status text
      }
      throw new ApiError(response.status, code, message, detail);
    }
    return (await response.json()) as T;
  }

  async queue(limit = 50, offset = 0): Promise<QueueEntry[]> {
    const body = await this.request<{ entries: QueueEntry[] }>(
      `/api/queue?limit=${limit}&offset=${offset}`,
    );
    return body.entries;
  }

  idea(id: string): Promise<QueueEntry> {
    return this.request(`/api/ideas/${encodeURIComponent(id)}`);
  }

  decide(
    id: string,
    label: 0 | 1,
    actor: string,
    commit = true,
  ): Promise<DecisionEvent> {
    return this.request(`/api/ideas/${encodeURIComponent(id)}/decision`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ label, actor, commit }),
    });
  }

  model(): Promise<ModelInfo> {
    return this.request("/api/model");
  }

  metrics(): Promise<MetricsInfo> {
    return this.request("/api/metrics");
  }

  health(): Promise<{ status: string; backend: string }> {
    return this.request("/api/healthz");
  }
}
