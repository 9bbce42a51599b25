import type {
  EvalReport,
  JobRecord,
  RunInfo,
  Timeline,
  WeightMapping,
} from "./models.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface PutWeightsResult {
  ok: boolean;
  table?: WeightMapping;
  errors?: string[];
}

/** Thin JSON client over the tuning service; every domain value comes
 * from the API — nothing is computed here.  */
export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path);
    if (!response.ok) {
      throw new Error(`GET ${path} failed: ${response.status}`);
    }
    return (await response.json()) as T;
  }

  getWeights(): Promise<WeightMapping> {
    return this.getJson("/api/weights");
  }

  async putWeights(table: WeightMapping): Promise<PutWeightsResult> {
    const response = await this.fetchFn(this.baseUrl + "/api/weights", {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(table),
    });
    if (response.status === 422) {
      const body = (await response.json()) as { errors: string[] };
      return { ok: false, errors: body.errors };
    }
    if (!response.ok) {
      throw new Error(`PUT /api/weights failed: ${response.status}`);
    }
    return { ok: true, table: (await response.json()) as WeightMapping };
  }

  async startEvaluation(): Promise<string> {
    const response = await this.fetchFn(this.baseUrl + "/api/evaluate", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({}),
    });
    if (!response.ok) {
      throw new Error(`POST /api/evaluate failed: ${response.status}`);
    }
    const body = (await response.json()) as { job_id: string };
    return body.job_id;
  }

  getJob(jobId: string): Promise<JobRecord> {
    return this.getJson(`/api/jobs/${jobId}`);
  }

  getLatestReport(): Promise<EvalReport> {
    return this.getJson("/api/reports/latest");
  }

  async getRuns(): Promise<RunInfo[]> {
    const body = await this.getJson<{ runs: RunInfo[] }>("/api/runs");
    return body.runs;
  }

  getTimeline(runId: string): Promise<Timeline> {
    return this.getJson(`/api/runs/${runId}/timeline`);
  }
}
