/** Typed client for the refocus service HTTP API. */

export interface DatasetInfo {
  rows: number;
  cols: number;
  width: number;
  height: number;
  disparity_range: [number, number];
}

export interface PreviewParams {
  df: number;
  k: number;
  a?: number;
  b?: number;
}

export interface RenderParams extends PreviewParams {
  scale?: number;
  noi?: number;
  lambda_b?: number;
  lambda_btv?: number;
  step?: number;
}

export type JobState = "queued" | "running" | "done" | "failed";

export interface RenderJob {
  id: string;
  state: JobState;
  params: Record<string, number>;
  progress: number;
  noi: number;
  result_path?: string;
  error?: string;
}

/** Server-side validation failure: carries the offending field name. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly field: string | null,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function raiseForStatus(response: Response): Promise<void> {
  if (response.ok) return;
  let field: string | null = null;
  let message = `HTTP ${response.status}`;
  try {
    const body = await response.json();
    if (body && typeof body.detail === "object" && body.detail !== null) {
      field = body.detail.field ?? null;
      message = body.detail.message ?? message;
    } else if (body && typeof body.detail === "string") {
      message = body.detail;
    }
  } catch {
    // non-JSON error body: keep the status message
  }
  throw new ApiError(response.status, field, message);
}

export class ApiClient {
  constructor(
    readonly baseUrl: string = "",
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private async get(path: string): Promise<Response> {
    const response = await this.fetchFn(this.baseUrl + path);
    await raiseForStatus(response);
    return response;
  }

  private async post(path: string, body: unknown): Promise<Response> {
    const response = await this.fetchFn(this.baseUrl + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    await raiseForStatus(response);
    return response;
  }

  async datasetInfo(): Promise<DatasetInfo> {
    return (await this.get("/dataset/info")).json();
  }

  centerImageUrl(): string {
    return this.baseUrl + "/dataset/center.png";
  }

  async disparityAt(x: number, y: number): Promise<number> {
    const response = await this.get(`/disparity/value?x=${x}&y=${y}`);
    return (await response.json()).d;
  }

  async preview(params: PreviewParams): Promise<Blob> {
    return (await this.post("/refocus/preview", params)).blob();
  }

  async startRender(params: RenderParams): Promise<string> {
    const response = await this.post("/refocus/render", params);
    return (await response.json()).job_id;
  }

  async getJob(jobId: string): Promise<RenderJob> {
    return (await this.get(`/job/${encodeURIComponent(jobId)}`)).json();
  }

  jobResultUrl(jobId: string): string {
    return `${this.baseUrl}/job/${encodeURIComponent(jobId)}/result.png`;
  }
}
