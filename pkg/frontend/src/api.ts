/** Typed client for the endgame service HTTP API.
 *
 * The UI computes no chess or model logic of its own: every displayed
 * value originates from one of these calls.  The fetch function is
 * injectable so component tests can mock the service.
 */

export interface ClassStat {
  label: string;
  count: number;
  percent: number;
}

export interface DatasetStats {
  total: number;
  classes: ClassStat[];
}

export interface Sample {
  index: number;
  wk: string;
  wr: string;
  bk: string;
  label: string;
}

export interface SamplesPage {
  total: number;
  offset: number;
  limit: number;
  samples: Sample[];
}

export interface ModelInfo {
  id: string;
  kind: string;
  encoding: string;
  overall_accuracy?: number;
  average_accuracy?: number;
}

export interface Prediction {
  model_id: string;
  predicted_class: string;
  scores: Record<string, number>;
  oracle_class: string;
  agree: boolean;
}

export interface ApiFailure {
  code: string;
  message: string;
}

export class ApiError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(status: number, failure: ApiFailure) {
    super(failure.message);
    this.code = failure.code;
    this.status = status;
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function decode<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let failure: ApiFailure;
    try {
      failure = (await response.json()) as ApiFailure;
    } catch {
      failure = { code: "http_error", message: `HTTP ${response.status}` };
    }
    throw new ApiError(response.status, failure);
  }
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
    private readonly base: string = "",
  ) {}

  async stats(): Promise<DatasetStats> {
    return decode(await this.fetchFn(`${this.base}/api/dataset/stats`));
  }

  async samples(offset: number, limit: number): Promise<SamplesPage> {
    const query = `offset=${offset}&limit=${limit}`;
    return decode(await this.fetchFn(`${this.base}/api/dataset/samples?${query}`));
  }

  async models(): Promise<ModelInfo[]> {
    const body = await decode<{ models: ModelInfo[] }>(
      await this.fetchFn(`${this.base}/api/models`),
    );
    return body.models;
  }

  async predict(
    wk: string,
    wr: string,
    bk: string,
    modelId: string,
    signal?: AbortSignal,
  ): Promise<Prediction> {
    return decode(
      await this.fetchFn(`${this.base}/api/predict`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ wk, wr, bk, model_id: modelId }),
        signal,
      }),
    );
  }
}
