/** Thin typed client for the /v1 service API.
 *
 * All numerical work (lambda fits, KDEs, quartiles) happens server-side;
 * this client only moves JSON and SVG bytes. The fetch implementation is
 * injectable so tests can run without a network.
 */

import type {
  ApiError,
  DatasetSummary,
  ForwardResponse,
  LambdaSetJson,
  LambdaTable,
  SampleBundle,
  UploadResponse,
  VizKind,
  VizPayload,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiFailure extends Error {
  readonly code: string;
  readonly detail: unknown[];

  constructor(error: ApiError) {
    super(error.message);
    this.code = error.code;
    this.detail = error.detail ?? [];
  }
}

async function asJson<T>(response: Response): Promise<T> {
  const body = await response.json();
  if (!response.ok) {
    throw new ApiFailure(body as ApiError);
  }
  return body as T;
}

export interface VizQuery {
  x?: number;
  y?: number;
  z?: number;
  colorBy?: string | null;
  groupBy?: string | null;
  marginal?: string;
}

export class ApiClient {
  constructor(
    private readonly base: string = "/v1",
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  async uploadDataset(csv: Blob | string, name: string): Promise<UploadResponse> {
    const url = `${this.base}/datasets?name=${encodeURIComponent(name)}`;
    const response = await this.fetchImpl(url, {
      method: "POST",
      headers: { "content-type": "text/csv" },
      body: csv,
    });
    return asJson<UploadResponse>(response);
  }

  async listDatasets(): Promise<DatasetSummary[]> {
    const response = await this.fetchImpl(`${this.base}/datasets`);
    const body = await asJson<{ datasets: DatasetSummary[] }>(response);
    return body.datasets;
  }

  async lambdas(datasetId: string): Promise<LambdaTable> {
    const response = await this.fetchImpl(`${this.base}/datasets/${datasetId}/lambdas`);
    return asJson<LambdaTable>(response);
  }

  private vizUrl(datasetId: string, kind: VizKind, query: VizQuery, format: string): string {
    const params = new URLSearchParams();
    if (query.x !== undefined) params.set("x", String(query.x));
    if (query.y !== undefined) params.set("y", String(query.y));
    if (query.z !== undefined) params.set("z", String(query.z));
    if (query.colorBy) params.set("color_by", query.colorBy);
    if (query.groupBy) params.set("group_by", query.groupBy);
    if (query.marginal) params.set("marginal", query.marginal);
    params.set("format", format);
    return `${this.base}/datasets/${datasetId}/viz/${kind}?${params.toString()}`;
  }

  async vizPayload(datasetId: string, kind: VizKind, query: VizQuery = {}): Promise<VizPayload> {
    const response = await this.fetchImpl(this.vizUrl(datasetId, kind, query, "json"));
    return asJson<VizPayload>(response);
  }

  async vizSvg(datasetId: string, kind: VizKind, query: VizQuery = {}): Promise<string> {
    const response = await this.fetchImpl(this.vizUrl(datasetId, kind, query, "svg"));
    if (!response.ok) {
      throw new ApiFailure((await response.json()) as ApiError);
    }
    return response.text();
  }

  async sampleBundle(datasetId: string, sampleId: string): Promise<SampleBundle> {
    const response = await this.fetchImpl(
      `${this.base}/datasets/${datasetId}/sample/${encodeURIComponent(sampleId)}`,
    );
    return asJson<SampleBundle>(response);
  }

  async forward(lambdas: number[], standard = "chondrite"): Promise<ForwardResponse> {
    const response = await this.fetchImpl(`${this.base}/sandbox/forward`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ lambdas, standard }),
    });
    return asJson<ForwardResponse>(response);
  }

  async inverse(
    concentrations: Record<string, number>,
    degree: number,
    standard = "chondrite",
  ): Promise<LambdaSetJson> {
    const response = await this.fetchImpl(`${this.base}/sandbox/inverse`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ concentrations, degree, standard }),
    });
    return asJson<LambdaSetJson>(response);
  }
}
