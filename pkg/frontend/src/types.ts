/** JSON shapes served by the /v1 API (the wire contract this client pins). */

export interface ImportReport {
  dataset_id: string;
  rows_accepted: number;
  rows_rejected: [number, string][];
  detected_elements: string[];
  detected_categories: string[];
  unit_assumption: string;
  notes: string[];
}

export interface UploadResponse {
  dataset_id: string;
  import_report: ImportReport;
}

export interface DatasetSummary {
  dataset_id: string;
  name: string;
  rows: number;
  categories: string[];
}

export interface LambdaSetJson {
  sample_id: string;
  lambdas: number[];
  residuals: Record<string, number>;
  rms_misfit: number;
  excluded: string[];
  basis_id: string;
}

export interface LambdaTable {
  dataset_id: string;
  config: Record<string, unknown>;
  lambda_sets: LambdaSetJson[];
  anomalies: { sample_id: string; factors: Record<string, number> }[];
  errors: { sample_id: string; code: string; message: string }[];
}

export interface VizPayload {
  kind: string;
  series: Record<string, unknown>;
  axis_labels: string[];
  color_key: string | null;
  point_refs: Record<string, string>;
}

export interface SpiderLine {
  sample_id: string;
  group: string;
  values: (number | null)[];
}

export interface ScatterPoint {
  x: number;
  y: number;
  z?: number;
  group: string;
}

export interface ViolinJson {
  group: string;
  positions: number[];
  densities: number[];
  q1: number;
  median: number;
  q3: number;
  whisker_low: number;
  whisker_high: number;
  points: number[];
  sample_ids: string[];
}

export interface ForwardResponse {
  standard: string;
  lambdas: number[];
  pattern: Record<string, { y: number; concentration_ppm: number }>;
}

export interface SampleBundle {
  sample_id: string;
  pattern: {
    concentrations_ppm: Record<string, number>;
    categories: Record<string, string>;
  };
  lambdas: LambdaSetJson | null;
  metrics: Record<string, unknown>;
  anomalies: { factors: Record<string, number> } | null;
}

export interface ApiError {
  code: string;
  message: string;
  detail: unknown[];
}

export const VIZ_KINDS = [
  "spider",
  "scatter2d",
  "scatter3d",
  "splom",
  "density_contour",
  "violin",
] as const;

export type VizKind = (typeof VIZ_KINDS)[number];

export const CANONICAL_ELEMENTS = [
  "La", "Ce", "Pr", "Nd", "Sm", "Eu", "Gd",
  "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu",
] as const;
