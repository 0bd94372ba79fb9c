/** UI session state with its invariants enforced at the setters:
 * sandbox slider values stay inside their bounds, and the selection is
 * always a subset of the active dataset's sample ids.
 */

import type { VizKind } from "./types.js";

/** Slider ranges per coefficient index (lambda0..lambda3). */
export const SLIDER_BOUNDS: ReadonlyArray<readonly [number, number]> = [
  [-5, 15],
  [-1, 1],
  [-0.1, 0.1],
  [-0.01, 0.01],
];

export function clampToBounds(index: number, value: number): number {
  const bounds = SLIDER_BOUNDS[index];
  if (!bounds) return value;
  const [lo, hi] = bounds;
  return Math.min(hi, Math.max(lo, value));
}

export interface VizConfig {
  kind: VizKind;
  x: number;
  y: number;
  z: number;
  colorBy: string | null;
  groupBy: string | null;
  marginal: "histogram" | "rug";
}

export class UiSession {
  activeDatasetId: string | null = null;
  categories: string[] = [];
  private sampleIds = new Set<string>();
  private selected = new Set<string>();
  viz: VizConfig = {
    kind: "scatter2d",
    x: 0,
    y: 1,
    z: 2,
    colorBy: null,
    groupBy: null,
    marginal: "histogram",
  };
  sandboxLambdas: number[] = [0, 0, 0, 0];

  setDataset(datasetId: string, sampleIds: Iterable<string>, categories: string[]): void {
    this.activeDatasetId = datasetId;
    this.sampleIds = new Set(sampleIds);
    this.categories = [...categories];
    this.selected.clear();
  }

  knownSampleIds(): ReadonlySet<string> {
    return this.sampleIds;
  }

  /** Replace the selection; ids outside the dataset are dropped. */
  setSelection(ids: Iterable<string>): void {
    this.selected = new Set([...ids].filter((id) => this.sampleIds.has(id)));
  }

  selection(): string[] {
    return [...this.selected].sort();
  }

  clearSelection(): void {
    this.selected.clear();
  }

  setSandboxLambda(index: number, value: number): number {
    const clamped = clampToBounds(index, value);
    this.sandboxLambdas[index] = clamped;
    return clamped;
  }

  setSandboxLambdas(values: number[]): number[] {
    this.sandboxLambdas = values.map((v, i) => clampToBounds(i, v));
    return [...this.sandboxLambdas];
  }
}
