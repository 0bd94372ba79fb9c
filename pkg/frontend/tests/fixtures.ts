/** Hand-written payloads matching the documented service JSON schema. */

import type { ForwardResponse, VizPayload } from "../src/types.js";
import { CANONICAL_ELEMENTS } from "../src/types.js";

export function scatterPayload(): VizPayload {
  return {
    kind: "scatter2d",
    series: {
      x_index: 0,
      y_index: 1,
      points: [
        { x: 1.0, y: 0.1, group: "apatite" },
        { x: 2.0, y: 0.2, group: "apatite" },
        { x: 3.0, y: 0.3, group: "monazite" },
        { x: 8.0, y: 0.8, group: "monazite" },
      ],
      groups: ["apatite", "monazite"],
    },
    axis_labels: ["λ0 (REE abundance)", "λ1 (heavy or light REE enrichment)"],
    color_key: "mineralogy",
    point_refs: { "0": "S001", "1": "S002", "2": "S003", "3": "S004" },
  };
}

export function spiderPayload(flat = false): VizPayload {
  const values = (offset: number) =>
    CANONICAL_ELEMENTS.map((_, i) => (flat ? 5.0 : 1.0 + offset + i * 0.3));
  return {
    kind: "spider",
    series: {
      elements: [...CANONICAL_ELEMENTS],
      radius_pm: CANONICAL_ELEMENTS.map((_, i) => 116 - i * 1.3),
      log_scale: true,
      reference: "chondrite",
      lines: [
        { sample_id: "S001", group: "apatite", values: values(0) },
        { sample_id: "S002", group: "monazite", values: values(1) },
      ],
      groups: ["apatite", "monazite"],
      skipped: [],
    },
    axis_labels: ["ionic radius (pm)", "concentration / chondrite"],
    color_key: "mineralogy",
    point_refs: { "0": "S001", "1": "S002" },
  };
}

export function scatter3dPayload(): VizPayload {
  return {
    kind: "scatter3d",
    series: {
      x_index: 0,
      y_index: 1,
      z_index: 2,
      points: [
        { x: 1, y: 0.1, z: 0.01, group: "a" },
        { x: 2, y: 0.2, z: 0.02, group: "b" },
        { x: 3, y: 0.1, z: 0.03, group: "a" },
      ],
      groups: ["a", "b"],
    },
    axis_labels: ["λ0 (REE abundance)", "λ1", "λ2"],
    color_key: "g",
    point_refs: { "0": "S001", "1": "S002", "2": "S003" },
  };
}

export function splomPayload(): VizPayload {
  const pts: [number, number][] = [
    [1, 0.1],
    [2, 0.2],
    [3, 0.3],
  ];
  const flip = (p: [number, number][]) => p.map(([a, b]) => [b, a] as [number, number]);
  return {
    kind: "splom",
    series: {
      indices: [0, 1],
      ranges: { "0": [1, 3], "1": [0.1, 0.3] },
      panels: [
        { x_index: 1, y_index: 0, points: flip(pts) },
        { x_index: 0, y_index: 1, points: pts },
      ],
      diagonals: [
        { index: 0, histogram_counts: [1, 2], histogram_edges: [1, 2, 3] },
        { index: 1, histogram_counts: [2, 1], histogram_edges: [0.1, 0.2, 0.3] },
      ],
      point_groups: ["a", "a", "b"],
      groups: ["a", "b"],
    },
    axis_labels: ["λ0 (REE abundance)", "λ1 (heavy or light REE enrichment)"],
    color_key: "g",
    point_refs: { "0": "S001", "1": "S002", "2": "S003" },
  };
}

export function violinPayload(): VizPayload {
  const positions = Array.from({ length: 16 }, (_, i) => i / 15);
  return {
    kind: "violin",
    series: {
      y_index: 1,
      violins: [
        {
          group: "apatite",
          positions,
          densities: positions.map((p) => Math.exp(-((p - 0.5) ** 2) * 8)),
          q1: 0.3,
          median: 0.5,
          q3: 0.7,
          whisker_low: 0.05,
          whisker_high: 0.95,
          points: [0.2, 0.4, 0.5, 0.6, 0.9],
          sample_ids: ["S001", "S002", "S003", "S004", "S005"],
        },
      ],
      skipped: [],
    },
    axis_labels: ["mineralogy", "λ1 (heavy or light REE enrichment)"],
    color_key: "mineralogy",
    point_refs: { "0": "S001", "1": "S002", "2": "S003", "3": "S004", "4": "S005" },
  };
}

export function forwardResponse(lambdas: number[]): ForwardResponse {
  // Mimics the server contract: all-zero lambdas give y = 0 and the
  // reference concentration for every element.
  const flat = lambdas.every((v) => v === 0);
  const pattern: ForwardResponse["pattern"] = {};
  CANONICAL_ELEMENTS.forEach((el, i) => {
    const y = flat ? 0 : lambdas[0] + 0.01 * i;
    pattern[el] = { y, concentration_ppm: 0.2 * Math.exp(y) };
  });
  return { standard: "chondrite", lambdas, pattern };
}
