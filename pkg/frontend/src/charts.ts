/** Client-side SVG rendering of service payloads.
 *
 * Charts are built as SVG markup strings plus a parallel list of point
 * positions (in view-box coordinates) used for region selection. All
 * numbers come straight from the service payloads; nothing is fitted,
 * smoothed, or summarised here. The density-contour kind is displayed from
 * the server-rendered SVG instead (see app.ts).
 */

import type { IndexedPoint } from "./geometry.js";
import type { ScatterPoint, SpiderLine, ViolinJson, VizPayload } from "./types.js";

export const WIDTH = 800;
export const HEIGHT = 560;
const MARGIN = { left: 60, right: 20, top: 24, bottom: 46 };

export const PALETTE = [
  "#0072B2", "#E69F00", "#009E73", "#CC79A7",
  "#56B4E9", "#D55E00", "#F0E442", "#999999",
];

export interface RenderedChart {
  svg: string;
  /** Selectable point positions in view-box coordinates. */
  points: IndexedPoint[];
}

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function colorFor(group: string, groups: string[]): string {
  const index = groups.indexOf(group);
  return PALETTE[(index < 0 ? 0 : index) % PALETTE.length];
}

interface Scale {
  lo: number;
  hi: number;
  px0: number;
  px1: number;
}

function makeScale(values: number[], px0: number, px1: number): Scale {
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (!Number.isFinite(lo) || !Number.isFinite(hi)) {
    lo = 0;
    hi = 1;
  }
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const pad = (hi - lo) * 0.05;
  lo -= pad;
  hi += pad;
  return { lo, hi, px0, px1 };
}

function scaleX(s: Scale, v: number): number {
  return s.px0 + ((v - s.lo) / (s.hi - s.lo)) * (s.px1 - s.px0);
}

function scaleY(s: Scale, v: number): number {
  return s.px1 - ((v - s.lo) / (s.hi - s.lo)) * (s.px1 - s.px0);
}

function frame(xLabel: string, yLabel: string): string {
  const w = WIDTH - MARGIN.left - MARGIN.right;
  const h = HEIGHT - MARGIN.top - MARGIN.bottom;
  return (
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${w}" height="${h}"` +
    ` fill="none" stroke="#444" stroke-width="1"/>` +
    `<text x="${MARGIN.left + w / 2}" y="${HEIGHT - 8}" text-anchor="middle"` +
    ` font-size="12">${esc(xLabel)}</text>` +
    `<text x="16" y="${MARGIN.top + h / 2}" text-anchor="middle" font-size="12"` +
    ` transform="rotate(-90 16 ${MARGIN.top + h / 2})">${esc(yLabel)}</text>`
  );
}

function legend(groups: string[]): string {
  if (groups.length === 0 || (groups.length === 1 && groups[0] === "all")) return "";
  return groups
    .map((g, i) => {
      const y = MARGIN.top + 10 + i * 16;
      const x = WIDTH - MARGIN.right - 130;
      return (
        `<rect x="${x}" y="${y}" width="10" height="10" fill="${colorFor(g, groups)}"/>` +
        `<text x="${x + 14}" y="${y + 9}" font-size="10">${esc(g)}</text>`
      );
    })
    .join("");
}

function open(): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}"` +
    ` viewBox="0 0 ${WIDTH} ${HEIGHT}">` +
    `<rect x="0" y="0" width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`
  );
}

export function renderSpider(payload: VizPayload): RenderedChart {
  const lines = payload.series.lines as SpiderLine[];
  const elements = payload.series.elements as string[];
  const groups = (payload.series.groups as string[]) ?? [];
  const logs = lines.flatMap((line) =>
    line.values.filter((v): v is number => v !== null && v > 0).map(Math.log10),
  );
  const yScale = makeScale(logs.length ? logs : [0, 1], MARGIN.top, HEIGHT - MARGIN.bottom);
  const step = (WIDTH - MARGIN.left - MARGIN.right) / (elements.length - 1);
  const pieces: string[] = [open(), frame(payload.axis_labels[0], payload.axis_labels[1])];
  elements.forEach((el, i) => {
    pieces.push(
      `<text x="${MARGIN.left + i * step}" y="${HEIGHT - MARGIN.bottom + 14}"` +
        ` text-anchor="middle" font-size="9">${esc(el)}</text>`,
    );
  });
  const points: IndexedPoint[] = [];
  lines.forEach((line, lineIndex) => {
    const color = colorFor(line.group, groups);
    let segment: string[] = [];
    const flush = () => {
      if (segment.length > 1) {
        pieces.push(
          `<polyline points="${segment.join(" ")}" fill="none" stroke="${color}"` +
            ` stroke-width="1.2" data-index="${lineIndex}"/>`,
        );
      }
      segment = [];
    };
    line.values.forEach((value, i) => {
      if (value === null || value <= 0) {
        flush();
        return;
      }
      const px = MARGIN.left + i * step;
      const py = scaleY(yScale, Math.log10(value));
      segment.push(`${px.toFixed(1)},${py.toFixed(1)}`);
      if (i === 0) points.push({ index: lineIndex, x: px, y: py });
    });
    flush();
  });
  pieces.push(legend(groups), "</svg>");
  return { svg: pieces.join(""), points };
}

export function renderScatter2d(payload: VizPayload): RenderedChart {
  const data = payload.series.points as ScatterPoint[];
  const groups = (payload.series.groups as string[]) ?? [];
  const xs = makeScale(data.map((p) => p.x), MARGIN.left, WIDTH - MARGIN.right);
  const ys = makeScale(data.map((p) => p.y), MARGIN.top, HEIGHT - MARGIN.bottom);
  const pieces = [open(), frame(payload.axis_labels[0], payload.axis_labels[1])];
  const points: IndexedPoint[] = [];
  data.forEach((p, i) => {
    const px = scaleX(xs, p.x);
    const py = scaleY(ys, p.y);
    points.push({ index: i, x: px, y: py });
    pieces.push(
      `<circle cx="${px.toFixed(1)}" cy="${py.toFixed(1)}" r="4"` +
        ` fill="${colorFor(p.group, groups)}" fill-opacity="0.8" data-index="${i}"` +
        ` tabindex="0"/>`,
    );
  });
  pieces.push(legend(groups), "</svg>");
  return { svg: pieces.join(""), points };
}

const ISO_COS = Math.cos(Math.PI / 6);
const ISO_SIN = Math.sin(Math.PI / 6);

export function renderScatter3d(payload: VizPayload): RenderedChart {
  const data = payload.series.points as Required<ScatterPoint>[];
  const groups = (payload.series.groups as string[]) ?? [];
  const unit = (values: number[]) => {
    const lo = Math.min(...values);
    const span = Math.max(...values) - lo || 1;
    return (v: number) => (v - lo) / span;
  };
  const ux = unit(data.map((p) => p.x));
  const uy = unit(data.map((p) => p.y));
  const uz = unit(data.map((p) => p.z));
  const projected = data.map((p) => ({
    u: (ux(p.x) - uy(p.y)) * ISO_COS,
    v: (ux(p.x) + uy(p.y)) * ISO_SIN - uz(p.z),
    group: p.group,
  }));
  const us = makeScale(projected.map((p) => p.u), MARGIN.left, WIDTH - MARGIN.right);
  const vs = makeScale(projected.map((p) => p.v), MARGIN.top, HEIGHT - MARGIN.bottom);
  const pieces = [open()];
  const points: IndexedPoint[] = [];
  pieces.push(
    `<text x="${WIDTH / 2}" y="${HEIGHT - 8}" text-anchor="middle" font-size="11">` +
      esc(payload.axis_labels.join("  /  ")) +
      `</text>`,
  );
  projected.forEach((p, i) => {
    const px = scaleX(us, p.u);
    const py = scaleY(vs, p.v);
    points.push({ index: i, x: px, y: py });
    pieces.push(
      `<circle cx="${px.toFixed(1)}" cy="${py.toFixed(1)}" r="4"` +
        ` fill="${colorFor(p.group, groups)}" fill-opacity="0.8" data-index="${i}"/>`,
    );
  });
  pieces.push(legend(groups), "</svg>");
  return { svg: pieces.join(""), points };
}

export function renderSplom(payload: VizPayload): RenderedChart {
  const indices = payload.series.indices as number[];
  const panels = payload.series.panels as { x_index: number; y_index: number; points: [number, number][] }[];
  const ranges = payload.series.ranges as Record<string, [number, number]>;
  const pointGroups = (payload.series.point_groups as string[]) ?? [];
  const groups = (payload.series.groups as string[]) ?? [];
  const n = indices.length;
  const cellW = (WIDTH - MARGIN.left - MARGIN.right) / n;
  const cellH = (HEIGHT - MARGIN.top - MARGIN.bottom) / n;
  const pieces = [open()];
  const points: IndexedPoint[] = [];
  indices.forEach((yi, row) => {
    indices.forEach((xi, col) => {
      const ox = MARGIN.left + col * cellW;
      const oy = MARGIN.top + row * cellH;
      pieces.push(
        `<rect x="${ox.toFixed(1)}" y="${oy.toFixed(1)}" width="${(cellW - 4).toFixed(1)}"` +
          ` height="${(cellH - 4).toFixed(1)}" fill="none" stroke="#666" stroke-width="0.6"/>`,
      );
      if (xi === yi) {
        pieces.push(
          `<text x="${(ox + cellW / 2).toFixed(1)}" y="${(oy + 14).toFixed(1)}"` +
            ` text-anchor="middle" font-size="10">${esc(payload.axis_labels[row] ?? "")}</text>`,
        );
        return;
      }
      const panel = panels.find((p) => p.x_index === xi && p.y_index === yi);
      if (!panel) return;
      const [xLo, xHi] = ranges[String(xi)];
      const [yLo, yHi] = ranges[String(yi)];
      panel.points.forEach(([pxv, pyv], k) => {
        const px = ox + ((pxv - xLo) / (xHi - xLo || 1)) * (cellW - 4);
        const py = oy + (cellH - 4) - ((pyv - yLo) / (yHi - yLo || 1)) * (cellH - 4);
        // The first row of panels carries the selectable positions.
        if (row === 0 && col === 1) points.push({ index: k, x: px, y: py });
        pieces.push(
          `<circle cx="${px.toFixed(1)}" cy="${py.toFixed(1)}" r="2"` +
            ` fill="${colorFor(pointGroups[k] ?? "all", groups)}" fill-opacity="0.75"` +
            ` data-index="${k}"/>`,
        );
      });
    });
  });
  pieces.push(legend(groups), "</svg>");
  return { svg: pieces.join(""), points };
}

export function renderViolin(payload: VizPayload): RenderedChart {
  const violins = payload.series.violins as ViolinJson[];
  const allValues = violins.flatMap((v) => v.points);
  const ys = makeScale(
    allValues.length ? allValues : [0, 1],
    MARGIN.top,
    HEIGHT - MARGIN.bottom,
  );
  const slot = (WIDTH - MARGIN.left - MARGIN.right) / Math.max(violins.length, 1);
  const groups = violins.map((v) => v.group);
  const pieces = [open(), frame(payload.axis_labels[0], payload.axis_labels[1])];
  const points: IndexedPoint[] = [];
  let running = 0;
  violins.forEach((violin, vi) => {
    const cx = MARGIN.left + slot * (vi + 0.5);
    const color = colorFor(violin.group, [...groups].sort());
    const peak = Math.max(...violin.densities, 1e-12);
    const half = slot * 0.36;
    const right = violin.positions.map(
      (p, i) =>
        `${(cx + (violin.densities[i] / peak) * half).toFixed(1)},${scaleY(ys, p).toFixed(1)}`,
    );
    const left = [...violin.positions]
      .reverse()
      .map(
        (p, i) =>
          `${(
            cx -
            (violin.densities[violin.densities.length - 1 - i] / peak) * half
          ).toFixed(1)},${scaleY(ys, p).toFixed(1)}`,
      );
    pieces.push(
      `<polygon points="${[...right, ...left].join(" ")}" fill="${color}"` +
        ` fill-opacity="0.35" stroke="${color}"/>`,
    );
    const boxW = half * 0.3;
    pieces.push(
      `<line x1="${cx.toFixed(1)}" y1="${scaleY(ys, violin.whisker_low).toFixed(1)}"` +
        ` x2="${cx.toFixed(1)}" y2="${scaleY(ys, violin.whisker_high).toFixed(1)}"` +
        ` stroke="#222"/>`,
      `<rect x="${(cx - boxW).toFixed(1)}" y="${scaleY(ys, violin.q3).toFixed(1)}"` +
        ` width="${(2 * boxW).toFixed(1)}"` +
        ` height="${(scaleY(ys, violin.q1) - scaleY(ys, violin.q3)).toFixed(1)}"` +
        ` fill="#fff" stroke="#222"/>`,
      `<line x1="${(cx - boxW).toFixed(1)}" y1="${scaleY(ys, violin.median).toFixed(1)}"` +
        ` x2="${(cx + boxW).toFixed(1)}" y2="${scaleY(ys, violin.median).toFixed(1)}"` +
        ` stroke="#222" stroke-width="1.4"/>`,
      `<text x="${cx.toFixed(1)}" y="${HEIGHT - MARGIN.bottom + 14}" text-anchor="middle"` +
        ` font-size="10">${esc(violin.group)}</text>`,
    );
    violin.points.forEach((value, k) => {
      const py = scaleY(ys, value);
      points.push({ index: running + k, x: cx, y: py });
      pieces.push(
        `<circle cx="${cx.toFixed(1)}" cy="${py.toFixed(1)}" r="2" fill="${color}"` +
          ` fill-opacity="0.85" data-index="${running + k}"/>`,
      );
    });
    running += violin.points.length;
  });
  pieces.push("</svg>");
  return { svg: pieces.join(""), points };
}

/** Route a payload to its renderer; density_contour is server-rendered. */
export function renderPayload(payload: VizPayload): RenderedChart {
  switch (payload.kind) {
    case "spider":
      return renderSpider(payload);
    case "scatter2d":
      return renderScatter2d(payload);
    case "scatter3d":
      return renderScatter3d(payload);
    case "splom":
      return renderSplom(payload);
    case "violin":
      return renderViolin(payload);
    default:
      throw new Error(`no client renderer for kind ${payload.kind}`);
  }
}
