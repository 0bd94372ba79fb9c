/** Application wiring: upload flow, linked visualisations with a toolbar
 * (pan / zoom / region select / PNG download), and the lambda sandbox.
 *
 * Every number displayed here came from the service; the client renders
 * and routes interactions, nothing more. Toolbar actions are also bound to
 * the keyboard (arrows pan, +/- zoom, Escape clears the selection) so each
 * interactive state stays reachable without a pointer.
 */

import { ApiClient, ApiFailure } from "./api.js";
import { renderPayload, RenderedChart, WIDTH, HEIGHT } from "./charts.js";
import {
  clientToView,
  pan,
  pointsInRect,
  Rect,
  ViewBox,
  viewBoxAttr,
  zoom,
} from "./geometry.js";
import { exportPng } from "./png.js";
import { SandboxController } from "./sandbox.js";
import { SLIDER_BOUNDS, UiSession } from "./state.js";
import {
  dismissTutorial,
  shouldShowTutorial,
  TUTORIAL_COPY,
} from "./tutorial.js";
import {
  CANONICAL_ELEMENTS,
  VIZ_KINDS,
  VizKind,
  VizPayload,
} from "./types.js";

const HOME_VIEW: ViewBox = { x: 0, y: 0, w: WIDTH, h: HEIGHT };

export class App {
  private readonly session = new UiSession();
  private view: ViewBox = { ...HOME_VIEW };
  private chart: RenderedChart | null = null;
  private payload: VizPayload | null = null;
  private serverSvg: string | null = null;
  private sandbox: SandboxController;
  private selecting: { startX: number; startY: number } | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient = new ApiClient(),
    private readonly storage: Storage = window.localStorage,
  ) {
    this.sandbox = new SandboxController(
      {
        forward: (lambdas, standard) => this.api.forward(lambdas, standard),
        inverse: (conc, degree, standard) => this.api.inverse(conc, degree, standard),
      },
      {
        onPattern: (pattern) => this.drawSandboxPattern(pattern),
        onLambdas: (lambdas) => this.syncSliders(lambdas),
        onError: (code, message) => this.setSandboxMessage(`${code}: ${message}`),
      },
    );
    this.root.innerHTML = this.template();
    this.bind();
  }

  private template(): string {
    const kindOptions = VIZ_KINDS.map(
      (k) => `<option value="${k}">${k.replace("_", " ")}</option>`,
    ).join("");
    const sliders = SLIDER_BOUNDS.map(([lo, hi], i) => {
      const step = (hi - lo) / 400;
      return (
        `<label class="slider-row">λ${i}` +
        `<input type="range" id="slider-${i}" min="${lo}" max="${hi}" step="${step}" value="0"/>` +
        `<output id="slider-value-${i}">0</output></label>`
      );
    }).join("");
    const patternInputs = CANONICAL_ELEMENTS.map(
      (el) =>
        `<label class="conc-row">${el}<input type="number" step="any"` +
        ` id="conc-${el}" aria-label="${el} concentration (ppm)"/></label>`,
    ).join("");
    return `
<header><h1>reekit</h1><p id="status" role="status"></p></header>
<section id="upload-panel">
  <label>Upload CSV <input type="file" id="file-input" accept=".csv,text/csv"/></label>
  <div id="import-summary"></div>
  <div id="import-errors" role="alert"></div>
</section>
<dialog id="tutorial">
  <h2>Reading lambda coefficients</h2>
  ${TUTORIAL_COPY.map((line) => `<p>${line}</p>`).join("")}
  <button id="tutorial-dismiss" autofocus>Got it</button>
</dialog>
<section id="viz-panel" hidden>
  <div id="viz-controls">
    <label>Chart <select id="kind-select">${kindOptions}</select></label>
    <label>Colour by <select id="color-select"><option value="">(none)</option></select></label>
    <label>Marginal <select id="marginal-select">
      <option value="histogram">histogram</option><option value="rug">rug</option>
    </select></label>
  </div>
  <div id="toolbar" role="toolbar" aria-label="chart tools">
    <button id="tool-zoom-in" title="zoom in (+)">+</button>
    <button id="tool-zoom-out" title="zoom out (-)">−</button>
    <button id="tool-pan-left" title="pan left">←</button>
    <button id="tool-pan-right" title="pan right">→</button>
    <button id="tool-pan-up" title="pan up">↑</button>
    <button id="tool-pan-down" title="pan down">↓</button>
    <button id="tool-reset" title="reset view">reset</button>
    <button id="tool-select" title="region select" aria-pressed="false">select</button>
    <button id="tool-png" title="download PNG">PNG</button>
  </div>
  <div id="chart-host" tabindex="0" aria-label="chart area"></div>
  <div id="selection-bar">
    <span id="selection-count"></span>
    <button id="open-sandbox" hidden>Open in Sandbox</button>
  </div>
</section>
<section id="sandbox-panel" hidden>
  <h2>Sandbox</h2>
  <p id="sandbox-message" role="status"></p>
  <div id="sandbox-sliders">${sliders}</div>
  <div id="sandbox-chart"></div>
  <details><summary>Edit pattern (inverse fit)</summary>
    <div id="pattern-editor">${patternInputs}</div>
    <button id="apply-pattern">Fit lambdas from pattern</button>
  </details>
</section>`;
  }

  private el<T extends HTMLElement>(selector: string): T {
    const found = this.root.querySelector(selector);
    if (!found) throw new Error(`missing element ${selector}`);
    return found as T;
  }

  private bind(): void {
    this.el<HTMLInputElement>("#file-input").addEventListener("change", (ev) => {
      const input = ev.target as HTMLInputElement;
      const file = input.files?.[0];
      if (file) void this.upload(file);
    });
    this.el("#tutorial-dismiss").addEventListener("click", () => {
      dismissTutorial(this.storage);
      this.el<HTMLDialogElement>("#tutorial").close();
    });
    this.el("#kind-select").addEventListener("change", () => void this.refreshViz());
    this.el("#color-select").addEventListener("change", () => void this.refreshViz());
    this.el("#marginal-select").addEventListener("change", () => void this.refreshViz());
    this.el("#tool-zoom-in").addEventListener("click", () => this.applyZoom(1.25));
    this.el("#tool-zoom-out").addEventListener("click", () => this.applyZoom(0.8));
    this.el("#tool-pan-left").addEventListener("click", () => this.applyPan(-0.15, 0));
    this.el("#tool-pan-right").addEventListener("click", () => this.applyPan(0.15, 0));
    this.el("#tool-pan-up").addEventListener("click", () => this.applyPan(0, -0.15));
    this.el("#tool-pan-down").addEventListener("click", () => this.applyPan(0, 0.15));
    this.el("#tool-reset").addEventListener("click", () => {
      this.view = { ...HOME_VIEW };
      this.applyView();
    });
    this.el("#tool-select").addEventListener("click", () => this.toggleSelectMode());
    this.el("#tool-png").addEventListener("click", () => void this.downloadPng());
    this.el("#open-sandbox").addEventListener("click", () => void this.openSelectedInSandbox());
    this.el("#apply-pattern").addEventListener("click", () => this.applyPatternEdit());

    const host = this.el("#chart-host");
    host.addEventListener("keydown", (ev) => this.onChartKey(ev as KeyboardEvent));
    host.addEventListener("pointerdown", (ev) => this.onPointerDown(ev as PointerEvent));
    host.addEventListener("pointerup", (ev) => this.onPointerUp(ev as PointerEvent));

    for (let i = 0; i < SLIDER_BOUNDS.length; i += 1) {
      const slider = this.el<HTMLInputElement>(`#slider-${i}`);
      slider.addEventListener("input", () => {
        const value = this.sandbox.setSlider(i, Number(slider.value));
        this.session.setSandboxLambda(i, value);
        this.el(`#slider-value-${i}`).textContent = value.toPrecision(4);
      });
    }
  }

  private setStatus(text: string): void {
    this.el("#status").textContent = text;
  }

  async upload(file: File): Promise<void> {
    this.setStatus(`uploading ${file.name}...`);
    try {
      const result = await this.api.uploadDataset(file, file.name);
      const report = result.import_report;
      const table = await this.api.lambdas(result.dataset_id);
      this.session.setDataset(
        result.dataset_id,
        table.lambda_sets.map((ls) => ls.sample_id),
        report.detected_categories,
      );
      this.el("#import-summary").textContent =
        `${report.rows_accepted} rows accepted, ${report.rows_rejected.length} rejected; ` +
        `categories: ${report.detected_categories.join(", ") || "(none)"}`;
      this.el("#import-errors").innerHTML = report.rows_rejected
        .map(([row, reason]) => `<div>row ${row}: ${reason}</div>`)
        .join("");
      const colorSelect = this.el<HTMLSelectElement>("#color-select");
      colorSelect.innerHTML =
        `<option value="">(none)</option>` +
        report.detected_categories
          .map((c) => `<option value="${c}">${c}</option>`)
          .join("");
      this.el("#viz-panel").hidden = false;
      this.el("#sandbox-panel").hidden = false;
      if (shouldShowTutorial(this.storage)) {
        this.el<HTMLDialogElement>("#tutorial").showModal();
      }
      this.setStatus(`dataset ${result.dataset_id} loaded`);
      await this.refreshViz();
    } catch (err) {
      if (err instanceof ApiFailure) {
        this.setStatus(`upload failed: ${err.code}`);
        this.el("#import-errors").innerHTML =
          `<div>${err.message}</div>` +
          err.detail.map((d) => `<div>${String(d)}</div>`).join("");
      } else {
        this.setStatus(`upload failed: ${String(err)}`);
      }
    }
  }

  currentKind(): VizKind {
    return this.el<HTMLSelectElement>("#kind-select").value as VizKind;
  }

  async refreshViz(): Promise<void> {
    const datasetId = this.session.activeDatasetId;
    if (!datasetId) return;
    const kind = this.currentKind();
    const colorBy = this.el<HTMLSelectElement>("#color-select").value || null;
    const marginal = this.el<HTMLSelectElement>("#marginal-select").value;
    this.view = { ...HOME_VIEW };
    this.session.clearSelection();
    this.updateSelectionBar();
    try {
      if (kind === "density_contour") {
        this.serverSvg = await this.api.vizSvg(datasetId, kind, {
          colorBy,
          groupBy: colorBy,
          marginal,
        });
        this.chart = null;
        this.payload = null;
        this.el("#chart-host").innerHTML = this.serverSvg;
      } else {
        this.payload = await this.api.vizPayload(datasetId, kind, {
          colorBy,
          groupBy: colorBy,
        });
        this.chart = renderPayload(this.payload);
        this.serverSvg = null;
        this.el("#chart-host").innerHTML = this.chart.svg;
      }
      this.applyView();
      this.setStatus(`${kind} rendered`);
    } catch (err) {
      this.setStatus(
        err instanceof ApiFailure ? `${err.code}: ${err.message}` : String(err),
      );
    }
  }

  private svgElement(): SVGSVGElement | null {
    return this.el("#chart-host").querySelector("svg");
  }

  private applyView(): void {
    const svg = this.svgElement();
    if (svg) svg.setAttribute("viewBox", viewBoxAttr(this.view));
  }

  applyZoom(factor: number): void {
    this.view = zoom(this.view, factor);
    this.applyView();
  }

  applyPan(dx: number, dy: number): void {
    this.view = pan(this.view, dx, dy);
    this.applyView();
  }

  private onChartKey(ev: KeyboardEvent): void {
    const steps: Record<string, [number, number]> = {
      ArrowLeft: [-0.1, 0],
      ArrowRight: [0.1, 0],
      ArrowUp: [0, -0.1],
      ArrowDown: [0, 0.1],
    };
    if (ev.key in steps) {
      const [dx, dy] = steps[ev.key];
      this.applyPan(dx, dy);
      ev.preventDefault();
    } else if (ev.key === "+" || ev.key === "=") {
      this.applyZoom(1.25);
    } else if (ev.key === "-") {
      this.applyZoom(0.8);
    } else if (ev.key === "Escape") {
      this.session.clearSelection();
      this.updateSelectionBar();
    }
  }

  private selectMode(): boolean {
    return this.el("#tool-select").getAttribute("aria-pressed") === "true";
  }

  private toggleSelectMode(): void {
    const button = this.el("#tool-select");
    button.setAttribute("aria-pressed", this.selectMode() ? "false" : "true");
  }

  private onPointerDown(ev: PointerEvent): void {
    if (!this.selectMode()) return;
    this.selecting = { startX: ev.offsetX, startY: ev.offsetY };
  }

  private onPointerUp(ev: PointerEvent): void {
    if (!this.selecting || !this.chart || !this.payload) {
      this.selecting = null;
      return;
    }
    const host = this.el("#chart-host");
    const width = host.clientWidth || WIDTH;
    const height = host.clientHeight || HEIGHT;
    const a = clientToView(this.view, this.selecting.startX, this.selecting.startY, width, height);
    const b = clientToView(this.view, ev.offsetX, ev.offsetY, width, height);
    const rect: Rect = { x0: a.x, y0: a.y, x1: b.x, y1: b.y };
    const indices = pointsInRect(this.chart.points, rect);
    const ids = indices
      .map((i) => this.payload?.point_refs[String(i)])
      .filter((id): id is string => Boolean(id));
    this.session.setSelection(ids);
    this.updateSelectionBar();
    this.selecting = null;
  }

  /** Region-select resolution used by tests and pointer handling alike. */
  selectRegion(rect: Rect): string[] {
    if (!this.chart || !this.payload) return [];
    const indices = pointsInRect(this.chart.points, rect);
    const ids = indices
      .map((i) => this.payload?.point_refs[String(i)])
      .filter((id): id is string => Boolean(id));
    this.session.setSelection(ids);
    this.updateSelectionBar();
    return this.session.selection();
  }

  private updateSelectionBar(): void {
    const selection = this.session.selection();
    this.el("#selection-count").textContent = selection.length
      ? `${selection.length} selected`
      : "";
    this.el<HTMLButtonElement>("#open-sandbox").hidden = selection.length !== 1;
  }

  async downloadPng(): Promise<void> {
    const svg = this.svgElement();
    const markup = svg ? svg.outerHTML : this.serverSvg ?? this.chart?.svg;
    if (!markup) return;
    await exportPng(markup, WIDTH, HEIGHT, (blob, filename) => {
      const url = URL.createObjectURL(blob);
      const link = document.createElement("a");
      link.href = url;
      link.download = filename;
      link.click();
      URL.revokeObjectURL(url);
    }, `${this.currentKind()}.png`);
  }

  async openSelectedInSandbox(): Promise<void> {
    const [sampleId] = this.session.selection();
    const datasetId = this.session.activeDatasetId;
    if (!sampleId || !datasetId) return;
    const bundle = await this.api.sampleBundle(datasetId, sampleId);
    if (!bundle.lambdas) {
      this.setSandboxMessage(`sample ${sampleId} has no fitted lambdas`);
      return;
    }
    this.sandbox.openSample(bundle.lambdas.lambdas);
    this.syncSliders(this.sandbox.lambdas);
    for (const el of CANONICAL_ELEMENTS) {
      const input = this.el<HTMLInputElement>(`#conc-${el}`);
      const value = bundle.pattern.concentrations_ppm[el];
      input.value = value !== undefined ? String(value) : "";
    }
    this.setSandboxMessage(`sample ${sampleId} loaded`);
    this.el("#sandbox-panel").scrollIntoView();
  }

  private syncSliders(lambdas: number[]): void {
    lambdas.forEach((value, i) => {
      if (i >= SLIDER_BOUNDS.length) return;
      this.el<HTMLInputElement>(`#slider-${i}`).value = String(value);
      this.el(`#slider-value-${i}`).textContent = value.toPrecision(4);
      this.session.setSandboxLambda(i, value);
    });
  }

  private applyPatternEdit(): void {
    const concentrations: Record<string, number> = {};
    for (const el of CANONICAL_ELEMENTS) {
      const raw = this.el<HTMLInputElement>(`#conc-${el}`).value.trim();
      if (raw) concentrations[el] = Number(raw);
    }
    this.sandbox.editPattern(concentrations);
  }

  private setSandboxMessage(text: string): void {
    this.el("#sandbox-message").textContent = text;
  }

  private drawSandboxPattern(
    pattern: Record<string, { y: number; concentration_ppm: number }>,
  ): void {
    this.setSandboxMessage("");
    const entries = CANONICAL_ELEMENTS.filter((el) => el in pattern);
    const ys = entries.map((el) => pattern[el].y);
    const lo = Math.min(...ys, -0.5);
    const hi = Math.max(...ys, 0.5);
    const w = 600;
    const h = 240;
    const step = w / (entries.length - 1 || 1);
    const toY = (y: number) => h - 20 - ((y - lo) / (hi - lo || 1)) * (h - 40);
    const line = entries
      .map((el, i) => `${(i * step).toFixed(1)},${toY(pattern[el].y).toFixed(1)}`)
      .join(" ");
    const zero = toY(0);
    this.el("#sandbox-chart").innerHTML =
      `<svg xmlns="http://www.w3.org/2000/svg" width="${w}" height="${h}"` +
      ` viewBox="0 0 ${w} ${h}" aria-label="reconstructed pattern">` +
      `<line x1="0" y1="${zero.toFixed(1)}" x2="${w}" y2="${zero.toFixed(1)}"` +
      ` stroke="#999" stroke-dasharray="4 3"/>` +
      `<polyline points="${line}" fill="none" stroke="#0072B2" stroke-width="2"/>` +
      `</svg>` +
      `<p class="sandbox-hint">dashed line = reference standard (all λ zero)</p>`;
  }
}
