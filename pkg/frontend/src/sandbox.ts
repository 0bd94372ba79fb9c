/** Sandbox controller: maps slider motion to forward-model calls and
 * pattern edits to inverse fits, debounced and race-safe.
 *
 * At most one request outcome is applied per direction and stale responses
 * are discarded by sequence number (latest wins), so a slow early response
 * can never overwrite a newer one. The scheduler is injectable for tests.
 */

import type { ForwardResponse, LambdaSetJson } from "./types.js";
import { clampToBounds, SLIDER_BOUNDS } from "./state.js";

export const SANDBOX_DEBOUNCE_MS = 150;

export interface SandboxTransport {
  forward(lambdas: number[], standard: string): Promise<ForwardResponse>;
  inverse(
    concentrations: Record<string, number>,
    degree: number,
    standard: string,
  ): Promise<LambdaSetJson>;
}

type Scheduler = (fn: () => void, ms: number) => unknown;
type Canceller = (handle: unknown) => void;

export interface SandboxEvents {
  onPattern?: (pattern: ForwardResponse["pattern"]) => void;
  onLambdas?: (lambdas: number[]) => void;
  onError?: (code: string, message: string) => void;
}

export class SandboxController {
  readonly lambdas: number[];
  standard = "chondrite";
  private forwardTimer: unknown = null;
  private inverseTimer: unknown = null;
  private forwardSeq = 0;
  private forwardApplied = 0;
  private inverseSeq = 0;
  private inverseApplied = 0;
  private readonly debounceMs: number;
  private readonly schedule: Scheduler;
  private readonly cancel: Canceller;

  constructor(
    private readonly transport: SandboxTransport,
    private readonly events: SandboxEvents = {},
    options: { debounceMs?: number; schedule?: Scheduler; cancel?: Canceller } = {},
  ) {
    this.lambdas = SLIDER_BOUNDS.map(() => 0);
    this.debounceMs = options.debounceMs ?? SANDBOX_DEBOUNCE_MS;
    this.schedule = options.schedule ?? ((fn, ms) => setTimeout(fn, ms));
    this.cancel = options.cancel ?? ((handle) => clearTimeout(handle as number));
  }

  /** Clamp, store, and schedule a debounced forward call. */
  setSlider(index: number, value: number): number {
    const clamped = clampToBounds(index, value);
    this.lambdas[index] = clamped;
    this.scheduleForward();
    return clamped;
  }

  /** Load a fitted point: sliders jump to its coefficients (clamped). */
  openSample(lambdas: number[]): void {
    lambdas.forEach((value, index) => {
      if (index < this.lambdas.length) {
        this.lambdas[index] = clampToBounds(index, value);
      }
    });
    this.scheduleForward();
  }

  private scheduleForward(): void {
    if (this.forwardTimer !== null) {
      this.cancel(this.forwardTimer);
    }
    this.forwardTimer = this.schedule(() => {
      this.forwardTimer = null;
      void this.runForward();
    }, this.debounceMs);
  }

  private async runForward(): Promise<void> {
    const seq = ++this.forwardSeq;
    try {
      const response = await this.transport.forward([...this.lambdas], this.standard);
      if (seq <= this.forwardApplied) return; // a newer response already landed
      this.forwardApplied = seq;
      this.events.onPattern?.(response.pattern);
    } catch (err) {
      if (seq <= this.forwardApplied) return;
      this.forwardApplied = seq;
      this.reportError(err);
    }
  }

  /** Debounced inverse fit from an edited concentration pattern. */
  editPattern(concentrations: Record<string, number>, degree = 4): void {
    if (this.inverseTimer !== null) {
      this.cancel(this.inverseTimer);
    }
    this.inverseTimer = this.schedule(() => {
      this.inverseTimer = null;
      void this.runInverse(concentrations, degree);
    }, this.debounceMs);
  }

  private async runInverse(
    concentrations: Record<string, number>,
    degree: number,
  ): Promise<void> {
    const seq = ++this.inverseSeq;
    try {
      const fitted = await this.transport.inverse(
        concentrations,
        degree,
        this.standard,
      );
      if (seq <= this.inverseApplied) return;
      this.inverseApplied = seq;
      fitted.lambdas.forEach((value, index) => {
        if (index < this.lambdas.length) {
          this.lambdas[index] = clampToBounds(index, value);
        }
      });
      this.events.onLambdas?.([...this.lambdas]);
    } catch (err) {
      if (seq <= this.inverseApplied) return;
      this.inverseApplied = seq;
      this.reportError(err);
    }
  }

  private reportError(err: unknown): void {
    const code = (err as { code?: string }).code ?? "Internal";
    const message = err instanceof Error ? err.message : String(err);
    this.events.onError?.(code, message);
  }
}
