import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { SandboxController, SANDBOX_DEBOUNCE_MS } from "../src/sandbox.js";
import type { ForwardResponse, LambdaSetJson } from "../src/types.js";
import { forwardResponse } from "./fixtures.js";

function lambdaSet(lambdas: number[]): LambdaSetJson {
  return {
    sample_id: "sandbox",
    lambdas,
    residuals: {},
    rms_misfit: 0,
    excluded: [],
    basis_id: "b",
  };
}

describe("SandboxController", () => {
  beforeEach(() => {
    vi.useFakeTimers();
  });

  afterEach(() => {
    vi.useRealTimers();
  });

  it("debounces slider motion to at most one forward call per pause", async () => {
    const forward = vi.fn(async (lambdas: number[]) => forwardResponse(lambdas));
    const controller = new SandboxController({
      forward,
      inverse: async () => lambdaSet([0, 0, 0, 0]),
    });
    for (let i = 0; i < 25; i += 1) {
      controller.setSlider(0, i / 10);
      vi.advanceTimersByTime(20); // faster than the debounce window
    }
    expect(forward).not.toHaveBeenCalled();
    await vi.advanceTimersByTimeAsync(SANDBOX_DEBOUNCE_MS);
    expect(forward).toHaveBeenCalledTimes(1);
    expect(forward.mock.calls[0][0][0]).toBeCloseTo(2.4);
  });

  it("debounce window is at most 150 ms", async () => {
    const forward = vi.fn(async (lambdas: number[]) => forwardResponse(lambdas));
    const controller = new SandboxController({
      forward,
      inverse: async () => lambdaSet([0, 0, 0, 0]),
    });
    controller.setSlider(0, 1);
    await vi.advanceTimersByTimeAsync(150);
    expect(forward).toHaveBeenCalledTimes(1);
  });

  it("all-zero sliders reproduce the reference standard line", async () => {
    const patterns: ForwardResponse["pattern"][] = [];
    const controller = new SandboxController(
      {
        forward: async (lambdas) => forwardResponse(lambdas),
        inverse: async () => lambdaSet([0, 0, 0, 0]),
      },
      { onPattern: (p) => patterns.push(p) },
    );
    controller.setSlider(0, 0);
    await vi.advanceTimersByTimeAsync(200);
    expect(patterns).toHaveLength(1);
    for (const point of Object.values(patterns[0])) {
      expect(point.y).toBe(0);
    }
  });

  it("discards stale forward responses (latest wins)", async () => {
    const resolvers: ((value: ForwardResponse) => void)[] = [];
    const controller = new SandboxController(
      {
        forward: (lambdas) =>
          new Promise<ForwardResponse>((resolve) => {
            resolvers.push(() => resolve(forwardResponse(lambdas)));
          }),
        inverse: async () => lambdaSet([0, 0, 0, 0]),
      },
      { onPattern: (p) => applied.push(p) },
    );
    const applied: ForwardResponse["pattern"][] = [];
    controller.setSlider(0, 1);
    await vi.advanceTimersByTimeAsync(SANDBOX_DEBOUNCE_MS);
    controller.setSlider(0, 2);
    await vi.advanceTimersByTimeAsync(SANDBOX_DEBOUNCE_MS);
    expect(resolvers).toHaveLength(2);
    // Second (newer) response lands first; the first is then stale.
    resolvers[1](forwardResponse([2, 0, 0, 0]));
    await vi.runAllTimersAsync();
    resolvers[0](forwardResponse([1, 0, 0, 0]));
    await vi.runAllTimersAsync();
    expect(applied).toHaveLength(1);
    expect(applied[0].La.y).toBeCloseTo(2);
  });

  it("openSample puts sliders at the point's lambdas", () => {
    const controller = new SandboxController({
      forward: async (lambdas) => forwardResponse(lambdas),
      inverse: async () => lambdaSet([0, 0, 0, 0]),
    });
    controller.openSample([4.2, 0.13, -0.004, 0.0002]);
    expect(controller.lambdas).toEqual([4.2, 0.13, -0.004, 0.0002]);
  });

  it("openSample clamps out-of-bounds coefficients", () => {
    const controller = new SandboxController({
      forward: async (lambdas) => forwardResponse(lambdas),
      inverse: async () => lambdaSet([0, 0, 0, 0]),
    });
    controller.openSample([99, -3, 0, 0]);
    expect(controller.lambdas[0]).toBe(15);
    expect(controller.lambdas[1]).toBe(-1);
  });

  it("pattern edits run the inverse fit and update sliders", async () => {
    const seen: number[][] = [];
    const controller = new SandboxController(
      {
        forward: async (lambdas) => forwardResponse(lambdas),
        inverse: async () => lambdaSet([3.1, 0.2, -0.01, 0.001]),
      },
      { onLambdas: (lambdas) => seen.push(lambdas) },
    );
    controller.editPattern({ La: 10, Ce: 20 });
    await vi.advanceTimersByTimeAsync(200);
    expect(seen).toHaveLength(1);
    expect(controller.lambdas).toEqual([3.1, 0.2, -0.01, 0.001]);
  });

  it("surfaces named errors like TooFewPoints without applying stale fits", async () => {
    const errors: string[] = [];
    const failure = Object.assign(new Error("3 usable points"), {
      code: "TooFewPoints",
    });
    const controller = new SandboxController(
      {
        forward: async (lambdas) => forwardResponse(lambdas),
        inverse: async () => {
          throw failure;
        },
      },
      { onError: (code) => errors.push(code) },
    );
    controller.editPattern({ La: 10, Ce: 20, Pr: 3 });
    await vi.advanceTimersByTimeAsync(200);
    expect(errors).toEqual(["TooFewPoints"]);
    expect(controller.lambdas).toEqual([0, 0, 0, 0]);
  });
});
