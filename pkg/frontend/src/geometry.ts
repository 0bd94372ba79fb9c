/** Viewport math for the chart toolbar: pan, zoom, and region selection.
 * Pure functions over plain data so every behaviour is unit-testable.
 */

export interface ViewBox {
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface Rect {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

export interface IndexedPoint {
  index: number;
  x: number;
  y: number;
}

export function normalizeRect(rect: Rect): Rect {
  return {
    x0: Math.min(rect.x0, rect.x1),
    y0: Math.min(rect.y0, rect.y1),
    x1: Math.max(rect.x0, rect.x1),
    y1: Math.max(rect.y0, rect.y1),
  };
}

/** Indices of points inside the (inclusive) rectangle, in input order. */
export function pointsInRect(points: IndexedPoint[], rect: Rect): number[] {
  const r = normalizeRect(rect);
  return points
    .filter((p) => p.x >= r.x0 && p.x <= r.x1 && p.y >= r.y0 && p.y <= r.y1)
    .map((p) => p.index);
}

/** Pan the view box by a fraction of its own size. */
export function pan(view: ViewBox, dxFraction: number, dyFraction: number): ViewBox {
  return {
    x: view.x + view.w * dxFraction,
    y: view.y + view.h * dyFraction,
    w: view.w,
    h: view.h,
  };
}

/** Zoom about a focus point (defaults to the centre). factor > 1 zooms in. */
export function zoom(
  view: ViewBox,
  factor: number,
  focusX?: number,
  focusY?: number,
): ViewBox {
  const fx = focusX ?? view.x + view.w / 2;
  const fy = focusY ?? view.y + view.h / 2;
  const w = view.w / factor;
  const h = view.h / factor;
  return {
    x: fx - ((fx - view.x) / view.w) * w,
    y: fy - ((fy - view.y) / view.h) * h,
    w,
    h,
  };
}

export function viewBoxAttr(view: ViewBox): string {
  return `${view.x} ${view.y} ${view.w} ${view.h}`;
}

/** Map client (pixel) coordinates into view-box coordinates. */
export function clientToView(
  view: ViewBox,
  clientX: number,
  clientY: number,
  clientWidth: number,
  clientHeight: number,
): { x: number; y: number } {
  return {
    x: view.x + (clientX / clientWidth) * view.w,
    y: view.y + (clientY / clientHeight) * view.h,
  };
}
