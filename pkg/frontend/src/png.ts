/** PNG export: serialise the current SVG view and rasterise it on a canvas.
 *
 * The rasteriser is injectable because canvas drawing only exists in real
 * browsers; tests cover the serialisation and the pipeline around it.
 */

export type Rasterizer = (
  svgMarkup: string,
  width: number,
  height: number,
) => Promise<Blob>;

/** Serialise an SVG element (or markup string) with its current viewBox. */
export function serializeSvg(svg: string | { outerHTML: string }): string {
  const markup = typeof svg === "string" ? svg : svg.outerHTML;
  if (!markup.trimStart().startsWith("<svg")) {
    throw new Error("not an SVG document");
  }
  return markup;
}

export const browserRasterizer: Rasterizer = (svgMarkup, width, height) =>
  new Promise((resolve, reject) => {
    const blob = new Blob([svgMarkup], { type: "image/svg+xml" });
    const url = URL.createObjectURL(blob);
    const image = new Image();
    image.onload = () => {
      const canvas = document.createElement("canvas");
      canvas.width = width;
      canvas.height = height;
      const ctx = canvas.getContext("2d");
      if (!ctx) {
        URL.revokeObjectURL(url);
        reject(new Error("no 2d canvas context"));
        return;
      }
      ctx.drawImage(image, 0, 0, width, height);
      URL.revokeObjectURL(url);
      canvas.toBlob((png) => {
        if (png && png.size > 0) resolve(png);
        else reject(new Error("empty PNG"));
      }, "image/png");
    };
    image.onerror = () => {
      URL.revokeObjectURL(url);
      reject(new Error("could not load SVG image"));
    };
    image.src = url;
  });

/** Rasterise the current view and hand the bytes to a save callback. */
export async function exportPng(
  svgMarkup: string,
  width: number,
  height: number,
  save: (blob: Blob, filename: string) => void,
  filename = "chart.png",
  rasterize: Rasterizer = browserRasterizer,
): Promise<Blob> {
  const serialized = serializeSvg(svgMarkup);
  const png = await rasterize(serialized, width, height);
  if (png.size === 0) {
    throw new Error("empty PNG");
  }
  save(png, filename);
  return png;
}
