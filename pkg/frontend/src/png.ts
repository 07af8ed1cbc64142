/** PNG serialization of a raster via pngjs (deterministic output). */
import { PNG } from "pngjs";
import type { Raster } from "./raster.js";

export function toPng(raster: Raster): Buffer {
  const png = new PNG({ width: raster.width, height: raster.height });
  Buffer.from(raster.data).copy(png.data);
  return PNG.sync.write(png, { deflateLevel: 9 });
}
