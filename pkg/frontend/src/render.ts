/**
 * Turns a validated recipe plus its data files into an RGBA raster.
 *
 * Conventions shared by every panel kind:
 *  - xi1 runs left to right across the page;
 *  - xi2 runs top to bottom: the xi2 = domain-minimum edge is at the
 *    top of the image and the xi2 = domain-maximum edge at the bottom
 *    (gravity points down the page);
 *  - rendering is a pure function of the recipe and the referenced
 *    files, so identical inputs give identical bytes.
 */
import { dirname, resolve } from "node:path";
import {
  CURVE_COLORS,
  MISSING,
  Rgb,
  SERIES_COLORS,
  diverging,
  sequential,
} from "./colormap.js";
import { loadCurveCsv, loadGridCsv, loadTrajectoryCsv } from "./csv.js";
import { Raster } from "./raster.js";
import {
  DifferenceRecipe,
  HeatmapRecipe,
  OverlayRecipe,
  PhaseRecipe,
  Recipe,
  RecipeError,
} from "./types.js";

const MARGIN = 24;
const FRAME: Rgb = [40, 40, 40];

interface Frame {
  raster: Raster;
  x0: number;
  y0: number;
  pw: number;
  ph: number;
  toPx: (xi1: number, xi2: number) => [number, number];
}

function makeFrame(recipe: Recipe): Frame {
  const raster = new Raster(recipe.width, recipe.height);
  const x0 = MARGIN;
  const y0 = MARGIN;
  const pw = recipe.width - 2 * MARGIN;
  const ph = recipe.height - 2 * MARGIN;
  const [lo1, hi1] = recipe.domain.xi1;
  const [lo2, hi2] = recipe.domain.xi2;
  if (!(hi1 > lo1) || !(hi2 > lo2)) {
    throw new RecipeError("recipe domain must have positive extent");
  }
  const toPx = (xi1: number, xi2: number): [number, number] => [
    x0 + ((xi1 - lo1) / (hi1 - lo1)) * (pw - 1),
    // larger xi2 maps to larger y, i.e. lower on the page
    y0 + ((xi2 - lo2) / (hi2 - lo2)) * (ph - 1),
  ];
  return { raster, x0, y0, pw, ph, toPx };
}

function resolveData(recipePath: string, dataPath: string): string {
  return resolve(dirname(recipePath), dataPath);
}

type Normalizer = (v: number) => number; // -> [0, 1] or NaN for missing

function makeNormalizer(
  values: number[],
  scale: { type: string; min?: number; max?: number } | undefined,
): { norm: Normalizer; color: (t: number) => Rgb } {
  const finite = values.filter(Number.isFinite);
  if (finite.length === 0) {
    throw new RecipeError("grid map contains no finite values");
  }
  const kind = scale?.type ?? "linear";
  if (kind === "diverging") {
    const limit = Math.max(
      Math.abs(scale?.min ?? -Infinity),
      Math.abs(scale?.max ?? Infinity),
      ...(scale?.min === undefined && scale?.max === undefined
        ? finite.map(Math.abs)
        : []),
    );
    const span = limit > 0 && Number.isFinite(limit) ? limit : 1;
    return { norm: (v) => v / span, color: diverging };
  }
  if (kind === "log") {
    const positive = finite.filter((v) => v > 0);
    const lo = Math.log10(scale?.min ?? (positive.length ? Math.min(...positive) : 1e-12));
    const hi = Math.log10(scale?.max ?? (positive.length ? Math.max(...positive) : 1));
    const span = hi > lo ? hi - lo : 1;
    return {
      norm: (v) => (v > 0 ? (Math.log10(v) - lo) / span : 0),
      color: sequential,
    };
  }
  const lo = scale?.min ?? Math.min(...finite);
  const hi = scale?.max ?? Math.max(...finite);
  const span = hi > lo ? hi - lo : 1;
  return { norm: (v) => (v - lo) / span, color: sequential };
}

function paintGrid(
  frame: Frame,
  recipePath: string,
  recipe: HeatmapRecipe | OverlayRecipe | DifferenceRecipe,
): void {
  const grid = loadGridCsv(resolveData(recipePath, recipe.grid.path));
  const { n1, n2 } = recipe.grid;
  if (grid.value.length !== n1 * n2) {
    throw new RecipeError(
      `grid CSV has ${grid.value.length} rows, recipe says ${n1} x ${n2}`,
    );
  }
  const scale =
    recipe.kind === "difference" && recipe.scale === undefined
      ? { type: "diverging" as const }
      : recipe.scale;
  const { norm, color } = makeNormalizer(grid.value, scale);
  // one rectangle per lattice cell, centered on the lattice point
  for (let i1 = 0; i1 < n1; i1++) {
    for (let i2 = 0; i2 < n2; i2++) {
      const v = grid.value[i1 * n2 + i2];
      const rgb = Number.isFinite(v) ? color(norm(v)) : MISSING;
      // cell edges at half-integer lattice indices
      const xa = frame.x0 + Math.round(((i1 - 0.5) / (n1 - 1)) * (frame.pw - 1));
      const xb = frame.x0 + Math.round(((i1 + 0.5) / (n1 - 1)) * (frame.pw - 1));
      const ya = frame.y0 + Math.round(((i2 - 0.5) / (n2 - 1)) * (frame.ph - 1));
      const yb = frame.y0 + Math.round(((i2 + 0.5) / (n2 - 1)) * (frame.ph - 1));
      const cx0 = Math.max(frame.x0, xa);
      const cy0 = Math.max(frame.y0, ya);
      const cx1 = Math.min(frame.x0 + frame.pw, xb);
      const cy1 = Math.min(frame.y0 + frame.ph, yb);
      frame.raster.fillRect(cx0, cy0, cx1 - cx0 + 1, cy1 - cy0 + 1, rgb);
    }
  }
}

function paintCurves(
  frame: Frame,
  recipePath: string,
  curves: Array<{ path: string }>,
  thickness: number,
): void {
  curves.forEach((curve, i) => {
    const pts = loadCurveCsv(resolveData(recipePath, curve.path)).map(
      ([a, b]) => frame.toPx(a, b),
    );
    frame.raster.polyline(pts, CURVE_COLORS[i % CURVE_COLORS.length], thickness);
  });
}

function renderPhase(recipe: PhaseRecipe, recipePath: string): Raster {
  const frame = makeFrame(recipe);
  recipe.series.forEach((series, i) => {
    const pts = loadTrajectoryCsv(
      resolveData(recipePath, series.path),
      series.columns,
    ).map(([a, b]) => frame.toPx(a, b));
    frame.raster.polyline(pts, SERIES_COLORS[i % SERIES_COLORS.length], 2);
  });
  paintCurves(frame, recipePath, recipe.curves ?? [], 2);
  for (const m of recipe.markers ?? []) {
    const [x, y] = frame.toPx(m.xi1, m.xi2);
    frame.raster.marker(x, y, [0, 0, 0]);
  }
  frame.raster.frame(frame.x0, frame.y0, frame.pw, frame.ph, FRAME);
  return frame.raster;
}

function renderGridPanel(
  recipe: HeatmapRecipe | OverlayRecipe | DifferenceRecipe,
  recipePath: string,
): Raster {
  const frame = makeFrame(recipe);
  paintGrid(frame, recipePath, recipe);
  if (recipe.kind === "overlay") {
    paintCurves(frame, recipePath, recipe.curves, 3);
  }
  frame.raster.frame(frame.x0, frame.y0, frame.pw, frame.ph, FRAME);
  return frame.raster;
}

/** Render a recipe located at recipePath (used to resolve data paths). */
export function render(recipe: Recipe, recipePath: string): Raster {
  switch (recipe.kind) {
    case "phase":
      return renderPhase(recipe, recipePath);
    case "heatmap":
    case "overlay":
    case "difference":
      return renderGridPanel(recipe, recipePath);
  }
}
