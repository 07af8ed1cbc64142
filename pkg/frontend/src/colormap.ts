/**
 * Color maps: a sequential viridis-style ramp for magnitudes and a
 * blue-white-red diverging ramp for signed differences.
 */

export type Rgb = [number, number, number];

const VIRIDIS_STOPS: Rgb[] = [
  [68, 1, 84],
  [59, 82, 139],
  [33, 145, 140],
  [94, 201, 98],
  [253, 231, 37],
];

function lerp(a: number, b: number, t: number): number {
  return a + (b - a) * t;
}

function ramp(stops: Rgb[], t: number): Rgb {
  const x = Math.min(1, Math.max(0, t)) * (stops.length - 1);
  const i = Math.min(stops.length - 2, Math.floor(x));
  const f = x - i;
  return [
    Math.round(lerp(stops[i][0], stops[i + 1][0], f)),
    Math.round(lerp(stops[i][1], stops[i + 1][1], f)),
    Math.round(lerp(stops[i][2], stops[i + 1][2], f)),
  ];
}

/** Sequential map, t in [0, 1]. */
export function sequential(t: number): Rgb {
  return ramp(VIRIDIS_STOPS, t);
}

const DIVERGING_STOPS: Rgb[] = [
  [33, 102, 172],
  [247, 247, 247],
  [178, 24, 43],
];

/** Diverging map, t in [-1, 1] with 0 at the neutral midpoint. */
export function diverging(t: number): Rgb {
  return ramp(DIVERGING_STOPS, (Math.min(1, Math.max(-1, t)) + 1) / 2);
}

export const MISSING: Rgb = [160, 160, 160];

export const SERIES_COLORS: Rgb[] = [
  [31, 119, 180],
  [255, 127, 14],
  [44, 160, 44],
  [214, 39, 40],
  [148, 103, 189],
  [140, 86, 75],
];

export const CURVE_COLORS: Rgb[] = [
  [0, 0, 0],
  [230, 0, 140],
  [0, 140, 230],
];
