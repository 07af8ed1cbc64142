/**
 * Strict CSV loaders for the simulation output formats.
 *
 * Headers are checked exactly; a file whose header does not match the
 * documented format is rejected rather than guessed at.
 */
import { readFileSync } from "node:fs";
import Papa from "papaparse";
import { RecipeError } from "./types.js";

export const GRID_COLUMNS = [
  "xi1",
  "xi2",
  "value",
  "se",
  "n_left",
  "n_right",
  "n_top",
  "n_bottom",
  "n_censored",
  "n_failed",
] as const;

export interface GridMap {
  xi1: number[];
  xi2: number[];
  value: number[];
}

function parseRows(path: string): string[][] {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new RecipeError(`cannot read data file ${path}: ${err}`);
  }
  const parsed = Papa.parse<string[]>(text.trim(), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    throw new RecipeError(`malformed CSV ${path}: ${parsed.errors[0].message}`);
  }
  return parsed.data;
}

/** Load a grid-map CSV; header must match the documented columns exactly. */
export function loadGridCsv(path: string): GridMap {
  const rows = parseRows(path);
  const header = rows[0];
  if (header.join(",") !== GRID_COLUMNS.join(",")) {
    throw new RecipeError(
      `unexpected grid CSV header in ${path}: got [${header.join(",")}]`,
    );
  }
  const xi1: number[] = [];
  const xi2: number[] = [];
  const value: number[] = [];
  for (const row of rows.slice(1)) {
    if (row.length !== GRID_COLUMNS.length) {
      throw new RecipeError(`ragged row in ${path}: ${row.join(",")}`);
    }
    xi1.push(Number(row[0]));
    xi2.push(Number(row[1]));
    // "nan" cells stay NaN and are painted as missing
    value.push(row[2] === "nan" ? NaN : Number(row[2]));
  }
  return { xi1, xi2, value };
}

/** Load two named columns of a trajectory CSV as a polyline. */
export function loadTrajectoryCsv(
  path: string,
  columns: [string, string],
): Array<[number, number]> {
  const rows = parseRows(path);
  const header = rows[0];
  if (header[0] !== "t" || header[header.length - 1] !== "exit_side") {
    throw new RecipeError(
      `unexpected trajectory CSV header in ${path}: got [${header.join(",")}]`,
    );
  }
  const idx = columns.map((c) => header.indexOf(c));
  if (idx.some((i) => i < 0)) {
    throw new RecipeError(
      `trajectory CSV ${path} lacks columns ${columns.join(",")}`,
    );
  }
  return rows
    .slice(1)
    .map((row) => [Number(row[idx[0]]), Number(row[idx[1]])] as [number, number]);
}

/** Load an xi1,xi2 polyline CSV (manifolds, separatrix branches). */
export function loadCurveCsv(path: string): Array<[number, number]> {
  const rows = parseRows(path);
  if (rows[0].join(",") !== "xi1,xi2") {
    throw new RecipeError(
      `unexpected curve CSV header in ${path}: got [${rows[0].join(",")}]`,
    );
  }
  return rows.slice(1).map((row) => {
    if (row.length !== 2) {
      throw new RecipeError(`ragged row in ${path}: ${row.join(",")}`);
    }
    return [Number(row[0]), Number(row[1])] as [number, number];
  });
}
