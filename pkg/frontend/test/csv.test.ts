import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";
import { GRID_COLUMNS, loadCurveCsv, loadGridCsv, loadTrajectoryCsv } from "../src/csv.js";
import { RecipeError } from "../src/types.js";

const dir = mkdtempSync(join(tmpdir(), "csv-"));

function write(name: string, text: string): string {
  const p = join(dir, name);
  writeFileSync(p, text);
  return p;
}

const HEADER = GRID_COLUMNS.join(",");

describe("grid CSV", () => {
  it("loads values and coordinates", () => {
    const p = write("ok.csv", `${HEADER}\n0,0,1.5,0,1,0,0,0,0,0\n0,1,2.5,0,0,0,0,1,0,0\n`);
    const g = loadGridCsv(p);
    expect(g.value).toEqual([1.5, 2.5]);
    expect(g.xi2).toEqual([0, 1]);
  });

  it("keeps nan cells as NaN", () => {
    const p = write("nan.csv", `${HEADER}\n0,0,nan,0,1,0,0,0,0,0\n`);
    expect(loadGridCsv(p).value[0]).toBeNaN();
  });

  it("rejects a wrong header", () => {
    const p = write("bad.csv", "a,b,c\n1,2,3\n");
    expect(() => loadGridCsv(p)).toThrow(RecipeError);
  });

  it("rejects ragged rows", () => {
    const p = write("ragged.csv", `${HEADER}\n1,2,3\n`);
    expect(() => loadGridCsv(p)).toThrow(RecipeError);
  });

  it("rejects a missing file", () => {
    expect(() => loadGridCsv(join(dir, "nope.csv"))).toThrow(RecipeError);
  });
});

describe("trajectory CSV", () => {
  it("extracts the named columns", () => {
    const p = write(
      "traj.csv",
      "t,xi1,xi2,exit_time,exit_side\n0,1,2,,\n0.1,1.1,2.1,,\n",
    );
    const pts = loadTrajectoryCsv(p, ["xi1", "xi2"]);
    expect(pts).toEqual([
      [1, 2],
      [1.1, 2.1],
    ]);
  });

  it("rejects missing columns", () => {
    const p = write("traj2.csv", "t,xi1,xi2,exit_time,exit_side\n0,1,2,,\n");
    expect(() => loadTrajectoryCsv(p, ["y1", "y2"])).toThrow(RecipeError);
  });

  it("rejects non-trajectory headers", () => {
    const p = write("traj3.csv", "xi1,xi2\n1,2\n");
    expect(() => loadTrajectoryCsv(p, ["xi1", "xi2"])).toThrow(RecipeError);
  });
});

describe("curve CSV", () => {
  it("loads an ordered polyline", () => {
    const p = write("curve.csv", "xi1,xi2\n0,0\n1,1\n");
    expect(loadCurveCsv(p)).toEqual([
      [0, 0],
      [1, 1],
    ]);
  });

  it("rejects extra columns", () => {
    const p = write("curve2.csv", "xi1,xi2,z\n0,0,0\n");
    expect(() => loadCurveCsv(p)).toThrow(RecipeError);
  });
});
