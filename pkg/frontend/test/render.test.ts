import { mkdtempSync, readdirSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";
import { GRID_COLUMNS } from "../src/csv.js";
import { sequential } from "../src/colormap.js";
import { render } from "../src/render.js";
import { parseRecipe } from "../src/types.js";

const dir = mkdtempSync(join(tmpdir(), "render-"));
const PI = Math.PI;

function gridCsv(n1: number, n2: number, value: (i1: number, i2: number) => number): string {
  const lines = [GRID_COLUMNS.join(",")];
  for (let i1 = 0; i1 < n1; i1++) {
    for (let i2 = 0; i2 < n2; i2++) {
      const xi1 = (i1 / (n1 - 1)) * PI;
      const xi2 = (i2 / (n2 - 1)) * PI;
      const v = value(i1, i2);
      lines.push(`${xi1},${xi2},${Number.isFinite(v) ? v : "nan"},0,1,0,0,0,0,0`);
    }
  }
  return lines.join("\n") + "\n";
}

function heatmapRecipe(csvName: string, n1: number, n2: number) {
  return parseRecipe({
    kind: "heatmap",
    title: "t",
    width: 120,
    height: 120,
    domain: { xi1: [0, PI], xi2: [0, PI] },
    grid: { path: csvName, n1, n2 },
  });
}

describe("heatmap orientation", () => {
  it("renders the xi2 = pi lattice row at the bottom of the page", () => {
    // value increases with xi2 only: 0 at xi2 = 0, 1 at xi2 = pi
    const name = "ramp.csv";
    writeFileSync(join(dir, name), gridCsv(5, 5, (_i1, i2) => i2 / 4));
    const raster = render(heatmapRecipe(name, 5, 5), join(dir, "r.recipe.json"));
    const lo = sequential(0);
    const hi = sequential(1);
    const cx = Math.floor(raster.width / 2);
    // just inside the plot frame: top row must be the low color,
    // bottom row the high color (gravity points down the page)
    expect(raster.get(cx, 26)).toEqual(lo);
    expect(raster.get(cx, raster.height - 27)).toEqual(hi);
  });

  it("maps xi1 left to right", () => {
    const name = "ramp1.csv";
    writeFileSync(join(dir, name), gridCsv(5, 5, (i1, _i2) => i1 / 4));
    const raster = render(heatmapRecipe(name, 5, 5), join(dir, "r.recipe.json"));
    const cy = Math.floor(raster.height / 2);
    expect(raster.get(26, cy)).toEqual(sequential(0));
    expect(raster.get(raster.width - 27, cy)).toEqual(sequential(1));
  });
});

describe("grid panel validation", () => {
  it("rejects a row count that disagrees with the recipe lattice", () => {
    const name = "small.csv";
    writeFileSync(join(dir, name), gridCsv(3, 3, () => 0.5));
    expect(() =>
      render(heatmapRecipe(name, 5, 5), join(dir, "r.recipe.json")),
    ).toThrow(/rows/);
  });

  it("paints nan cells grey in difference panels", () => {
    const name = "withnan.csv";
    writeFileSync(
      join(dir, name),
      gridCsv(3, 3, (i1, i2) => (i1 === 1 && i2 === 1 ? NaN : 0.5)),
    );
    const recipe = parseRecipe({
      kind: "difference",
      title: "t",
      width: 120,
      height: 120,
      domain: { xi1: [0, PI], xi2: [0, PI] },
      grid: { path: name, n1: 3, n2: 3 },
    });
    const raster = render(recipe, join(dir, "r.recipe.json"));
    const c = raster.get(Math.floor(raster.width / 2), Math.floor(raster.height / 2));
    expect(c).toEqual([160, 160, 160]);
  });
});

describe("deterministic output", () => {
  it("is a pure function of recipe and data", () => {
    const name = "det.csv";
    writeFileSync(join(dir, name), gridCsv(4, 4, (a, b) => a + b));
    const r1 = render(heatmapRecipe(name, 4, 4), join(dir, "r.recipe.json"));
    const r2 = render(heatmapRecipe(name, 4, 4), join(dir, "r.recipe.json"));
    expect(Buffer.from(r1.data).equals(Buffer.from(r2.data))).toBe(true);
  });
});

describe("fixture corpus", () => {
  const fixtures = join(__dirname, "..", "fixtures");
  const families = readdirSync(fixtures).filter((d) => d.startsWith("fig"));

  it("covers all nine figure families", () => {
    expect(families.length).toBe(9);
  });

  for (const family of families) {
    it(`renders every panel of ${family}`, async () => {
      const { readFileSync } = await import("node:fs");
      const recipes = readdirSync(join(fixtures, family)).filter((f) =>
        f.endsWith(".recipe.json"),
      );
      expect(recipes.length).toBeGreaterThan(0);
      for (const file of recipes) {
        const path = join(fixtures, family, file);
        const recipe = parseRecipe(JSON.parse(readFileSync(path, "utf8")));
        const raster = render(recipe, path);
        expect(raster.width).toBeGreaterThan(0);
        // some pixel differs from the white background
        const bg = [255, 255, 255];
        let painted = false;
        for (let i = 0; i < raster.data.length && !painted; i += 4) {
          painted =
            raster.data[i] !== bg[0] ||
            raster.data[i + 1] !== bg[1] ||
            raster.data[i + 2] !== bg[2];
        }
        expect(painted).toBe(true);
      }
    });
  }
});
