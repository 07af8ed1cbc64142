import { describe, expect, it } from "vitest";
import { RecipeError, parseRecipe } from "../src/types.js";

const heatmap = {
  kind: "heatmap",
  title: "t",
  width: 64,
  height: 64,
  domain: { xi1: [0, Math.PI], xi2: [0, Math.PI] },
  grid: { path: "g.csv", n1: 3, n2: 3 },
};

describe("recipe schema", () => {
  it("accepts a minimal heatmap recipe", () => {
    const r = parseRecipe(heatmap);
    expect(r.kind).toBe("heatmap");
  });

  it("rejects unknown keys", () => {
    expect(() => parseRecipe({ ...heatmap, banana: 1 })).toThrow(RecipeError);
  });

  it("rejects unknown kinds", () => {
    expect(() => parseRecipe({ ...heatmap, kind: "scatter" })).toThrow(RecipeError);
  });

  it("rejects a heatmap without a grid reference", () => {
    const { grid, ...rest } = heatmap;
    expect(() => parseRecipe(rest)).toThrow(RecipeError);
  });

  it("rejects an overlay without curves", () => {
    expect(() => parseRecipe({ ...heatmap, kind: "overlay", curves: [] })).toThrow(
      RecipeError,
    );
  });

  it("rejects bad scale types", () => {
    expect(() => parseRecipe({ ...heatmap, scale: { type: "rainbow" } })).toThrow(
      RecipeError,
    );
  });

  it("requires phase series columns to be a pair", () => {
    expect(() =>
      parseRecipe({
        kind: "phase",
        title: "t",
        width: 64,
        height: 64,
        domain: heatmap.domain,
        series: [{ path: "a.csv", columns: ["xi1"] }],
      }),
    ).toThrow(RecipeError);
  });
});
