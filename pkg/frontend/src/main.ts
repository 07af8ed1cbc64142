/**
 * CLI: render one or more recipe files to PNG.
 *
 *   node dist/src/main.js fig.recipe.json [...]
 *
 * Each output lands next to its recipe with the .recipe.json suffix
 * replaced by .png, unless --out-dir is given.  Any schema or data
 * mismatch aborts with a nonzero exit code and a diagnostic.
 */
import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { basename, dirname, join } from "node:path";
import { toPng } from "./png.js";
import { render } from "./render.js";
import { RecipeError, parseRecipe } from "./types.js";

function outputPath(recipePath: string, outDir: string | null): string {
  const name = basename(recipePath).replace(/\.recipe\.json$/, "") + ".png";
  return join(outDir ?? dirname(recipePath), name);
}

export function main(argv: string[]): number {
  const files: string[] = [];
  let outDir: string | null = null;
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === "--out-dir") {
      outDir = argv[++i];
      if (outDir === undefined) {
        console.error("--out-dir requires a value");
        return 2;
      }
    } else {
      files.push(argv[i]);
    }
  }
  if (files.length === 0) {
    console.error("usage: main.js [--out-dir DIR] RECIPE.recipe.json ...");
    return 2;
  }
  if (outDir !== null) {
    mkdirSync(outDir, { recursive: true });
  }
  for (const file of files) {
    let data: unknown;
    try {
      data = JSON.parse(readFileSync(file, "utf8"));
    } catch (err) {
      console.error(`${file}: cannot read recipe: ${err}`);
      return 1;
    }
    try {
      const recipe = parseRecipe(data);
      const raster = render(recipe, file);
      const out = outputPath(file, outDir);
      writeFileSync(out, toPng(raster));
      console.log(`rendered ${file} -> ${out}`);
    } catch (err) {
      if (err instanceof RecipeError) {
        console.error(`${file}: ${err.message}`);
        return 1;
      }
      throw err;
    }
  }
  return 0;
}

if (process.argv[1] && process.argv[1].endsWith("main.js")) {
  process.exit(main(process.argv.slice(2)));
}
