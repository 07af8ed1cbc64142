/**
 * Recipe schema for figure panels.
 *
 * A recipe is a self-contained JSON instruction: what kind of panel to
 * draw, which data files feed it (paths relative to the recipe file),
 * and how to map values to the page.  Validation is strict; any
 * unknown shape is a hard error so that producer/consumer drift is
 * caught immediately.
 */
import { z } from "zod";

export const seriesSchema = z
  .object({
    path: z.string(),
    columns: z.tuple([z.string(), z.string()]),
    label: z.string().optional(),
  })
  .strict();

export const curveSchema = z
  .object({
    path: z.string(),
    label: z.string().optional(),
  })
  .strict();

export const markerSchema = z
  .object({
    xi1: z.number(),
    xi2: z.number(),
    label: z.string().optional(),
  })
  .strict();

export const gridRefSchema = z
  .object({
    path: z.string(),
    n1: z.number().int().min(2),
    n2: z.number().int().min(2),
  })
  .strict();

export const scaleSchema = z
  .object({
    type: z.enum(["linear", "log", "diverging"]),
    min: z.number().optional(),
    max: z.number().optional(),
  })
  .strict();

const base = {
  title: z.string(),
  width: z.number().int().min(64).default(560),
  height: z.number().int().min(64).default(560),
  domain: z
    .object({
      xi1: z.tuple([z.number(), z.number()]),
      xi2: z.tuple([z.number(), z.number()]),
    })
    .strict(),
};

export const phaseRecipeSchema = z
  .object({
    kind: z.literal("phase"),
    series: z.array(seriesSchema),
    curves: z.array(curveSchema).optional(),
    markers: z.array(markerSchema).optional(),
    ...base,
  })
  .strict();

export const heatmapRecipeSchema = z
  .object({
    kind: z.literal("heatmap"),
    grid: gridRefSchema,
    scale: scaleSchema.optional(),
    ...base,
  })
  .strict();

export const overlayRecipeSchema = z
  .object({
    kind: z.literal("overlay"),
    grid: gridRefSchema,
    curves: z.array(curveSchema).min(1),
    scale: scaleSchema.optional(),
    ...base,
  })
  .strict();

export const differenceRecipeSchema = z
  .object({
    kind: z.literal("difference"),
    grid: gridRefSchema,
    scale: scaleSchema.optional(),
    ...base,
  })
  .strict();

export const recipeSchema = z.discriminatedUnion("kind", [
  phaseRecipeSchema,
  heatmapRecipeSchema,
  overlayRecipeSchema,
  differenceRecipeSchema,
]);

export type Recipe = z.infer<typeof recipeSchema>;
export type PhaseRecipe = z.infer<typeof phaseRecipeSchema>;
export type HeatmapRecipe = z.infer<typeof heatmapRecipeSchema>;
export type OverlayRecipe = z.infer<typeof overlayRecipeSchema>;
export type DifferenceRecipe = z.infer<typeof differenceRecipeSchema>;

export class RecipeError extends Error {}

/** Parse and validate a recipe object; throws RecipeError on mismatch. */
export function parseRecipe(data: unknown): Recipe {
  const result = recipeSchema.safeParse(data);
  if (!result.success) {
    throw new RecipeError(`invalid recipe: ${result.error.message}`);
  }
  return result.data;
}
