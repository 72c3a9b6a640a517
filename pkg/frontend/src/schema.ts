/**
 * Schemas for the files the simulation engine writes.  This tool is a
 * read-only consumer: every number it draws comes from those files, nothing
 * is recomputed here.
 */
import { z } from "zod";

export const TRAJECTORY_COLUMNS = [
  "t",
  "mass",
  "lx_norm",
  "lambda",
  "alpha",
  "re_psi2_at_1",
  "im_psi2_at_1",
  "a2_at_1",
  "local_energy",
] as const;

export type TrajectoryColumn = (typeof TRAJECTORY_COLUMNS)[number];

export type Trajectory = Record<TrajectoryColumn, number[]>;

export const SPECTRUM_COLUMNS = ["xi", "abs_ft_initial", "abs_ft_final"] as const;

export type Spectrum = Record<(typeof SPECTRUM_COLUMNS)[number], number[]>;

export const summarySchema = z
  .object({
    spec: z.object({ kind: z.string() }).passthrough(),
    grid_fingerprint: z.string(),
    table_fingerprint: z.string(),
    version: z.string(),
    d_fit_constant: z.number().optional(),
    d_fit_log_coefficient: z.number().optional(),
  })
  .passthrough();

export type Summary = z.infer<typeof summarySchema>;

export class SchemaError extends Error {}

/** Parse a comma-separated table with an exact header. */
export function parseCsv<C extends readonly string[]>(
  text: string,
  columns: C,
): Record<C[number], number[]> {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length < 2) {
    throw new SchemaError("CSV has no data rows");
  }
  const header = lines[0].split(",").map((h) => h.trim());
  for (const col of columns) {
    if (!header.includes(col)) {
      throw new SchemaError(`CSV is missing required column '${col}'`);
    }
  }
  const index = new Map(header.map((h, i) => [h, i]));
  const out = Object.fromEntries(columns.map((c) => [c, [] as number[]])) as Record<
    C[number],
    number[]
  >;
  for (const line of lines.slice(1)) {
    const parts = line.split(",");
    if (parts.length !== header.length) {
      throw new SchemaError(
        `CSV row has ${parts.length} fields, header has ${header.length}`,
      );
    }
    for (const col of columns) {
      const v = Number(parts[index.get(col)!]);
      if (!Number.isFinite(v)) {
        throw new SchemaError(`non-numeric value in column '${col}'`);
      }
      (out[col as C[number]] as number[]).push(v);
    }
  }
  return out;
}

export function parseTrajectory(text: string): Trajectory {
  const t = parseCsv(text, TRAJECTORY_COLUMNS);
  for (let i = 1; i < t.t.length; i++) {
    if (!(t.t[i] > t.t[i - 1])) {
      throw new SchemaError("trajectory times are not strictly increasing");
    }
  }
  return t;
}

export function parseSpectrum(text: string): Spectrum {
  return parseCsv(text, SPECTRUM_COLUMNS);
}

export function parseSummary(text: string): Summary {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch {
    throw new SchemaError("summary is not valid JSON");
  }
  const res = summarySchema.safeParse(raw);
  if (!res.success) {
    throw new SchemaError(`summary failed validation: ${res.error.message}`);
  }
  return res.data;
}
