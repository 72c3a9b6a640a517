#!/usr/bin/env node
/**
 * smaplab-plots: turn trajectory CSVs and summary JSONs into SVG figures.
 *
 * Usage:
 *   smaplab-plots <kind> --trajectory out/trajectory.csv \
 *       [--summary out/summary.json] [--spectrum out/spectrum.csv] \
 *       --out figure.svg
 *   smaplab-plots all --dir out --out-dir figures
 *
 * Exit codes: 0 success, 2 schema violation or bad arguments.
 */
import { readFileSync, writeFileSync, mkdirSync, existsSync } from "node:fs";
import { join } from "node:path";
import {
  SchemaError,
  parseSpectrum,
  parseSummary,
  parseTrajectory,
} from "./schema.js";
import { FIGURE_KINDS, FigureInputs, FigureKind, makeFigure } from "./figures.js";

interface Args {
  kind: string;
  flags: Map<string, string>;
}

function parseArgs(argv: string[]): Args {
  if (argv.length === 0) {
    throw new SchemaError(
      `usage: smaplab-plots <${FIGURE_KINDS.join("|")}|all> [--trajectory f] [--summary f] [--spectrum f] [--out f] [--dir d] [--out-dir d]`,
    );
  }
  const [kind, ...rest] = argv;
  const flags = new Map<string, string>();
  for (let i = 0; i < rest.length; i += 2) {
    const key = rest[i];
    const val = rest[i + 1];
    if (!key.startsWith("--") || val === undefined) {
      throw new SchemaError(`bad argument pair: ${key} ${val ?? ""}`);
    }
    flags.set(key.slice(2), val);
  }
  return { kind, flags };
}

function loadInputs(flags: Map<string, string>): FigureInputs {
  const inputs: FigureInputs = {};
  const traj = flags.get("trajectory");
  if (traj) inputs.trajectory = parseTrajectory(read(traj));
  const summary = flags.get("summary");
  if (summary) inputs.summary = parseSummary(read(summary));
  const spectrum = flags.get("spectrum");
  if (spectrum) inputs.spectrum = parseSpectrum(read(spectrum));
  return inputs;
}

function read(path: string): string {
  if (!existsSync(path)) {
    throw new SchemaError(`input file not found: ${path}`);
  }
  return readFileSync(path, "utf8");
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
    if (args.kind === "all") {
      const dir = args.flags.get("dir") ?? "out";
      const outDir = args.flags.get("out-dir") ?? "figures";
      mkdirSync(outDir, { recursive: true });
      const inputs: FigureInputs = {
        trajectory: parseTrajectory(read(join(dir, "trajectory.csv"))),
        summary: parseSummary(read(join(dir, "summary.json"))),
        spectrum: parseSpectrum(read(join(dir, "spectrum.csv"))),
      };
      for (const kind of FIGURE_KINDS) {
        const svg = makeFigure(kind, inputs);
        writeFileSync(join(outDir, `${kind}.svg`), svg);
      }
      console.log(`wrote ${FIGURE_KINDS.length} figures to ${outDir}/`);
      return 0;
    }
    if (!(FIGURE_KINDS as readonly string[]).includes(args.kind)) {
      throw new SchemaError(
        `unknown figure kind '${args.kind}'; expected ${FIGURE_KINDS.join(", ")} or all`,
      );
    }
    const svg = makeFigure(args.kind as FigureKind, loadInputs(args.flags));
    const out = args.flags.get("out") ?? `${args.kind}.svg`;
    writeFileSync(out, svg);
    console.log(`wrote ${out}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`error: ${err.message}`);
      return 2;
    }
    throw err;
  }
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
