/** The four figure kinds built from trajectory/summary/spectrum files. */
import { Series, renderChart } from "./svg.js";
import { SchemaError, Spectrum, Summary, Trajectory } from "./schema.js";

export const FIGURE_KINDS = [
  "lambda-drift",
  "norms",
  "spectrum-snapshot",
  "decay-fit",
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

export function lambdaDrift(traj: Trajectory): string {
  const pos = traj.t.map((v, i) => [v, i] as const).filter(([v]) => v > 0);
  const idx = pos.map(([, i]) => i);
  return renderChart(
    [
      {
        x: idx.map((i) => traj.t[i]),
        y: idx.map((i) => traj.lambda[i]),
        color: "#1f77b4",
        label: "lambda(t)",
      },
      {
        x: idx.map((i) => traj.t[i]),
        y: idx.map((i) => traj.alpha[i] + 1),
        color: "#d62728",
        label: "alpha(t) + 1",
      },
    ],
    {
      title: "Soliton parameters along the flow",
      xLabel: "t (log scale)",
      yLabel: "lambda, alpha + 1",
      xLog: true,
    },
  );
}

export function norms(traj: Trajectory): string {
  return renderChart(
    [
      {
        x: traj.t,
        y: traj.lx_norm,
        color: "#1f77b4",
        label: "dyadic LX norm",
      },
      {
        x: traj.t,
        y: traj.mass.map(Math.sqrt),
        color: "#2ca02c",
        label: "L2 mass^(1/2)",
      },
      {
        x: traj.t,
        y: traj.local_energy.map(Math.sqrt),
        color: "#9467bd",
        label: "local mass^(1/2) (r<2)",
      },
    ],
    {
      title: "Field monitors",
      xLabel: "t",
      yLabel: "norm",
    },
  );
}

export function spectrumSnapshot(spec: Spectrum): string {
  const floor = 1e-300;
  return renderChart(
    [
      {
        x: spec.xi,
        y: spec.abs_ft_initial.map((v) => Math.max(v, floor)),
        color: "#1f77b4",
        label: "|F psi| at t = 0",
      },
      {
        x: spec.xi,
        y: spec.abs_ft_final.map((v) => Math.max(v, floor)),
        color: "#d62728",
        label: "|F psi| at t_end",
      },
    ],
    {
      title: "Distorted Fourier magnitudes",
      xLabel: "xi (log scale)",
      yLabel: "|F psi| (log scale)",
      xLog: true,
      yLog: true,
    },
  );
}

export function decayFit(traj: Trajectory, summary: Summary): string {
  const d = traj.t.map((t, i) =>
    Math.hypot(traj.re_psi2_at_1[i], traj.im_psi2_at_1[i] - 1),
  );
  const series: Series[] = [
    {
      x: traj.t.filter((t) => t > 0),
      y: traj.t.map((t, i) => [t, d[i]] as const).filter(([t]) => t > 0).map(([, v]) => v),
      color: "#1f77b4",
      label: "d(t) = |psi2(1,t) - i|",
    },
  ];
  const a = summary.d_fit_constant;
  const b = summary.d_fit_log_coefficient;
  if (typeof a === "number" && typeof b === "number") {
    const xs = traj.t.filter((t) => t >= 10);
    series.push({
      x: xs,
      y: xs.map((t) => a + b / Math.log(t)),
      color: "#d62728",
      label: "fit a + b/log t",
      dashed: true,
    });
  }
  return renderChart(series, {
    title: "Distance to the reference soliton at r = 1",
    xLabel: "t (log scale)",
    yLabel: "d(t)",
    xLog: true,
  });
}

export interface FigureInputs {
  trajectory?: Trajectory;
  summary?: Summary;
  spectrum?: Spectrum;
}

export function makeFigure(kind: FigureKind, inputs: FigureInputs): string {
  switch (kind) {
    case "lambda-drift":
      if (!inputs.trajectory) throw new SchemaError("lambda-drift needs a trajectory CSV");
      return lambdaDrift(inputs.trajectory);
    case "norms":
      if (!inputs.trajectory) throw new SchemaError("norms needs a trajectory CSV");
      return norms(inputs.trajectory);
    case "spectrum-snapshot":
      if (!inputs.spectrum) throw new SchemaError("spectrum-snapshot needs a spectrum CSV");
      return spectrumSnapshot(inputs.spectrum);
    case "decay-fit":
      if (!inputs.trajectory || !inputs.summary)
        throw new SchemaError("decay-fit needs a trajectory CSV and a summary JSON");
      return decayFit(inputs.trajectory, inputs.summary);
  }
}
