/**
 * Minimal deterministic SVG line-chart renderer.  No timestamps, no random
 * ids: identical inputs give byte-identical output.
 */

export interface Series {
  x: number[];
  y: number[];
  color: string;
  label: string;
  dashed?: boolean;
}

export interface Axes {
  title: string;
  xLabel: string;
  yLabel: string;
  xLog?: boolean;
  yLog?: boolean;
}

const W = 720;
const H = 480;
const M = { left: 72, right: 24, top: 40, bottom: 52 };

function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1).replace("e", "e");
  return String(Number(v.toPrecision(4)));
}

function ticks(lo: number, hi: number, log: boolean): number[] {
  if (log) {
    const out: number[] = [];
    const e0 = Math.ceil(Math.log10(lo) - 1e-9);
    const e1 = Math.floor(Math.log10(hi) + 1e-9);
    for (let e = e0; e <= e1; e++) out.push(10 ** e);
    if (out.length >= 2) return out;
  }
  const span = hi - lo;
  const step = 10 ** Math.floor(Math.log10(span / 4));
  const mult = span / step > 8 ? 2 : 1;
  const s = step * mult;
  const out: number[] = [];
  for (let v = Math.ceil(lo / s) * s; v <= hi + 1e-12 * span; v += s) out.push(v);
  return out;
}

export function renderChart(series: Series[], axes: Axes): string {
  const xs = series.flatMap((s) => s.x).filter((v) => !axes.xLog || v > 0);
  const ys = series.flatMap((s) => s.y).filter((v) => !axes.yLog || v > 0);
  if (xs.length === 0 || ys.length === 0) {
    throw new Error("nothing to plot");
  }
  let xLo = Math.min(...xs);
  let xHi = Math.max(...xs);
  let yLo = Math.min(...ys);
  let yHi = Math.max(...ys);
  if (xLo === xHi) {
    xLo -= 0.5;
    xHi += 0.5;
  }
  if (yLo === yHi) {
    yLo -= Math.abs(yLo) * 0.5 + 0.5;
    yHi += Math.abs(yHi) * 0.5 + 0.5;
  } else if (!axes.yLog) {
    const pad = (yHi - yLo) * 0.06;
    yLo -= pad;
    yHi += pad;
  }
  const tx = (v: number) => {
    const f = axes.xLog
      ? (Math.log10(v) - Math.log10(xLo)) / (Math.log10(xHi) - Math.log10(xLo))
      : (v - xLo) / (xHi - xLo);
    return M.left + f * (W - M.left - M.right);
  };
  const ty = (v: number) => {
    const f = axes.yLog
      ? (Math.log10(v) - Math.log10(yLo)) / (Math.log10(yHi) - Math.log10(yLo))
      : (v - yLo) / (yHi - yLo);
    return H - M.bottom - f * (H - M.top - M.bottom);
  };

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${H}" viewBox="0 0 ${W} ${H}">`,
  );
  parts.push(`<rect width="${W}" height="${H}" fill="white"/>`);
  parts.push(
    `<text x="${W / 2}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">${axes.title}</text>`,
  );
  // axes frame
  parts.push(
    `<rect x="${M.left}" y="${M.top}" width="${W - M.left - M.right}" height="${H - M.top - M.bottom}" fill="none" stroke="#444"/>`,
  );
  for (const v of ticks(xLo, xHi, !!axes.xLog)) {
    if (v < xLo || v > xHi) continue;
    const px = tx(v);
    parts.push(
      `<line x1="${px.toFixed(2)}" y1="${H - M.bottom}" x2="${px.toFixed(2)}" y2="${H - M.bottom + 5}" stroke="#444"/>`,
    );
    parts.push(
      `<text x="${px.toFixed(2)}" y="${H - M.bottom + 20}" text-anchor="middle" font-family="sans-serif" font-size="11">${fmt(v)}</text>`,
    );
    parts.push(
      `<line x1="${px.toFixed(2)}" y1="${M.top}" x2="${px.toFixed(2)}" y2="${H - M.bottom}" stroke="#eee"/>`,
    );
  }
  for (const v of ticks(yLo, yHi, !!axes.yLog)) {
    if (v < yLo || v > yHi) continue;
    const py = ty(v);
    parts.push(
      `<line x1="${M.left - 5}" y1="${py.toFixed(2)}" x2="${M.left}" y2="${py.toFixed(2)}" stroke="#444"/>`,
    );
    parts.push(
      `<text x="${M.left - 8}" y="${(py + 4).toFixed(2)}" text-anchor="end" font-family="sans-serif" font-size="11">${fmt(v)}</text>`,
    );
    parts.push(
      `<line x1="${M.left}" y1="${py.toFixed(2)}" x2="${W - M.right}" y2="${py.toFixed(2)}" stroke="#eee"/>`,
    );
  }
  parts.push(
    `<text x="${W / 2}" y="${H - 12}" text-anchor="middle" font-family="sans-serif" font-size="13">${axes.xLabel}</text>`,
  );
  parts.push(
    `<text x="18" y="${H / 2}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 18 ${H / 2})">${axes.yLabel}</text>`,
  );
  series.forEach((s, si) => {
    const pts: string[] = [];
    for (let i = 0; i < s.x.length; i++) {
      const vx = s.x[i];
      const vy = s.y[i];
      if (axes.xLog && vx <= 0) continue;
      if (axes.yLog && vy <= 0) continue;
      pts.push(`${tx(vx).toFixed(2)},${ty(vy).toFixed(2)}`);
    }
    const dash = s.dashed ? ` stroke-dasharray="6 4"` : "";
    parts.push(
      `<polyline points="${pts.join(" ")}" fill="none" stroke="${s.color}" stroke-width="1.6"${dash}/>`,
    );
    const lx = W - M.right - 150;
    const ly = M.top + 18 + 18 * si;
    parts.push(
      `<line x1="${lx}" y1="${ly - 4}" x2="${lx + 26}" y2="${ly - 4}" stroke="${s.color}" stroke-width="1.6"${dash}/>`,
    );
    parts.push(
      `<text x="${lx + 32}" y="${ly}" font-family="sans-serif" font-size="12">${s.label}</text>`,
    );
  });
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
