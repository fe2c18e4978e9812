/** Deterministic SVG scene builder: fixed style sheet, no timestamps, and
 * numbers formatted with a fixed precision so identical inputs produce
 * byte-identical documents. */

export type Scale = (v: number) => number;

export function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0 || 1;
  return (v) => r0 + ((v - d0) / span) * (r1 - r0);
}

export function logScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const l0 = Math.log10(d0);
  const span = Math.log10(d1) - l0 || 1;
  return (v) => r0 + ((Math.log10(v) - l0) / span) * (r1 - r0);
}

export function linearTicks(d0: number, d1: number, target = 6): number[] {
  const span = d1 - d0;
  if (!(span > 0)) return [d0];
  const step0 = Math.pow(10, Math.floor(Math.log10(span / target)));
  let step = step0;
  for (const m of [1, 2, 5, 10]) {
    if (span / (step0 * m) <= target) {
      step = step0 * m;
      break;
    }
  }
  const out: number[] = [];
  for (let t = Math.ceil(d0 / step) * step; t <= d1 + 1e-12 * span; t += step) {
    out.push(Math.abs(t) < 1e-12 * span ? 0 : t);
  }
  return out;
}

export function logTicks(d0: number, d1: number): number[] {
  const out: number[] = [];
  const e0 = Math.floor(Math.log10(d0));
  const e1 = Math.ceil(Math.log10(d1));
  for (let e = e0; e <= e1; e++) {
    const t = Math.pow(10, e);
    if (t >= d0 * 0.999 && t <= d1 * 1.001) out.push(t);
  }
  if (out.length < 2) {
    // fewer than two decades: fall back to 1-2-5 mantissas
    for (let e = e0; e <= e1; e++) {
      for (const m of [1, 2, 5]) {
        const t = m * Math.pow(10, e);
        if (t >= d0 * 0.999 && t <= d1 * 1.001 && !out.includes(t)) out.push(t);
      }
    }
    out.sort((a, b) => a - b);
  }
  return out;
}

const fmt = (v: number): string => {
  if (!Number.isFinite(v)) return "0";
  const s = v.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
};

export function tickLabel(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 10000 || a < 0.01) {
    const e = Math.floor(Math.log10(a));
    const m = v / Math.pow(10, e);
    const ms = Math.abs(m - 1) < 1e-9 ? "" : `${Number(m.toFixed(2))}·`;
    return `${ms}10^${e}`;
  }
  return `${Number(a < 1 ? v.toFixed(3) : v.toFixed(2))}`;
}

export const STYLE = {
  font: "Helvetica, Arial, sans-serif",
  fontSize: 11,
  titleSize: 13,
  axisColor: "#333333",
  gridColor: "#dddddd",
  series: ["#1f6fb4", "#d95f02", "#2a9d4e", "#7b52a1", "#c23b61", "#6b6b6b"],
};

export class SvgScene {
  private parts: string[] = [];

  constructor(public readonly width: number, public readonly height: number) {}

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, strokeWidth = 1, dash?: string): void {
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" stroke="${stroke}" stroke-width="${strokeWidth}"${d}/>`,
    );
  }

  path(points: Array<[number, number]>, stroke: string, strokeWidth = 1.5, dash?: string): void {
    if (points.length === 0) return;
    const d = points
      .map(([x, y], i) => `${i === 0 ? "M" : "L"}${fmt(x)} ${fmt(y)}`)
      .join(" ");
    const dd = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<path d="${d}" fill="none" stroke="${stroke}" stroke-width="${strokeWidth}"${dd}/>`,
    );
  }

  circle(x: number, y: number, r: number, fill: string): void {
    this.parts.push(`<circle cx="${fmt(x)}" cy="${fmt(y)}" r="${fmt(r)}" fill="${fill}"/>`);
  }

  text(
    x: number,
    y: number,
    content: string,
    opts: { size?: number; anchor?: "start" | "middle" | "end"; fill?: string; rotate?: number } = {},
  ): void {
    const size = opts.size ?? STYLE.fontSize;
    const anchor = opts.anchor ?? "start";
    const fill = opts.fill ?? STYLE.axisColor;
    const rot = opts.rotate ? ` transform="rotate(${opts.rotate} ${fmt(x)} ${fmt(y)})"` : "";
    const esc = content
      .replace(/&/g, "&amp;")
      .replace(/</g, "&lt;")
      .replace(/>/g, "&gt;");
    this.parts.push(
      `<text x="${fmt(x)}" y="${fmt(y)}" font-family="${STYLE.font}" font-size="${size}" text-anchor="${anchor}" fill="${fill}"${rot}>${esc}</text>`,
    );
  }

  render(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}" viewBox="0 0 ${this.width} ${this.height}">\n` +
      `<rect width="${this.width}" height="${this.height}" fill="#ffffff"/>\n` +
      this.parts.join("\n") +
      `\n</svg>\n`
    );
  }
}

export interface PanelBox {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

export interface AxisSpec {
  label: string;
  log: boolean;
  domain: [number, number];
}

/** Draw framed axes with ticks and labels; returns the x/y scales. */
export function drawAxes(
  scene: SvgScene,
  box: PanelBox,
  xAxis: AxisSpec,
  yAxis: AxisSpec,
): { sx: Scale; sy: Scale } {
  const sx = (xAxis.log ? logScale : linearScale)(xAxis.domain[0], xAxis.domain[1], box.x0, box.x1);
  const sy = (yAxis.log ? logScale : linearScale)(yAxis.domain[0], yAxis.domain[1], box.y1, box.y0);
  const xt = xAxis.log ? logTicks(...xAxis.domain) : linearTicks(...xAxis.domain);
  const yt = yAxis.log ? logTicks(...yAxis.domain) : linearTicks(...yAxis.domain);
  for (const t of xt) {
    const x = sx(t);
    scene.line(x, box.y0, x, box.y1, STYLE.gridColor, 0.5);
    scene.line(x, box.y1, x, box.y1 + 4, STYLE.axisColor);
    scene.text(x, box.y1 + 16, tickLabel(t), { anchor: "middle" });
  }
  for (const t of yt) {
    const y = sy(t);
    scene.line(box.x0, y, box.x1, y, STYLE.gridColor, 0.5);
    scene.line(box.x0 - 4, y, box.x0, y, STYLE.axisColor);
    scene.text(box.x0 - 7, y + 4, tickLabel(t), { anchor: "end" });
  }
  scene.line(box.x0, box.y1, box.x1, box.y1, STYLE.axisColor);
  scene.line(box.x0, box.y0, box.x0, box.y1, STYLE.axisColor);
  scene.text((box.x0 + box.x1) / 2, box.y1 + 32, xAxis.label, { anchor: "middle" });
  scene.text(box.x0 - 40, (box.y0 + box.y1) / 2, yAxis.label, {
    anchor: "middle",
    rotate: -90,
  });
  return { sx, sy };
}

/** Padded log/linear domain of the finite values of a series. */
export function domainOf(values: number[], log: boolean, padFrac = 0.08): [number, number] {
  const finite = values.filter((v) => Number.isFinite(v) && (!log || v > 0));
  if (finite.length === 0) return log ? [0.1, 10] : [0, 1];
  let lo = Math.min(...finite);
  let hi = Math.max(...finite);
  if (log) {
    const pad = Math.pow(hi / lo || 10, padFrac);
    return [lo / pad, hi * pad];
  }
  const pad = (hi - lo || Math.abs(hi) || 1) * padFrac;
  return [lo - pad, hi + pad];
}
