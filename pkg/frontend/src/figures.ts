import * as fs from "fs";

import { column, parseCsv, requireColumns, Table } from "./csv";
import { AxisSpec, domainOf, drawAxes, PanelBox, STYLE, SvgScene } from "./svg";

export type FigureKind = "scaling" | "jr_scan" | "benchmark_overlay" | "time_trace";

export interface FigureSpec {
  kind: FigureKind;
  /** records.csv (scaling, jr_scan) or timeseries.csv (time_trace) */
  input?: string;
  /** benchmark_overlay inputs */
  input_test?: string;
  input_ref?: string;
  /** fit.json with power-law fit summaries (scaling; annotated verbatim) */
  fit?: string;
  /** benchmark.json deviation report (benchmark_overlay; annotated verbatim) */
  report?: string;
  /** plot xi2_A instead of xi2 when available */
  use_xi2a?: boolean;
  title?: string;
  /** output path; .svg and .png siblings are written */
  output: string;
}

const W = 760;
const H = 340;
const LEFT: PanelBox = { x0: 70, y0: 46, x1: 360, y1: 290 };
const RIGHT: PanelBox = { x0: 455, y0: 46, x1: 745, y1: 290 };

function readTable(path: string): Table {
  return parseCsv(fs.readFileSync(path, "utf-8"), path);
}

function readJson(path: string): any {
  return JSON.parse(fs.readFileSync(path, "utf-8"));
}

interface FitSummary {
  exponent: number;
  amplitude: number;
}

function fitPowerLaw(xs: number[], ys: number[]): FitSummary {
  const pts = xs
    .map((x, i) => [x, ys[i]] as [number, number])
    .filter(([x, y]) => x > 0 && y > 0 && Number.isFinite(y));
  const lx = pts.map(([x]) => Math.log(x));
  const ly = pts.map(([, y]) => Math.log(y));
  const n = pts.length;
  const mx = lx.reduce((a, b) => a + b, 0) / n;
  const my = ly.reduce((a, b) => a + b, 0) / n;
  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < n; i++) {
    sxx += (lx[i] - mx) ** 2;
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  const exponent = sxy / sxx;
  return { exponent, amplitude: Math.exp(my - exponent * mx) };
}

function scatterWithFit(
  scene: SvgScene,
  box: PanelBox,
  xs: number[],
  ys: number[],
  fit: FitSummary,
  xLabel: string,
  yLabel: string,
  color: string,
): void {
  const xAxis: AxisSpec = { label: xLabel, log: true, domain: domainOf(xs, true) };
  const allY = ys.concat(xs.map((x) => fit.amplitude * Math.pow(x, fit.exponent)));
  const yAxis: AxisSpec = { label: yLabel, log: true, domain: domainOf(allY, true) };
  const { sx, sy } = drawAxes(scene, box, xAxis, yAxis);
  const fitPts: Array<[number, number]> = xs
    .filter((x) => x > 0)
    .sort((a, b) => a - b)
    .map((x) => [sx(x), sy(fit.amplitude * Math.pow(x, fit.exponent))]);
  scene.path(fitPts, "#888888", 1.2, "5 3");
  for (let i = 0; i < xs.length; i++) {
    if (Number.isFinite(ys[i]) && ys[i] > 0) scene.circle(sx(xs[i]), sy(ys[i]), 3.5, color);
  }
  scene.text(box.x0 + 8, box.y0 + 16, `slope ${fit.exponent.toFixed(3)}`, {
    fill: color,
  });
}

function renderScaling(spec: FigureSpec): SvgScene {
  const path = spec.input!;
  const table = readTable(path);
  requireColumns(table, ["n_atoms", "fq_max"], path);
  const yCol = spec.use_xi2a ? "xi2a_min" : "xi2_min";
  requireColumns(table, [yCol], path);
  const ns = column(table, "n_atoms", path);
  const xi = column(table, yCol, path);
  const fq = column(table, "fq_max", path);
  let xiFit: FitSummary;
  let fqFit: FitSummary;
  if (spec.fit) {
    const f = readJson(spec.fit);
    const xiKey = f.xi2 ? "xi2" : "xi2_A";
    xiFit = { exponent: f[xiKey].exponent, amplitude: f[xiKey].amplitude };
    fqFit = { exponent: f.fq.exponent, amplitude: f.fq.amplitude };
  } else {
    xiFit = fitPowerLaw(ns, xi);
    fqFit = fitPowerLaw(ns, fq);
  }
  const scene = new SvgScene(W, H);
  scene.text(W / 2, 24, spec.title ?? "Scaling with system size", {
    anchor: "middle",
    size: STYLE.titleSize,
  });
  scatterWithFit(scene, LEFT, ns, fq, fqFit, "N", "F_Q", STYLE.series[0]);
  scatterWithFit(
    scene,
    RIGHT,
    ns,
    xi,
    xiFit,
    "N",
    spec.use_xi2a ? "xi^2_A" : "xi^2",
    STYLE.series[1],
  );
  return scene;
}

function renderJrScan(spec: FigureSpec): SvgScene {
  const path = spec.input!;
  const table = readTable(path);
  requireColumns(table, ["jr", "xi2_min", "fq_max"], path);
  const jr = column(table, "jr", path);
  const xi = column(table, "xi2_min", path);
  const fq = column(table, "fq_max", path);
  const order = jr.map((_, i) => i).sort((a, b) => jr[a] - jr[b]);
  const scene = new SvgScene(W, H);
  scene.text(W / 2, 24, spec.title ?? "Coupling-ratio scan", {
    anchor: "middle",
    size: STYLE.titleSize,
  });
  const axL = drawAxes(
    scene,
    LEFT,
    { label: "J_r", log: false, domain: domainOf(jr, false) },
    { label: "F_Q", log: false, domain: domainOf(fq, false) },
  );
  scene.path(order.map((i) => [axL.sx(jr[i]), axL.sy(fq[i])]), STYLE.series[0]);
  order.forEach((i) => scene.circle(axL.sx(jr[i]), axL.sy(fq[i]), 3, STYLE.series[0]));
  const axR = drawAxes(
    scene,
    RIGHT,
    { label: "J_r", log: false, domain: domainOf(jr, false) },
    { label: "xi^2", log: false, domain: domainOf(xi, false) },
  );
  scene.path(order.map((i) => [axR.sx(jr[i]), axR.sy(xi[i])]), STYLE.series[1]);
  order.forEach((i) => scene.circle(axR.sx(jr[i]), axR.sy(xi[i]), 3, STYLE.series[1]));
  return scene;
}

function traceColumns(spec: FigureSpec, table: Table, path: string): { xiCol: string } {
  requireColumns(table, ["t", "fq"], path);
  const xiCol = spec.use_xi2a && table.numeric.has("xi2_A") ? "xi2_A" : "xi2";
  requireColumns(table, [xiCol], path);
  return { xiCol };
}

function renderTimeTrace(spec: FigureSpec): SvgScene {
  const path = spec.input!;
  const table = readTable(path);
  const { xiCol } = traceColumns(spec, table, path);
  const t = column(table, "t", path);
  const xi = column(table, xiCol, path);
  const fq = column(table, "fq", path);
  const scene = new SvgScene(W, H);
  scene.text(W / 2, 24, spec.title ?? "Quench dynamics", {
    anchor: "middle",
    size: STYLE.titleSize,
  });
  const axL = drawAxes(
    scene,
    LEFT,
    { label: "t J_1", log: false, domain: domainOf(t, false, 0.02) },
    { label: "F_Q", log: false, domain: domainOf(fq, false) },
  );
  scene.path(t.map((tv, i) => [axL.sx(tv), axL.sy(fq[i])] as [number, number]), STYLE.series[0]);
  const axR = drawAxes(
    scene,
    RIGHT,
    { label: "t J_1", log: false, domain: domainOf(t, false, 0.02) },
    { label: xiCol, log: true, domain: domainOf(xi, true) },
  );
  scene.path(
    t
      .map((tv, i) => [tv, xi[i]] as [number, number])
      .filter(([, y]) => Number.isFinite(y) && y > 0)
      .map(([tv, y]) => [axR.sx(tv), axR.sy(y)] as [number, number]),
    STYLE.series[1],
  );
  return scene;
}

function renderBenchmarkOverlay(spec: FigureSpec): SvgScene {
  const pt = spec.input_test!;
  const pr = spec.input_ref!;
  const tTest = readTable(pt);
  const tRef = readTable(pr);
  const { xiCol } = traceColumns(spec, tTest, pt);
  traceColumns(spec, tRef, pr);
  const scene = new SvgScene(W, H);
  scene.text(W / 2, 24, spec.title ?? "Trajectory-ensemble vs exact benchmark", {
    anchor: "middle",
    size: STYLE.titleSize,
  });
  const t1 = column(tTest, "t", pt);
  const t2 = column(tRef, "t", pr);
  const panels: Array<[PanelBox, string, boolean]> = [
    [LEFT, "fq", false],
    [RIGHT, xiCol, true],
  ];
  for (const [box, col, logY] of panels) {
    const y1 = column(tTest, col, pt);
    const y2 = column(tRef, col, pr);
    const ax = drawAxes(
      scene,
      box,
      { label: "t J_1", log: false, domain: domainOf(t1.concat(t2), false, 0.02) },
      { label: col === "fq" ? "F_Q" : col, log: logY, domain: domainOf(y1.concat(y2), logY) },
    );
    const clean = (ts: number[], ys: number[]): Array<[number, number]> =>
      ts
        .map((tv, i) => [tv, ys[i]] as [number, number])
        .filter(([, y]) => Number.isFinite(y) && (!logY || y > 0))
        .map(([tv, y]) => [ax.sx(tv), ax.sy(y)] as [number, number]);
    scene.path(clean(t2, y2), STYLE.series[5], 2.2);
    scene.path(clean(t1, y1), col === "fq" ? STYLE.series[0] : STYLE.series[1], 1.4);
  }
  let dev: { xi: number; fq: number };
  if (spec.report) {
    const r = readJson(spec.report);
    dev = { xi: r.max_rel_dev_xi2, fq: r.max_rel_dev_fq };
  } else {
    const relDev = (a: number[], b: number[]) =>
      Math.max(
        ...a
          .map((v, i) => Math.abs(v - b[i]) / Math.max(Math.abs(b[i]), 1e-12))
          .filter(Number.isFinite),
      );
    dev = {
      xi: relDev(column(tTest, xiCol, pt), column(tRef, xiCol, pr)),
      fq: relDev(column(tTest, "fq", pt), column(tRef, "fq", pr)),
    };
  }
  scene.text(LEFT.x0 + 8, LEFT.y0 + 16, `max rel dev ${dev.fq.toFixed(3)}`, {
    fill: STYLE.series[0],
  });
  scene.text(RIGHT.x0 + 8, RIGHT.y0 + 16, `max rel dev ${dev.xi.toFixed(3)}`, {
    fill: STYLE.series[1],
  });
  scene.text(LEFT.x0 + 8, LEFT.y0 + 30, "gray: reference", { fill: STYLE.series[5] });
  return scene;
}

export function renderFigure(spec: FigureSpec): string {
  switch (spec.kind) {
    case "scaling":
      return renderScaling(spec).render();
    case "jr_scan":
      return renderJrScan(spec).render();
    case "time_trace":
      return renderTimeTrace(spec).render();
    case "benchmark_overlay":
      return renderBenchmarkOverlay(spec).render();
    default:
      throw new Error(`unknown figure kind '${(spec as FigureSpec).kind}'`);
  }
}

export function validateSpec(raw: any): FigureSpec {
  if (typeof raw !== "object" || raw === null) throw new Error("spec must be a JSON object");
  const kinds: FigureKind[] = ["scaling", "jr_scan", "benchmark_overlay", "time_trace"];
  if (!kinds.includes(raw.kind)) {
    throw new Error(`spec.kind must be one of ${kinds.join(", ")}`);
  }
  if (typeof raw.output !== "string" || raw.output.length === 0) {
    throw new Error("spec.output is required");
  }
  if (raw.kind === "benchmark_overlay") {
    if (!raw.input_test || !raw.input_ref) {
      throw new Error("benchmark_overlay needs input_test and input_ref");
    }
  } else if (!raw.input) {
    throw new Error(`${raw.kind} needs input`);
  }
  return raw as FigureSpec;
}
