import * as fs from "fs";
import * as os from "os";
import * as path from "path";

import { afterAll, describe, expect, it } from "vitest";

import { column, MissingColumnError, parseCsv } from "../src/csv";
import { renderFigure, validateSpec } from "../src/figures";
import { linearTicks, logTicks } from "../src/svg";
import { main } from "../src/cli";

const tmp = fs.mkdtempSync(path.join(os.tmpdir(), "figures-"));
afterAll(() => fs.rmSync(tmp, { recursive: true, force: true }));

function write(name: string, text: string): string {
  const p = path.join(tmp, name);
  fs.writeFileSync(p, text);
  return p;
}

const RECORD_HEADER =
  "n_atoms,jr,omega_opt,t_opt_xi,t_opt_fq,xi2_min,xi2a_min,fq_max," +
  "xi2_stderr,fq_stderr,method,seed,wall_time_s,flags";

function recordsCsv(rows: Array<[number, number, number]>): string {
  const lines = [RECORD_HEADER];
  for (const [n, xi, fq] of rows) {
    lines.push(`${n},1.0,0,0.1,0.2,${xi},,${fq},,,exact_symmetric,7,1.0,`);
  }
  return lines.join("\n") + "\n";
}

describe("csv", () => {
  it("parses numeric columns and blanks as NaN", () => {
    const t = parseCsv("a,b\n1,\n2,3\n");
    expect(column(t, "a")).toEqual([1, 2]);
    expect(column(t, "b")[0]).toBeNaN();
    expect(t.rows).toBe(2);
  });

  it("missing column error names the column", () => {
    const t = parseCsv("a\n1\n");
    expect(() => column(t, "fq", "x.csv")).toThrowError(MissingColumnError);
    try {
      column(t, "fq", "x.csv");
    } catch (err) {
      expect((err as Error).message).toContain("fq");
      expect((err as Error).message).toContain("x.csv");
    }
  });

  it("rejects ragged rows", () => {
    expect(() => parseCsv("a,b\n1\n")).toThrowError(/expected 2 cells/);
  });
});

describe("ticks", () => {
  it("linear ticks cover the domain", () => {
    const t = linearTicks(0, 1);
    expect(t[0]).toBe(0);
    expect(t[t.length - 1]).toBeCloseTo(1);
  });

  it("log ticks are decades when span allows", () => {
    expect(logTicks(1, 1000)).toEqual([1, 10, 100, 1000]);
  });
});

describe("scaling figure", () => {
  it("annotates the internal fit slope for exact power-law data", () => {
    const rows: Array<[number, number, number]> = [16, 32, 64, 128].map((n) => [
      n,
      2.0 * Math.pow(n, -2 / 3),
      0.5 * n * n,
    ]);
    const input = write("records.csv", recordsCsv(rows));
    const svg = renderFigure(validateSpec({ kind: "scaling", input, output: "o" }));
    expect(svg).toContain("slope -0.667");
    expect(svg).toContain("slope 2.000");
  });

  it("annotates fit.json exponents verbatim when provided", () => {
    const input = write("records2.csv", recordsCsv([[16, 1, 100], [64, 0.5, 1000]]));
    const fit = write(
      "fit.json",
      JSON.stringify({
        xi2: { exponent: -0.613, amplitude: 2.0 },
        fq: { exponent: 1.987, amplitude: 0.5 },
      }),
    );
    const svg = renderFigure(validateSpec({ kind: "scaling", input, fit, output: "o" }));
    expect(svg).toContain("slope -0.613");
    expect(svg).toContain("slope 1.987");
  });

  it("is byte-stable across repeated renders", () => {
    const input = write("records3.csv", recordsCsv([[16, 1, 100], [64, 0.5, 1000]]));
    const spec = validateSpec({ kind: "scaling", input, output: "o" });
    expect(renderFigure(spec)).toBe(renderFigure(spec));
  });

  it("reports the missing column by name", () => {
    const input = write("bad.csv", "n_atoms,xi2_min\n4,1.0\n");
    expect(() =>
      renderFigure(validateSpec({ kind: "scaling", input, output: "o" })),
    ).toThrowError(/fq_max/);
  });
});

describe("benchmark overlay", () => {
  const ts = (scale: number): string => {
    const lines = ["t,xi2,fq,spin_length"];
    for (let i = 0; i < 20; i++) {
      const t = i * 0.05;
      lines.push(`${t},${1 - scale * t},${8 + 10 * scale * t},4`);
    }
    return lines.join("\n") + "\n";
  };

  it("identical inputs annotate zero deviation", () => {
    const a = write("ts_a.csv", ts(0.5));
    const b = write("ts_b.csv", ts(0.5));
    const svg = renderFigure(
      validateSpec({ kind: "benchmark_overlay", input_test: a, input_ref: b, output: "o" }),
    );
    expect(svg).toContain("max rel dev 0.000");
  });

  it("uses the report file verbatim when given", () => {
    const a = write("ts_c.csv", ts(0.5));
    const b = write("ts_d.csv", ts(0.6));
    const report = write(
      "bench.json",
      JSON.stringify({ max_rel_dev_xi2: 0.123, max_rel_dev_fq: 0.045 }),
    );
    const svg = renderFigure(
      validateSpec({
        kind: "benchmark_overlay",
        input_test: a,
        input_ref: b,
        report,
        output: "o",
      }),
    );
    expect(svg).toContain("max rel dev 0.123");
    expect(svg).toContain("max rel dev 0.045");
  });
});

describe("time trace and jr scan", () => {
  it("renders a time trace with the antisymmetric column", () => {
    const lines = ["t,xi2,xi2_A,fq,spin_length"];
    for (let i = 0; i < 10; i++) lines.push(`${i * 0.1},${1 - 0.05 * i},${2 - 0.1 * i},${8 + i},4`);
    const input = write("trace.csv", lines.join("\n") + "\n");
    const svg = renderFigure(
      validateSpec({ kind: "time_trace", input, use_xi2a: true, output: "o" }),
    );
    expect(svg).toContain("xi2_A");
  });

  it("renders a jr scan ordered by coupling ratio", () => {
    const input = write(
      "jr.csv",
      recordsCsv([[16, 0.4, 100]]).replace("16,1.0", "16,0.5") +
        recordsCsv([[16, 0.3, 120]]).split("\n")[1].replace("16,1.0", "16,-1.0") +
        "\n",
    );
    const svg = renderFigure(validateSpec({ kind: "jr_scan", input, output: "o" }));
    expect(svg).toContain("J_r");
  });
});

describe("cli", () => {
  it("writes both svg and png", () => {
    const input = write("records4.csv", recordsCsv([[16, 1, 100], [64, 0.5, 1000]]));
    const out = path.join(tmp, "fig");
    const spec = write("spec.json", JSON.stringify({ kind: "scaling", input, output: out }));
    expect(main(["--spec", spec])).toBe(0);
    expect(fs.existsSync(`${out}.svg`)).toBe(true);
    const png = fs.readFileSync(`${out}.png`);
    expect(png.subarray(1, 4).toString()).toBe("PNG");
  });

  it("bad spec exits 2", () => {
    const spec = write("bad_spec.json", JSON.stringify({ kind: "nope", output: "o" }));
    expect(main(["--spec", spec])).toBe(2);
    expect(main([])).toBe(2);
  });

  it("missing column exits 2", () => {
    const input = write("bad2.csv", "n_atoms,xi2_min\n4,1.0\n");
    const out = path.join(tmp, "fig2");
    const spec = write("spec2.json", JSON.stringify({ kind: "scaling", input, output: out }));
    expect(main(["--spec", spec])).toBe(2);
  });
});
