#!/usr/bin/env node
import * as fs from "fs";
import * as path from "path";

import { Resvg } from "@resvg/resvg-js";

import { MissingColumnError } from "./csv";
import { renderFigure, validateSpec } from "./figures";

function usage(): void {
  process.stderr.write("usage: figures --spec <figure-spec.json>\n");
}

export function main(argv: string[]): number {
  const idx = argv.indexOf("--spec");
  if (idx === -1 || idx + 1 >= argv.length) {
    usage();
    return 2;
  }
  const specPath = argv[idx + 1];
  let spec;
  try {
    spec = validateSpec(JSON.parse(fs.readFileSync(specPath, "utf-8")));
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 2;
  }
  try {
    const svg = renderFigure(spec);
    const base = spec.output.replace(/\.(svg|png)$/, "");
    fs.mkdirSync(path.dirname(path.resolve(base)), { recursive: true });
    fs.writeFileSync(`${base}.svg`, svg);
    const png = new Resvg(svg, { fitTo: { mode: "zoom", value: 2 } }).render().asPng();
    fs.writeFileSync(`${base}.png`, png);
    process.stdout.write(`wrote ${base}.svg and ${base}.png\n`);
    return 0;
  } catch (err) {
    if (err instanceof MissingColumnError) {
      process.stderr.write(`error: ${err.message}\n`);
      return 2;
    }
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
