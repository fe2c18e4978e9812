/** Minimal strict CSV reader for the simulator's output files. */

export interface Table {
  columns: string[];
  /** column name -> numeric values (NaN for blank/non-numeric cells) */
  numeric: Map<string, number[]>;
  /** column name -> raw string values */
  raw: Map<string, string[]>;
  rows: number;
}

export class MissingColumnError extends Error {
  constructor(public readonly column: string, public readonly path: string) {
    super(`missing column '${column}' in ${path}`);
  }
}

export function parseCsv(text: string, path = "<string>"): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new Error(`empty CSV: ${path}`);
  }
  const columns = lines[0].split(",");
  const numeric = new Map<string, number[]>();
  const raw = new Map<string, string[]>();
  for (const c of columns) {
    numeric.set(c, []);
    raw.set(c, []);
  }
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== columns.length) {
      throw new Error(`${path}:${i + 1}: expected ${columns.length} cells, got ${cells.length}`);
    }
    for (let j = 0; j < columns.length; j++) {
      const cell = cells[j];
      raw.get(columns[j])!.push(cell);
      const v = cell === "" ? NaN : Number(cell);
      numeric.get(columns[j])!.push(Number.isFinite(v) ? v : NaN);
    }
  }
  return { columns, numeric, raw, rows: lines.length - 1 };
}

/** Numeric column accessor; throws MissingColumnError naming the column. */
export function column(table: Table, name: string, path = "<table>"): number[] {
  const col = table.numeric.get(name);
  if (col === undefined) {
    throw new MissingColumnError(name, path);
  }
  return col;
}

export function requireColumns(table: Table, names: string[], path: string): void {
  for (const n of names) {
    if (!table.numeric.has(n)) {
      throw new MissingColumnError(n, path);
    }
  }
}
