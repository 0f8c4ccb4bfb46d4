import * as fs from "fs";
import Papa from "papaparse";
import { z } from "zod";

export class SchemaError extends Error {}

/** Parse one CSV file and validate every row against the given schema. */
export function readCsv<S extends z.ZodTypeAny>(path: string, schema: S): z.infer<S>[] {
  if (!fs.existsSync(path)) {
    throw new SchemaError(`input file not found: ${path}`);
  }
  const text = fs.readFileSync(path, "utf8");
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0];
    throw new SchemaError(`${path}: malformed CSV at row ${e.row}: ${e.message}`);
  }
  return parsed.data.map((raw, i) => {
    const result = schema.safeParse(raw);
    if (!result.success) {
      const issue = result.error.issues[0];
      const column = issue.path.join(".") || "<row>";
      throw new SchemaError(
        `${path}: row ${i + 1}: column '${column}' ${issue.message.toLowerCase()}`
      );
    }
    return result.data;
  });
}

/** Group rows by a key, preserving encounter order. */
export function groupBy<T, K extends string | number>(rows: T[], key: (row: T) => K): Map<K, T[]> {
  const out = new Map<K, T[]>();
  for (const row of rows) {
    const k = key(row);
    const bucket = out.get(k);
    if (bucket) bucket.push(row);
    else out.set(k, [row]);
  }
  return out;
}
