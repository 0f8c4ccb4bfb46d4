import * as fs from "fs";
import * as path from "path";
import * as echarts from "echarts";
import type { EChartsOption } from "echarts";
import { readCsv, SchemaError } from "./csv";
import { canonicalOption, microOption, postselectOption } from "./charts";
import {
  canonicalBandsRow,
  canonicalSweepRow,
  microHistRow,
  microSweepRow,
  postselectBoundaryRow,
  postselectEntropyRow,
  postselectIcRow,
  postselectThresholdsRow,
} from "./schema";

export type Family = "micro" | "canonical" | "postselect";

const WIDTHS: Record<Family, number> = { micro: 1500, canonical: 1100, postselect: 1900 };

export function renderToSvg(option: EChartsOption, width: number, height = 420): string {
  const chart = echarts.init(null, null, { renderer: "svg", ssr: true, width, height });
  chart.setOption(option);
  let svg = chart.renderToSVGString();
  chart.dispose();
  // echarts numbers internal class names and id prefixes with
  // process-global counters; renumber classes by encounter order and pin
  // the instance prefix so identical inputs give identical SVGs
  const seen = new Map<string, string>();
  svg = svg.replace(/zr\d+-cls-\d+/g, (token) => {
    let stable = seen.get(token);
    if (stable === undefined) {
      stable = `zr0-cls-${seen.size}`;
      seen.set(token, stable);
    }
    return stable;
  });
  svg = svg.replace(/zr\d+-/g, "zr0-");
  return svg;
}

function buildOption(family: Family, dataDir: string): EChartsOption {
  if (family === "micro") {
    const histFiles = fs
      .readdirSync(dataDir)
      .filter((f) => /^micro_hist_N\d+_w\d+\.csv$/.test(f))
      .sort();
    if (histFiles.length === 0) {
      throw new SchemaError(`no micro_hist_N*_w*.csv files in ${dataDir}`);
    }
    const hists = histFiles.map((f) => ({
      label: f.replace("micro_hist_", "").replace(".csv", "").replace("_", " "),
      rows: readCsv(path.join(dataDir, f), microHistRow),
    }));
    const sweep = readCsv(path.join(dataDir, "micro_sweep.csv"), microSweepRow);
    return microOption(hists, sweep);
  }
  if (family === "canonical") {
    const bandFiles = fs
      .readdirSync(dataDir)
      .filter((f) => /^canonical_bands_N\d+\.csv$/.test(f))
      .sort();
    if (bandFiles.length === 0) {
      throw new SchemaError(`no canonical_bands_N*.csv file in ${dataDir}`);
    }
    const bands = readCsv(path.join(dataDir, bandFiles[bandFiles.length - 1]), canonicalBandsRow);
    const sweep = readCsv(path.join(dataDir, "canonical_sweep.csv"), canonicalSweepRow);
    return canonicalOption(bands, sweep);
  }
  const thresholds = readCsv(path.join(dataDir, "postselect_thresholds.csv"), postselectThresholdsRow);
  const boundary = readCsv(path.join(dataDir, "postselect_boundary.csv"), postselectBoundaryRow);
  const entropy = readCsv(path.join(dataDir, "postselect_entropy.csv"), postselectEntropyRow);
  const ic = readCsv(path.join(dataDir, "postselect_ic.csv"), postselectIcRow);
  return postselectOption(thresholds, boundary, entropy, ic);
}

/** Render one family from a data directory into <out>/<family>.svg. */
export function renderFamily(family: Family, dataDir: string, outDir: string): string {
  const option = buildOption(family, dataDir);
  const svg = renderToSvg(option, WIDTHS[family]);
  fs.mkdirSync(outDir, { recursive: true });
  const outPath = path.join(outDir, `${family}.svg`);
  fs.writeFileSync(outPath, svg);
  return outPath;
}
