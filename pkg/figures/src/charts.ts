/**
 * echarts option builders for the three figure families.  Each family is a
 * single SVG with a row of panels; ansatz overlays are dashed series whose
 * names end in "ansatz" so their legend entries are verifiable downstream.
 */
import type { EChartsOption, SeriesOption } from "echarts";
import { groupBy } from "./csv";
import {
  CanonicalBandsRow,
  CanonicalSweepRow,
  MicroHistRow,
  MicroSweepRow,
  PostselectBoundaryRow,
  PostselectEntropyRow,
  PostselectIcRow,
  PostselectThresholdsRow,
} from "./schema";

export const P_HASH = 0.1893;

const PALETTE = [
  "#3366cc", "#dc3912", "#ff9900", "#109618", "#990099",
  "#0099c6", "#dd4477", "#66aa00", "#b82e2e", "#316395",
];

interface Panel {
  title: string;
  xName: string;
  yName: string;
  series: SeriesOption[];
  yLog?: boolean;
}

/** Lay panels out horizontally in one option object. */
function assemble(panels: Panel[], width: number): EChartsOption {
  const gap = 6;
  const per = (100 - gap * (panels.length + 1)) / panels.length;
  const legendData: string[] = [];
  const series: SeriesOption[] = [];
  panels.forEach((panel, i) => {
    panel.series.forEach((s) => {
      const name = s.name as string;
      if (!legendData.includes(name)) legendData.push(name);
      series.push({ ...s, xAxisIndex: i, yAxisIndex: i });
    });
  });
  return {
    animation: false,
    backgroundColor: "#ffffff",
    color: PALETTE,
    legend: { data: legendData, top: 4, type: "plain" },
    grid: panels.map((_, i) => ({
      left: `${gap + i * (per + gap)}%`,
      width: `${per}%`,
      top: 70,
      bottom: 50,
    })),
    title: panels.map((p, i) => ({
      text: p.title,
      textStyle: { fontSize: 12 },
      left: `${gap + i * (per + gap) + per / 2}%`,
      top: 34,
      textAlign: "center",
    })),
    xAxis: panels.map((p, i) => ({
      gridIndex: i,
      type: "value",
      name: p.xName,
      nameLocation: "middle",
      nameGap: 24,
    })),
    yAxis: panels.map((p, i) => ({
      gridIndex: i,
      type: p.yLog ? "log" : "value",
      name: p.yName,
      nameLocation: "end",
    })),
    series,
  };
}

function line(
  name: string,
  data: [number, number][],
  opts: { dashed?: boolean; symbol?: boolean; color?: string } = {}
): SeriesOption {
  return {
    name,
    type: "line",
    data,
    showSymbol: opts.symbol ?? false,
    symbolSize: 5,
    lineStyle: { type: opts.dashed ? "dashed" : "solid", width: opts.dashed ? 1.5 : 2 },
    itemStyle: opts.color ? { color: opts.color } : undefined,
    emphasis: { disabled: true },
  };
}

export function microOption(
  hists: { label: string; rows: MicroHistRow[] }[],
  sweep: MicroSweepRow[]
): EChartsOption {
  const panels: Panel[] = hists.slice(0, 3).map((h) => ({
    title: `rescaled density ${h.label}`,
    xName: "eigenvalue / mean",
    yName: "density",
    series: [
      line(`density ${h.label}`, h.rows.map((r) => [r.x, r.density])),
      line("MP ansatz", h.rows.map((r) => [r.x, r.mp]), { dashed: true, color: "#222222" }),
    ],
  }));
  const byN = groupBy(sweep, (r) => r.N);
  const icSeries: SeriesOption[] = [];
  for (const [n, rows] of byN) {
    icSeries.push(
      line(
        `N=${n}`,
        rows.map((r) => [r.w - P_HASH * r.N, r.ic_mean]),
        { symbol: true }
      )
    );
  }
  panels.push({
    title: "fixed-weight transition",
    xName: "w - w_c(N)",
    yName: "coherent information",
    series: icSeries,
  });
  return assemble(panels, 1400);
}

export function canonicalOption(
  bands: CanonicalBandsRow[],
  sweep: CanonicalSweepRow[]
): EChartsOption {
  const bandPanel: Panel = {
    title: "eigenvalue bands",
    xName: "p",
    yName: "eigenvalue",
    yLog: true,
    series: [],
  };
  const byW = groupBy(bands, (r) => r.w);
  const floor = 1e-12;
  for (const [w, rows] of byW) {
    const label = rows[0].is_reservoir ? `reservoir` : `band w=${w}`;
    bandPanel.series.push(
      line(label, rows.map((r) => [r.p, Math.max(r.mean_emp, floor)]), { symbol: true })
    );
    if (!rows[0].is_reservoir) {
      bandPanel.series.push(
        line("mean-shift ansatz", rows.map((r) => [r.p, Math.max(r.mean_ansatz, floor)]), {
          dashed: true,
          color: "#222222",
        })
      );
    }
  }
  const icPanel: Panel = {
    title: "coherent information",
    xName: "p",
    yName: "I_c",
    series: [],
  };
  const byN = groupBy(sweep, (r) => r.N);
  let maxN = 0;
  for (const n of byN.keys()) maxN = Math.max(maxN, n);
  for (const [n, rows] of byN) {
    icPanel.series.push(
      line(`N=${n}`, rows.map((r) => [r.p, r.ic_mean]), { symbol: true })
    );
    if (n === maxN) {
      icPanel.series.push(
        line("leading-order ansatz", rows.map((r) => [r.p, r.ic_ansatz]), {
          dashed: true,
          color: "#222222",
        })
      );
    }
  }
  return assemble([bandPanel, icPanel], 1100);
}

export function postselectOption(
  thresholds: PostselectThresholdsRow[],
  boundary: PostselectBoundaryRow[],
  entropy: PostselectEntropyRow[],
  ic: PostselectIcRow[]
): EChartsOption {
  const phase: Panel = {
    title: "postselected phase boundary",
    xName: "p",
    yName: "w / N",
    series: [
      line("hard boundary", boundary.map((r) => [r.p, r.w_over_N]), { symbol: true }),
      line(
        "soft (Renyi) thresholds ansatz",
        thresholds.map((r) => [r.p_c, P_HASH / Math.max(r.alpha, 1)]),
        { dashed: true, color: "#222222" }
      ),
    ],
  };
  const entPanel: Panel = {
    title: "Renyi-2 and reweighted entropy",
    xName: "p",
    yName: "entropy / N",
    series: [],
  };
  const entByN = groupBy(entropy, (r) => r.N);
  let maxN = 0;
  for (const n of entByN.keys()) maxN = Math.max(maxN, n);
  for (const [n, rows] of entByN) {
    entPanel.series.push(
      line(`S2/N N=${n}`, rows.map((r) => [r.p, r.s2q_mean / r.N]), { symbol: true })
    );
    if (n === maxN) {
      entPanel.series.push(
        line("Haar-average ansatz", rows.map((r) => [r.p, r.s2q_ansatz / r.N]), {
          dashed: true,
          color: "#222222",
        })
      );
      entPanel.series.push(
        line("reweighted-entropy ansatz", rows.map((r) => [r.p, r.svn_sigma_ansatz / r.N]), {
          dashed: true,
          color: "#888888",
        })
      );
    }
  }
  const icPanel: Panel = {
    title: "postselected coherent information",
    xName: "p",
    yName: "I_c (postselected)",
    series: [],
  };
  const collapsePanel: Panel = {
    title: "scaling collapse (nu = 1)",
    xName: "(p - p_c) N",
    yName: "I_c (postselected)",
    series: [],
  };
  for (const [n, rows] of groupBy(ic, (r) => r.N)) {
    icPanel.series.push(
      line(`I_c N=${n}`, rows.map((r) => [r.p, r.ic_post_mean]), { symbol: true })
    );
    collapsePanel.series.push(
      line(`collapse N=${n}`, rows.map((r) => [r.xprime_nu1, r.ic_post_mean]), { symbol: true })
    );
  }
  return assemble([phase, entPanel, icPanel, collapsePanel], 1800);
}
