/**
 * The four plot kinds, each a pure mapping from one documented CSV
 * schema to an SVG string.
 *
 *   line          summary.csv  response time vs VMs per DC, one series
 *                              per balancer
 *   bar           summary.csv  response time vs DC count, grouped bars
 *   vm_allocation vm_allocation.csv  per-VM task counts, colored by tier
 *   hourly        hourly.csv   24-point series per run
 */

import {
  EmptyInput, HOURLY_HEADER, Row, SchemaMismatch, SUMMARY_HEADER,
  VM_ALLOCATION_HEADER, loadCsv, num,
} from "./schema.js";
import { BarGroup, Series, barChart, lineChart } from "./svg.js";

export const KINDS = ["line", "bar", "vm_allocation", "hourly"] as const;
export type Kind = (typeof KINDS)[number];

const TIER_COLORS: Record<string, string> = {
  low: "#9ecae1",
  high: "#08519c",
};

function groupBy(rows: Row[], col: string): Map<string, Row[]> {
  const out = new Map<string, Row[]>();
  for (const row of rows) {
    const key = row[col];
    const bucket = out.get(key);
    if (bucket) bucket.push(row);
    else out.set(key, [row]);
  }
  return out;
}

export function renderLine(inputCsv: string, title?: string): string {
  const rows = loadCsv(inputCsv, SUMMARY_HEADER);
  const series: Series[] = [...groupBy(rows, "balancer").entries()].map(
    ([balancer, group]) => ({
      label: balancer,
      points: group.map((r) => (
        { x: num(r, "vms_per_dc"), y: num(r, "avg_response_ms") })),
    }));
  return lineChart(series, {
    title: title ?? "Average response time vs VMs per DC",
    xLabel: "VMs per DC",
    yLabel: "avg response (ms)",
  });
}

export function renderBar(inputCsv: string, title?: string): string {
  const rows = loadCsv(inputCsv, SUMMARY_HEADER);
  const balancers = [...groupBy(rows, "balancer").keys()];
  const byDcs = groupBy(rows, "dcs");
  const groups: BarGroup[] = [...byDcs.entries()]
    .sort(([a], [b]) => Number(a) - Number(b))
    .map(([dcs, group]) => ({
      label: dcs,
      values: balancers.map((balancer) => {
        const matches = group.filter((r) => r.balancer === balancer);
        const mean = matches.length === 0 ? 0 :
          matches.reduce((acc, r) => acc + num(r, "avg_response_ms"), 0) /
          matches.length;
        return { series: balancer, value: mean };
      }),
    }));
  return barChart(groups, {
    title: title ?? "Average response time vs DC count",
    xLabel: "data centers",
    yLabel: "avg response (ms)",
  });
}

export function renderVmAllocation(inputCsv: string, title?: string): string {
  const rows = loadCsv(inputCsv, VM_ALLOCATION_HEADER);
  const balancers = [...groupBy(rows, "balancer").keys()];
  // one SVG per call; when both balancers are present, prefer the
  // score-based one whose crest/trough shape the chart exists to show
  const balancer = balancers.includes("sbdlb") ? "sbdlb" : balancers[0];
  const chosen = rows
    .filter((r) => r.balancer === balancer)
    .sort((a, b) => num(a, "vm_id") - num(b, "vm_id"));
  const groups: BarGroup[] = chosen.map((r) => {
    const tier = r.tier;
    if (!(tier in TIER_COLORS)) {
      throw new SchemaMismatch(`unknown tier ${JSON.stringify(tier)}`);
    }
    return {
      label: r.vm_id,
      values: [{ series: tier, value: num(r, "tasks"),
                 color: TIER_COLORS[tier] }],
    };
  });
  return barChart(groups, {
    title: title ?? `Tasks per VM (${balancer})`,
    xLabel: "VM id",
    yLabel: "tasks",
  });
}

export function renderHourly(inputCsv: string, title?: string): string {
  const rows = loadCsv(inputCsv, HOURLY_HEADER);
  const series: Series[] = [...groupBy(rows, "run_id").entries()].map(
    ([runId, group]) => ({
      label: runId,
      points: group
        .filter((r) => r.avg_response_ms !== "")
        .map((r) => ({ x: num(r, "hour"), y: num(r, "avg_response_ms") })),
    })).filter((s) => s.points.length > 0);
  if (series.length === 0) {
    throw new EmptyInput(`${inputCsv}: no populated hours`);
  }
  return renderHourlySeries(series, title);
}

function renderHourlySeries(series: Series[], title?: string): string {
  return lineChart(series, {
    title: title ?? "Hourly average response time",
    xLabel: "hour of day",
    yLabel: "avg response (ms)",
  });
}

export function render(kind: Kind, inputCsv: string, title?: string): string {
  switch (kind) {
    case "line": return renderLine(inputCsv, title);
    case "bar": return renderBar(inputCsv, title);
    case "vm_allocation": return renderVmAllocation(inputCsv, title);
    case "hourly": return renderHourly(inputCsv, title);
  }
}
