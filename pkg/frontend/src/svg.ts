/**
 * Minimal SVG chart primitives: multi-series line charts and grouped bar
 * charts. Output is a pure function of the inputs.
 */

export interface Point {
  x: number;
  y: number;
}

export interface Series {
  label: string;
  points: Point[];
}

export interface BarGroup {
  label: string;
  values: { series: string; value: number; color?: string }[];
}

export interface ChartOptions {
  width?: number;
  height?: number;
  title?: string;
  xLabel?: string;
  yLabel?: string;
}

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                 "#8c564b", "#e377c2", "#7f7f7f"];

const MARGIN = { top: 48, right: 150, bottom: 56, left: 80 };

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;")
    .replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

function fmtTick(v: number): string {
  if (Math.abs(v) >= 10000) return v.toExponential(1);
  return Number(v.toPrecision(4)).toString();
}

function frame(width: number, height: number, body: string[],
               options: ChartOptions): string {
  const parts = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" ` +
      `height="${height}" viewBox="0 0 ${width} ${height}">`,
    `<rect width="${width}" height="${height}" fill="white"/>`,
  ];
  if (options.title) {
    parts.push(
      `<text x="${width / 2}" y="24" text-anchor="middle" ` +
      `font-size="16" font-family="sans-serif">${esc(options.title)}</text>`);
  }
  if (options.xLabel) {
    parts.push(
      `<text x="${MARGIN.left + (width - MARGIN.left - MARGIN.right) / 2}" ` +
      `y="${height - 12}" text-anchor="middle" font-size="13" ` +
      `font-family="sans-serif">${esc(options.xLabel)}</text>`);
  }
  if (options.yLabel) {
    const y = MARGIN.top + (height - MARGIN.top - MARGIN.bottom) / 2;
    parts.push(
      `<text x="20" y="${y}" text-anchor="middle" font-size="13" ` +
      `font-family="sans-serif" transform="rotate(-90 20 ${y})">` +
      `${esc(options.yLabel)}</text>`);
  }
  parts.push(...body, "</svg>");
  return parts.join("\n");
}

function yAxis(yMin: number, yMax: number, plotW: number, plotH: number,
               scaleY: (y: number) => number): string[] {
  const out: string[] = [];
  for (let i = 0; i <= 5; i++) {
    const v = yMin + ((yMax - yMin) * i) / 5;
    const y = scaleY(v);
    out.push(
      `<line x1="${MARGIN.left}" y1="${y}" x2="${MARGIN.left + plotW}" ` +
      `y2="${y}" stroke="#e0e0e0"/>`,
      `<text x="${MARGIN.left - 8}" y="${y + 4}" text-anchor="end" ` +
      `font-size="11" font-family="sans-serif" fill="#555">` +
      `${fmtTick(v)}</text>`);
  }
  return out;
}

function legend(labels: { label: string; color: string }[],
                width: number): string[] {
  return labels.flatMap(({ label, color }, i) => [
    `<rect x="${width - MARGIN.right + 12}" y="${MARGIN.top + i * 22}" ` +
    `width="18" height="10" fill="${color}"/>`,
    `<text x="${width - MARGIN.right + 36}" ` +
    `y="${MARGIN.top + i * 22 + 9}" font-size="12" ` +
    `font-family="sans-serif">${esc(label)}</text>`,
  ]);
}

export function lineChart(series: Series[],
                          options: ChartOptions = {}): string {
  const width = options.width ?? 760;
  const height = options.height ?? 440;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;

  const points = series.flatMap((s) => s.points);
  const xMin = Math.min(...points.map((p) => p.x));
  const xMax = Math.max(...points.map((p) => p.x));
  const yMin = Math.min(0, ...points.map((p) => p.y));
  const yMax = Math.max(...points.map((p) => p.y));
  const xRange = xMax - xMin || 1;
  const yRange = yMax - yMin || 1;
  const scaleX = (x: number) => MARGIN.left + ((x - xMin) / xRange) * plotW;
  const scaleY = (y: number) =>
    MARGIN.top + plotH - ((y - yMin) / yRange) * plotH;

  const body = yAxis(yMin, yMax, plotW, plotH, scaleY);
  const xs = [...new Set(points.map((p) => p.x))].sort((a, b) => a - b);
  for (const x of xs) {
    body.push(
      `<text x="${scaleX(x)}" y="${MARGIN.top + plotH + 18}" ` +
      `text-anchor="middle" font-size="11" font-family="sans-serif" ` +
      `fill="#555">${fmtTick(x)}</text>`);
  }
  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const sorted = [...s.points].sort((a, b) => a.x - b.x);
    const path = sorted
      .map((p, j) => `${j === 0 ? "M" : "L"} ${scaleX(p.x).toFixed(2)} ` +
                     `${scaleY(p.y).toFixed(2)}`)
      .join(" ");
    body.push(`<path d="${path}" fill="none" stroke="${color}" ` +
              `stroke-width="2"/>`);
    for (const p of sorted) {
      body.push(`<circle cx="${scaleX(p.x).toFixed(2)}" ` +
                `cy="${scaleY(p.y).toFixed(2)}" r="3" fill="${color}"/>`);
    }
  });
  body.push(...legend(series.map((s, i) => (
    { label: s.label, color: PALETTE[i % PALETTE.length] })), width));
  return frame(width, height, body, options);
}

export function barChart(groups: BarGroup[],
                         options: ChartOptions = {}): string {
  const width = options.width ?? Math.max(760, 40 + groups.length * 28);
  const height = options.height ?? 440;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;

  const seriesNames = [...new Set(
    groups.flatMap((g) => g.values.map((v) => v.series)))];
  const colorOf = new Map(seriesNames.map(
    (name, i) => [name, PALETTE[i % PALETTE.length]]));
  const values = groups.flatMap((g) => g.values.map((v) => v.value));
  const yMin = Math.min(0, ...values);
  const yMax = Math.max(...values, 1);
  const yRange = yMax - yMin || 1;
  const scaleY = (y: number) =>
    MARGIN.top + plotH - ((y - yMin) / yRange) * plotH;

  const body = yAxis(yMin, yMax, plotW, plotH, scaleY);
  const groupW = plotW / groups.length;
  const labelEvery = Math.max(1, Math.ceil(groups.length / 24));
  groups.forEach((group, gi) => {
    const barW = (groupW * 0.8) / group.values.length;
    group.values.forEach((v, vi) => {
      const x = MARGIN.left + gi * groupW + groupW * 0.1 + vi * barW;
      const y0 = scaleY(Math.max(0, v.value));
      const h = Math.abs(scaleY(v.value) - scaleY(0));
      const fill = v.color ?? colorOf.get(v.series) ?? PALETTE[0];
      body.push(`<rect x="${x.toFixed(2)}" y="${y0.toFixed(2)}" ` +
                `width="${barW.toFixed(2)}" height="${h.toFixed(2)}" ` +
                `fill="${fill}"/>`);
    });
    if (gi % labelEvery === 0) {
      body.push(
        `<text x="${(MARGIN.left + gi * groupW + groupW / 2).toFixed(2)}" ` +
        `y="${MARGIN.top + plotH + 18}" text-anchor="middle" ` +
        `font-size="10" font-family="sans-serif" fill="#555">` +
        `${esc(group.label)}</text>`);
    }
  });
  const legendEntries = groups.some((g) => g.values.some((v) => v.color))
    ? [...new Map(groups.flatMap((g) => g.values)
        .map((v) => [v.series, v.color ?? PALETTE[0]])).entries()]
        .map(([label, color]) => ({ label, color }))
    : seriesNames.map((label) => (
        { label, color: colorOf.get(label) ?? PALETTE[0] }));
  body.push(...legend(legendEntries, width));
  return frame(width, height, body, options);
}
