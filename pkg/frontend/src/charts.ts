// Self-contained SVG builders: 100%-stacked mode bars and per-sprint lines.

export const MODE_COLORS = ["#4e79a7", "#59a14f", "#edc948", "#b07aa1", "#e15759"];

const esc = (s: string) =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");

export interface StackedBar {
  label: string;
  shares: number[];   // percentages in mode order; rendered proportionally
}

export function stackedModeBars(bars: StackedBar[], width = 640, barHeight = 26,
                                gap = 10, labelWidth = 260): string {
  const height = bars.length * (barHeight + gap) + gap;
  const innerWidth = width - labelWidth - 10;
  const parts: string[] = [
    `<svg class="chart" viewBox="0 0 ${width} ${height}" role="img">`,
  ];
  bars.forEach((bar, i) => {
    const y = gap + i * (barHeight + gap);
    const total = bar.shares.reduce((a, b) => a + b, 0) || 1;
    let x = labelWidth;
    parts.push(`<text x="${labelWidth - 8}" y="${y + barHeight / 2 + 4}" `
      + `text-anchor="end" class="bar-label">${esc(bar.label)}</text>`);
    bar.shares.forEach((share, k) => {
      const w = (share / total) * innerWidth;
      if (w > 0) {
        parts.push(`<rect x="${x}" y="${y}" width="${w}" height="${barHeight}" `
          + `fill="${MODE_COLORS[k]}" data-share="${share}"></rect>`);
      }
      x += w;
    });
  });
  parts.push("</svg>");
  return parts.join("");
}

export interface LineSeries {
  name: string;
  values: number[];
  color?: string;
}

export function sprintLineChart(series: LineSeries[], width = 640, height = 220,
                                pad = 34): string {
  const all = series.flatMap((s) => s.values);
  if (all.length === 0) return `<svg class="chart" viewBox="0 0 ${width} ${height}"></svg>`;
  const lo = Math.min(...all, 0);
  const hi = Math.max(...all) || 1;
  const n = Math.max(...series.map((s) => s.values.length));
  const sx = (i: number) => pad + (n <= 1 ? 0 : (i / (n - 1)) * (width - 2 * pad));
  const sy = (v: number) => height - pad - ((v - lo) / (hi - lo || 1)) * (height - 2 * pad);
  const parts = [`<svg class="chart" viewBox="0 0 ${width} ${height}" role="img">`];
  parts.push(`<line x1="${pad}" y1="${height - pad}" x2="${width - pad}" `
    + `y2="${height - pad}" class="axis"></line>`);
  parts.push(`<line x1="${pad}" y1="${pad}" x2="${pad}" y2="${height - pad}" `
    + `class="axis"></line>`);
  series.forEach((s, k) => {
    const color = s.color ?? MODE_COLORS[k % MODE_COLORS.length];
    const points = s.values.map((v, i) => `${sx(i)},${sy(v)}`).join(" ");
    parts.push(`<polyline points="${points}" fill="none" stroke="${color}" `
      + `stroke-width="2" data-series="${esc(s.name)}"></polyline>`);
    parts.push(`<text x="${width - pad}" y="${pad + 14 * k + 4}" text-anchor="end" `
      + `fill="${color}" class="legend">${esc(s.name)}</text>`);
  });
  parts.push("</svg>");
  return parts.join("");
}
