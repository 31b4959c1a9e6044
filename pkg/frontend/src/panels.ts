/** Panel renderers: pure functions from API payloads to HTML/SVG strings.
 *
 * Every number a panel shows passes through `show(payload.value)` unchanged;
 * charts position things geometrically but label them with the raw payload
 * values. That keeps the engine the single source of numeric truth.
 */

import { days, escapeHtml, kusd, show, signClass } from "./format.js";
import type {
  BuffersPayload,
  CriticalityPayload,
  EvPayload,
  ForecastPayload,
  LevelerLogPayload,
  LevelerRow,
  RankPayload,
  ScenarioResultPayload,
} from "./types.js";

const CHART_W = 640;
const CHART_H = 240;
const PAD = 40;

interface Series {
  label: string;
  points: [number, number | null][];
  color: string;
  dashed?: boolean;
}

function lineChart(series: Series[], title: string): string {
  const xs = series.flatMap((s) => s.points.map(([x]) => x));
  const ys = series.flatMap((s) => s.points.map(([, y]) => y)).filter((y): y is number => y !== null);
  if (xs.length === 0 || ys.length === 0) {
    return `<svg class="chart" viewBox="0 0 ${CHART_W} ${CHART_H}" role="img"><text x="10" y="20">${escapeHtml(title)}: no data</text></svg>`;
  }
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  const [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  const sx = (x: number) => PAD + ((x - x0) / Math.max(x1 - x0, 1e-9)) * (CHART_W - 2 * PAD);
  const sy = (y: number) => CHART_H - PAD - ((y - y0) / Math.max(y1 - y0, 1e-9)) * (CHART_H - 2 * PAD);
  const paths = series
    .map((s) => {
      const d = s.points
        .filter((p): p is [number, number] => p[1] !== null)
        .map(([x, y], i) => `${i === 0 ? "M" : "L"}${sx(x).toFixed(1)},${sy(y).toFixed(1)}`)
        .join(" ");
      const dash = s.dashed ? ' stroke-dasharray="6 4"' : "";
      return `<path d="${d}" fill="none" stroke="${s.color}" stroke-width="2"${dash}><title>${escapeHtml(s.label)}</title></path>`;
    })
    .join("");
  const legend = series
    .map(
      (s, i) =>
        `<text x="${PAD + i * 150}" y="16" fill="${s.color}" class="legend">${escapeHtml(s.label)}</text>`,
    )
    .join("");
  const yLabels = `<text x="4" y="${sy(y0) + 4}" class="axis">${show(y0)}</text><text x="4" y="${sy(y1) + 4}" class="axis">${show(y1)}</text>`;
  return `<svg class="chart" viewBox="0 0 ${CHART_W} ${CHART_H}" role="img" aria-label="${escapeHtml(title)}">${legend}${paths}${yLabels}</svg>`;
}

export function forecastPanel(payload: ForecastPayload): string {
  const rows = payload.rows;
  const chart = lineChart(
    [
      { label: "P50 forecast", points: rows.map((r) => [r.week, r.p50]), color: "#2563eb" },
      { label: "P80 forecast", points: rows.map((r) => [r.week, r.p80]), color: "#6b7280", dashed: true },
      { label: "actual", points: rows.map((r) => [r.week, r.actual]), color: "#111827" },
    ],
    "schedule forecast",
  );
  const convergence =
    payload.convergence_week === null
      ? ""
      : `<p class="note">P50 meets actual at week <strong data-field="convergence_week">${show(payload.convergence_week)}</strong></p>`;
  const table = rows
    .map(
      (r) =>
        `<tr><td>${show(r.week)}</td><td data-field="p50">${show(r.p50)}</td>` +
        `<td data-field="p80">${show(r.p80)}</td><td data-field="actual">${show(r.actual)}</td>` +
        `<td>${escapeHtml(r.note)}</td></tr>`,
    )
    .join("");
  return `<section class="panel" id="forecast-panel"><h2>Finish forecast</h2>${chart}${convergence}` +
    `<table><thead><tr><th>week</th><th>P50 (d)</th><th>P80 (d)</th><th>actual (d)</th><th>note</th></tr></thead>` +
    `<tbody>${table}</tbody></table></section>`;
}

export function bufferPanel(payload: BuffersPayload): string {
  const pct = payload.project_used_pct;
  const angle = Math.max(0, Math.min(100, pct)) * 1.8;
  const needle = `rotate(${(angle - 90).toFixed(1)})`;
  const gauge =
    `<svg class="gauge" viewBox="0 0 200 120" role="img" aria-label="project buffer used">` +
    `<path d="M20,100 A80,80 0 0 1 180,100" fill="none" stroke="#e5e7eb" stroke-width="16"/>` +
    `<g transform="translate(100,100)"><line x1="0" y1="0" x2="0" y2="-70" stroke="#dc2626" stroke-width="3" transform="${needle}"/></g>` +
    `<text x="100" y="86" text-anchor="middle" class="gauge-value" data-field="project_used_pct">${show(pct)}%</text>` +
    `</svg>`;
  const trend = lineChart(
    [
      {
        label: "cum feeding (d)",
        points: payload.rows.map((r) => [Number(r[0]), Number(r[3])]),
        color: "#0d9488",
      },
      {
        label: "cum project (d)",
        points: payload.rows.map((r) => [Number(r[0]), Number(r[4])]),
        color: "#b45309",
      },
    ],
    "buffer consumption",
  );
  return (
    `<section class="panel" id="buffer-panel"><h2>Buffers</h2>${gauge}` +
    `<p>project buffer used: <strong data-field="project_used_pct">${show(payload.project_used_pct)}%</strong>, ` +
    `feeding buffer used: <strong data-field="feeding_used_pct">${show(payload.feeding_used_pct)}%</strong></p>` +
    `${trend}</section>`
  );
}

export function scurvePanel(payload: EvPayload): string {
  const idx = {
    period: payload.columns.indexOf("period"),
    bcws: payload.columns.indexOf("BCWS"),
    bcwp: payload.columns.indexOf("BCWP"),
    acwp: payload.columns.indexOf("ACWP"),
  };
  const chart = lineChart(
    [
      { label: "BCWS", points: payload.rows.map((r) => [Number(r[idx.period]), Number(r[idx.bcws])]), color: "#2563eb" },
      { label: "BCWP", points: payload.rows.map((r) => [Number(r[idx.period]), Number(r[idx.bcwp])]), color: "#16a34a" },
      { label: "ACWP", points: payload.rows.map((r) => [Number(r[idx.period]), Number(r[idx.acwp])]), color: "#dc2626" },
    ],
    "cumulative cost curves",
  );
  const annotations = payload.annotations
    .map((a) => `<p class="note">${escapeHtml(a)}</p>`)
    .join("");
  const head = payload.columns.map((c) => `<th>${escapeHtml(c)}</th>`).join("");
  const body = payload.rows
    .map((r) => `<tr>${r.map((v) => `<td>${show(v as number | string | null)}</td>`).join("")}</tr>`)
    .join("");
  return `<section class="panel" id="ev-panel"><h2>Earned value</h2>${chart}${annotations}` +
    `<table><thead><tr>${head}</tr></thead><tbody>${body}</tbody></table></section>`;
}

export function tornadoPanel(payload: RankPayload): string {
  const entries = payload.tornado;
  const maxAbs = Math.max(...entries.map(([, v]) => Math.abs(v)), 1e-9);
  const rowH = 26;
  const mid = CHART_W / 2;
  const bars = entries
    .map(([name, value], i) => {
      const w = (Math.abs(value) / maxAbs) * (CHART_W / 2 - PAD);
      const x = value >= 0 ? mid : mid - w;
      const color = value >= 0 ? "#e76f51" : "#2a9d8f";
      const y = 24 + i * rowH;
      return (
        `<rect x="${x.toFixed(1)}" y="${y}" width="${Math.max(w, 1).toFixed(1)}" height="${rowH - 8}" fill="${color}"/>` +
        `<text x="8" y="${y + 13}" class="bar-label">${escapeHtml(name)}</text>` +
        `<text x="${(value >= 0 ? mid + w + 6 : mid - w - 6).toFixed(1)}" y="${y + 13}"` +
        ` text-anchor="${value >= 0 ? "start" : "end"}" data-field="dfinish">${show(value)}</text>`
      );
    })
    .join("");
  const height = 24 + entries.length * rowH + 8;
  return (
    `<section class="panel" id="tornado-panel"><h2>Scenario sensitivity (Δ finish days, P50)</h2>` +
    `<svg class="tornado" viewBox="0 0 ${CHART_W} ${height}" role="img">` +
    `<line x1="${mid}" y1="16" x2="${mid}" y2="${height - 4}" stroke="#9ca3af"/>${bars}</svg></section>`
  );
}

export function criticalityPanel(payload: CriticalityPayload): string {
  const head = payload.columns.map((c) => `<th>${escapeHtml(c)}</th>`).join("");
  const body = payload.rows
    .map((r) => `<tr>${r.map((v) => `<td>${show(v as number | string)}</td>`).join("")}</tr>`)
    .join("");
  return (
    `<section class="panel" id="criticality-panel"><h2>Criticality</h2>` +
    `<p>P50 <strong data-field="p50">${show(payload.p50)}</strong> workdays, ` +
    `P80 <strong data-field="p80">${show(payload.p80)}</strong> workdays ` +
    `(<span data-field="n_trials">${show(payload.n_trials)}</span> trials)</p>` +
    `<table><thead><tr>${head}</tr></thead><tbody>${body}</tbody></table></section>`
  );
}

export function scenarioResultCard(payload: ScenarioResultPayload): string {
  const spread = payload.assumed_cost_spread
    ? `<span class="badge" title="P80 cost uses the configured spread factor">assumed spread</span>`
    : "";
  return (
    `<article class="result-card" data-scenario="${escapeHtml(payload.name)}">` +
    `<h3>${escapeHtml(payload.name)} ${spread}</h3>` +
    `<dl>` +
    `<dt>Δ finish P50</dt><dd class="${signClass(payload.dfinish_p50)}" data-field="dfinish_p50">${days(payload.dfinish_p50)}</dd>` +
    `<dt>Δ finish P80</dt><dd class="${signClass(payload.dfinish_p80)}" data-field="dfinish_p80">${days(payload.dfinish_p80)}</dd>` +
    `<dt>Δ cost P50</dt><dd class="${signClass(payload.dcost_p50_kusd)}" data-field="dcost_p50_kusd">${kusd(payload.dcost_p50_kusd)}</dd>` +
    `<dt>Δ cost P80</dt><dd class="${signClass(payload.dcost_p80_kusd)}" data-field="dcost_p80_kusd">${kusd(payload.dcost_p80_kusd)}</dd>` +
    `</dl>` +
    `<p class="meta">divisions: ${payload.affected_divisions.map(escapeHtml).join(", ") || "-"}` +
    ` | trials ${show(payload.n_trials)} | seed ${show(payload.seed)}</p>` +
    `</article>`
  );
}

export function decisionCard(row: LevelerRow): string {
  const decided = row.adopted !== "pending";
  const status = decided
    ? `<span class="badge badge-${row.adopted}">${row.adopted === "yes" ? "adopted" : "rejected"}</span>`
    : "";
  const reason = row.adopted === "no" ? `<p class="meta">reason: ${escapeHtml(row.rejection_reason)}</p>` : "";
  const controls = decided
    ? ""
    : `<div class="decision-controls" data-week="${row.week}">` +
      `<button class="adopt" data-action="adopt">Adopt</button>` +
      `<button class="reject" data-action="reject" disabled>Reject</button>` +
      `<input class="reason" placeholder="reason (required to reject)" aria-label="rejection reason"/>` +
      `</div>`;
  return (
    `<article class="decision-card" data-week="${row.week}">` +
    `<h3>${escapeHtml(row.action_id)} (week ${show(row.week)}) ${status}</h3>` +
    `<p>${escapeHtml(row.summary)}</p>` +
    `<p>predicted Δ objective <span data-field="predicted_delta_objective">${show(row.predicted_delta_objective)}</span>, ` +
    `Δ overtime <span data-field="predicted_delta_overtime_hours">${show(row.predicted_delta_overtime_hours)}</span> h</p>` +
    `${reason}${controls}</article>`
  );
}

export function levelerPanel(payload: LevelerLogPayload): string {
  const cards = payload.rows.map(decisionCard).join("");
  return (
    `<section class="panel" id="leveler-panel"><h2>Leveling recommendations</h2>` +
    `<p>adoption rate: <strong data-field="adoption_rate">${show(payload.adoption_rate)}%</strong></p>` +
    `${cards}</section>`
  );
}

export function staleBadge(visible: boolean): string {
  return visible
    ? `<span id="stale-badge" class="badge badge-stale">stale data: project inputs changed, refresh</span>`
    : "";
}

export function connectivityBanner(message: string): string {
  return (
    `<div id="connectivity-banner" role="alert">service unreachable: ${escapeHtml(message)} ` +
    `<button data-action="retry">retry</button></div>`
  );
}
