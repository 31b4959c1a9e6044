/** Payload fidelity: every value a panel displays must appear byte-equal to
 * the API payload it came from. Fixtures are captured verbatim from the
 * service running on the bundled sample project. */

import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import {
  bufferPanel,
  criticalityPanel,
  decisionCard,
  forecastPanel,
  levelerPanel,
  scenarioResultCard,
  scurvePanel,
  staleBadge,
  tornadoPanel,
} from "../src/panels.js";
import type {
  BuffersPayload,
  CriticalityPayload,
  EvPayload,
  ForecastPayload,
  LevelerLogPayload,
  RankPayload,
  ScenarioResultPayload,
} from "../src/types.js";

function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(new URL(`./fixtures/${name}.json`, import.meta.url), "utf-8")) as T;
}

describe("forecast panel", () => {
  const payload = fixture<ForecastPayload>("forecast");

  it("renders every weekly value byte-equal to the payload", () => {
    const html = forecastPanel(payload);
    for (const row of payload.rows) {
      expect(html).toContain(`<td data-field="p50">${String(row.p50)}</td>`);
      expect(html).toContain(`<td data-field="p80">${String(row.p80)}</td>`);
      expect(html).toContain(
        `<td data-field="actual">${row.actual === null ? "-" : String(row.actual)}</td>`,
      );
    }
  });

  it("shows the convergence week from the payload, not a recomputation", () => {
    const html = forecastPanel(payload);
    expect(payload.convergence_week).toBe(13);
    expect(html).toContain(`data-field="convergence_week">13</strong>`);
  });
});

describe("buffer panel", () => {
  const payload = fixture<BuffersPayload>("buffers");

  it("gauge reads the project buffer percentage verbatim", () => {
    const html = bufferPanel(payload);
    expect(payload.project_used_pct).toBe(30);
    expect(html).toContain(`data-field="project_used_pct">${String(payload.project_used_pct)}%`);
    expect(html).toContain(`data-field="feeding_used_pct">${String(payload.feeding_used_pct)}%`);
  });
});

describe("earned value panel", () => {
  const payload = fixture<EvPayload>("ev");

  it("renders all table cells verbatim", () => {
    const html = scurvePanel(payload);
    for (const row of payload.rows) {
      for (const cell of row) {
        expect(html).toContain(`<td>${cell === null ? "-" : String(cell)}</td>`);
      }
    }
  });

  it("carries the engine's forecast annotation through untouched", () => {
    const html = scurvePanel(payload);
    for (const note of payload.annotations) {
      expect(html).toContain(note.replace(/&/g, "&amp;"));
    }
  });
});

describe("tornado panel", () => {
  const payload = fixture<RankPayload>("rank");

  it("labels every bar with the raw payload delta", () => {
    const html = tornadoPanel(payload);
    for (const [name, delta] of payload.tornado) {
      expect(html).toContain(name);
      expect(html).toContain(`data-field="dfinish">${String(delta)}</text>`);
    }
  });
});

describe("criticality panel", () => {
  const payload = fixture<CriticalityPayload>("criticality");

  it("echoes P50/P80 and every row cell", () => {
    const html = criticalityPanel(payload);
    expect(html).toContain(`data-field="p50">${String(payload.p50)}</strong>`);
    expect(html).toContain(`data-field="p80">${String(payload.p80)}</strong>`);
    for (const row of payload.rows) {
      expect(html).toContain(`<td>${String(row[0])}</td>`);
    }
  });
});

describe("scenario result card", () => {
  const payload = fixture<ScenarioResultPayload>("scenario_result");

  it("renders the four deltas byte-equal to the payload", () => {
    const html = scenarioResultCard(payload);
    expect(html).toContain(`data-field="dfinish_p50">${String(payload.dfinish_p50)} d`);
    expect(html).toContain(`data-field="dfinish_p80">${String(payload.dfinish_p80)} d`);
    expect(html).toContain(`data-field="dcost_p50_kusd">${String(payload.dcost_p50_kusd)} kUSD`);
    expect(html).toContain(`data-field="dcost_p80_kusd">${String(payload.dcost_p80_kusd)} kUSD`);
  });

  it("null scenario renders exact zeros", () => {
    const nullResult = fixture<ScenarioResultPayload>("scenario_null");
    expect(nullResult.dfinish_p50).toBe(0);
    expect(nullResult.dcost_p50_kusd).toBe(0);
    const html = scenarioResultCard(nullResult);
    expect(html).toContain(`data-field="dfinish_p50">0 d`);
    expect(html).toContain(`data-field="dcost_p50_kusd">0 kUSD`);
  });
});

describe("leveler panel", () => {
  const payload = fixture<LevelerLogPayload>("leveler_log");

  it("renders one decision card per weekly recommendation", () => {
    const html = levelerPanel(payload);
    const cards = html.match(/class="decision-card"/g) ?? [];
    expect(cards.length).toBe(payload.rows.length);
    for (const row of payload.rows) {
      expect(html).toContain(row.action_id);
      expect(html).toContain(
        `data-field="predicted_delta_objective">${String(row.predicted_delta_objective)}</span>`,
      );
    }
  });

  it("pending cards ship with the reject button disabled until a reason exists", () => {
    const pending = payload.rows.find((r) => r.adopted === "pending");
    expect(pending).toBeDefined();
    const html = decisionCard(pending!);
    expect(html).toContain(`data-action="reject" disabled`);
    expect(html).toContain(`aria-label="rejection reason"`);
  });
});

describe("stale badge", () => {
  it("hidden until the input hash changes", () => {
    expect(staleBadge(false)).toBe("");
    expect(staleBadge(true)).toContain("stale data");
  });
});
