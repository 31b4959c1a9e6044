/** App behavior against a mocked service: error surfacing, staleness,
 * append-only history, and identical re-submission. */

import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { ApiError, SandboxApi } from "../src/api.js";
import { SandboxApp } from "../src/app.js";
import type { ScenarioResultPayload } from "../src/types.js";

function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(new URL(`./fixtures/${name}.json`, import.meta.url), "utf-8")) as T;
}

function mockFetch(routes: Record<string, () => { status: number; body: unknown }>): typeof fetch {
  return (async (input: RequestInfo | URL) => {
    const url = String(input);
    const path = url.split("?")[0];
    const route = routes[path];
    if (!route) throw new Error(`no mock for ${url}`);
    const { status, body } = route();
    return new Response(JSON.stringify(body), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  }) as typeof fetch;
}

const RESULT = fixture<ScenarioResultPayload>("scenario_result");
const ERROR_400 = fixture<{ status: number; body: { detail: string } }>("error_400");
const ERROR_409 = fixture<{ status: number; body: { detail: string } }>("error_409");

function appWith(routes: Record<string, () => { status: number; body: unknown }>): SandboxApp {
  return new SandboxApp(new SandboxApi("http://svc", mockFetch(routes)));
}

describe("scenario submission", () => {
  function validApp(result: ScenarioResultPayload = RESULT): SandboxApp {
    const app = appWith({
      "http://svc/scenario/evaluate": () => ({ status: 200, body: result }),
    });
    app.form.name = "late ahu";
    app.form.addOperator("delivery_shift");
    (app.form.operators[0] as { activity_ids: string[] }).activity_ids = ["A120"];
    return app;
  }

  it("appends to history and renders the payload values", async () => {
    const app = validApp();
    const { card } = await app.submitScenario();
    expect(card).toContain(`data-field="dfinish_p50">${String(RESULT.dfinish_p50)} d`);
    expect(app.history.length).toBe(1);
  });

  it("identical re-submission appends an identical entry", async () => {
    const app = validApp();
    await app.submitScenario();
    await app.submitScenario();
    expect(app.history.length).toBe(2);
    expect(app.history.all()[0].result).toEqual(app.history.all()[1].result);
    expect(app.history.all()[0].request).toEqual(app.history.all()[1].request);
  });

  it("refuses to send an invalid form", async () => {
    const app = appWith({});
    app.form.name = ""; // invalid
    await expect(app.submitScenario()).rejects.toThrow(/form invalid/);
  });

  it("surfaces the server 400 detail", async () => {
    const app = validApp();
    const failing = appWith({
      "http://svc/scenario/evaluate": () => ({ status: ERROR_400.status, body: ERROR_400.body }),
    });
    failing.form.name = app.form.name;
    failing.form.operators = app.form.operators;
    await expect(failing.submitScenario()).rejects.toMatchObject({
      status: 400,
      detail: ERROR_400.body.detail,
    });
  });
});

describe("decisions", () => {
  it("blocks reject-without-reason before any request is made", async () => {
    const app = appWith({}); // no routes: a request would throw "no mock"
    await expect(app.decide(2, { adopt: false, reason: "" })).rejects.toThrow(/reason/);
  });

  it("surfaces a 409 on duplicate decisions", async () => {
    const app = appWith({
      "http://svc/leveler/recommendation/2/decision": () => ({
        status: ERROR_409.status,
        body: ERROR_409.body,
      }),
    });
    await expect(app.decide(2, { adopt: true, reason: "" })).rejects.toMatchObject({
      status: 409,
    });
  });
});

describe("staleness and connectivity", () => {
  it("flips the stale badge when the input hash changes", () => {
    const app = appWith({});
    app.observeHash("aaaa");
    expect(app.stale).toBe(false);
    app.observeHash("aaaa");
    expect(app.stale).toBe(false);
    app.observeHash("bbbb");
    expect(app.stale).toBe(true);
  });

  it("renders the connectivity banner when the service is down", async () => {
    const api = new SandboxApi("http://svc", (async () => {
      throw new Error("ECONNREFUSED");
    }) as typeof fetch);
    const app = new SandboxApp(api);
    const views = await app.renderViews();
    expect(views.banner).toContain("service unreachable");
    expect(views.banner).toContain('data-action="retry"');
    expect(views.forecast).toBe("");
  });

  it("ApiError carries status and detail", () => {
    const err = new ApiError(409, "week 2 already decided");
    expect(err.message).toContain("409");
    expect(err.message).toContain("already decided");
  });
});
