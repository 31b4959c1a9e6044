/** Typed client for the sitetwin service. */

import type {
  BuffersPayload,
  CriticalityPayload,
  DecisionDoc,
  EvPayload,
  ForecastPayload,
  LevelerLogPayload,
  RankPayload,
  ScenarioDoc,
  ScenarioResultPayload,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

export class SandboxApi {
  constructor(
    private baseUrl: string = "",
    private fetcher: typeof fetch = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetcher(`${this.baseUrl}${path}`, init);
    } catch (err) {
      throw new ApiError(0, `service unreachable: ${String(err)}`);
    }
    const body = await response.json().catch(() => ({}));
    if (!response.ok) {
      const detail =
        typeof body === "object" && body !== null && "detail" in body
          ? String((body as { detail: unknown }).detail)
          : response.statusText;
      throw new ApiError(response.status, detail);
    }
    return body as T;
  }

  summary(): Promise<Record<string, unknown>> {
    return this.request("/state/summary");
  }

  forecast(): Promise<ForecastPayload> {
    return this.request("/forecast");
  }

  buffers(): Promise<BuffersPayload> {
    return this.request("/buffers");
  }

  ev(): Promise<EvPayload> {
    return this.request("/ev");
  }

  criticality(trials = 5000): Promise<CriticalityPayload> {
    return this.request(`/criticality?trials=${trials}`);
  }

  rank(trials = 5000): Promise<RankPayload> {
    return this.request(`/scenarios/rank?trials=${trials}`);
  }

  levelerLog(): Promise<LevelerLogPayload> {
    return this.request("/leveler/log");
  }

  evaluateScenario(doc: ScenarioDoc): Promise<ScenarioResultPayload> {
    return this.request("/scenario/evaluate", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(doc),
    });
  }

  decide(week: number, doc: DecisionDoc): Promise<Record<string, unknown>> {
    return this.request(`/leveler/recommendation/${week}/decision`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(doc),
    });
  }

  kgQuery(pattern: string): Promise<Record<string, unknown>> {
    return this.request(`/kg/query?pattern=${encodeURIComponent(pattern)}`);
  }
}
