/** Application state machine: loads panels, tracks staleness, routes actions.
 *
 * Kept DOM-free so it is unit-testable; `main.ts` owns the actual document.
 * Mutations are pessimistic: nothing renders as decided or recorded until
 * the server confirms it.
 */

import { ApiError, SandboxApi } from "./api.js";
import { ScenarioFormModel } from "./form.js";
import { ScenarioHistory } from "./history.js";
import {
  bufferPanel,
  connectivityBanner,
  criticalityPanel,
  forecastPanel,
  levelerPanel,
  scenarioResultCard,
  scurvePanel,
  staleBadge,
  tornadoPanel,
} from "./panels.js";
import type { DecisionDoc, ScenarioResultPayload } from "./types.js";
import { validateDecision } from "./validate.js";

export interface RenderedViews {
  forecast: string;
  buffers: string;
  scurves: string;
  tornado: string;
  criticality: string;
  leveler: string;
  banner: string;
  stale: string;
}

export class SandboxApp {
  readonly history = new ScenarioHistory();
  readonly form = new ScenarioFormModel();
  private knownHash: string | null = null;
  private staleSeen = false;

  constructor(private api: SandboxApi) {}

  /** Track the snapshot hash; flips the stale badge if it ever changes. */
  observeHash(hash: string): void {
    if (this.knownHash === null) this.knownHash = hash;
    else if (hash !== this.knownHash) this.staleSeen = true;
  }

  get stale(): boolean {
    return this.staleSeen;
  }

  async renderViews(): Promise<RenderedViews> {
    try {
      const [forecast, buffers, evPayload, rank, crit, leveler] = await Promise.all([
        this.api.forecast(),
        this.api.buffers(),
        this.api.ev(),
        this.api.rank(),
        this.api.criticality(),
        this.api.levelerLog(),
      ]);
      for (const payload of [forecast, buffers, evPayload, rank, crit, leveler]) {
        this.observeHash(payload.input_hash);
      }
      return {
        forecast: forecastPanel(forecast),
        buffers: bufferPanel(buffers),
        scurves: scurvePanel(evPayload),
        tornado: tornadoPanel(rank),
        criticality: criticalityPanel(crit),
        leveler: levelerPanel(leveler),
        banner: "",
        stale: staleBadge(this.stale),
      };
    } catch (err) {
      const message = err instanceof ApiError ? err.detail : String(err);
      return {
        forecast: "",
        buffers: "",
        scurves: "",
        tornado: "",
        criticality: "",
        leveler: "",
        banner: connectivityBanner(message),
        stale: staleBadge(this.stale),
      };
    }
  }

  /** Submit the current form; append to history and return the card HTML. */
  async submitScenario(): Promise<{ card: string; result: ScenarioResultPayload }> {
    const validation = this.form.validation();
    if (!validation.ok) {
      throw new ApiError(0, `form invalid: ${validation.errors.join("; ")}`);
    }
    const doc = this.form.toDoc();
    const result = await this.api.evaluateScenario(doc);
    this.observeHash(result.input_hash);
    this.history.append(doc, result);
    return { card: scenarioResultCard(result), result };
  }

  /** Record an adopt/reject decision; client-side rule mirrors the server. */
  async decide(week: number, doc: DecisionDoc): Promise<Record<string, unknown>> {
    const validation = validateDecision(doc);
    if (!validation.ok) {
      throw new ApiError(0, validation.errors.join("; "));
    }
    return this.api.decide(week, doc);
  }
}
