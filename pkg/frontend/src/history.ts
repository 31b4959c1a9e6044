/** Append-only session history of scenario evaluations.
 *
 * Planners compare runs side by side; entries are never mutated or removed
 * within a session, and re-submitting an identical scenario with the same
 * seed appends an identical entry.
 */

import type { ScenarioDoc, ScenarioResultPayload } from "./types.js";

export interface HistoryEntry {
  readonly index: number;
  readonly request: ScenarioDoc;
  readonly result: ScenarioResultPayload;
}

export class ScenarioHistory {
  private entries: HistoryEntry[] = [];

  append(request: ScenarioDoc, result: ScenarioResultPayload): HistoryEntry {
    const entry: HistoryEntry = {
      index: this.entries.length,
      request: structuredClone(request),
      result: structuredClone(result),
    };
    this.entries.push(entry);
    return entry;
  }

  all(): readonly HistoryEntry[] {
    return this.entries;
  }

  get length(): number {
    return this.entries.length;
  }
}
