/** Client-side validation mirroring the server's scenario and decision rules.
 *
 * The server remains authoritative (it re-validates and returns 400/409);
 * these checks exist so the UI can disable submission before a doomed
 * request is ever sent.
 */

import type { DecisionDoc, OperatorDoc, ScenarioDoc } from "./types.js";

export interface ValidationResult {
  ok: boolean;
  errors: string[];
}

const OPERATOR_KINDS = new Set([
  "price_multiplier",
  "delivery_shift",
  "weather_days",
  "capacity_change",
  "scope_change",
  "resequence",
]);

export function validateOperator(op: OperatorDoc, index: number): string[] {
  const errors: string[] = [];
  const at = `operator ${index + 1}`;
  if (!OPERATOR_KINDS.has(op.op)) {
    errors.push(`${at}: unknown operator kind "${op.op}"`);
    return errors;
  }
  switch (op.op) {
    case "price_multiplier": {
      const factor = op.factor as number;
      if (!(typeof factor === "number" && factor > 0)) {
        errors.push(`${at}: price factor must be > 0`);
      }
      const divisions = (op.divisions as string[]) ?? [];
      const items = (op.item_ids as string[]) ?? [];
      if (divisions.length === 0 && items.length === 0) {
        errors.push(`${at}: select at least one division or cost item`);
      }
      break;
    }
    case "delivery_shift": {
      const ids = (op.activity_ids as string[]) ?? [];
      if (ids.length === 0) errors.push(`${at}: select at least one activity`);
      const shift = op.days as number;
      if (!(typeof shift === "number" && shift >= 0)) {
        errors.push(`${at}: delay days must be >= 0`);
      }
      break;
    }
    case "weather_days": {
      const dates = (op.dates as string[]) ?? [];
      if (dates.length === 0) errors.push(`${at}: add at least one date`);
      for (const d of dates) {
        if (!/^\d{4}-\d{2}-\d{2}$/.test(d)) errors.push(`${at}: "${d}" is not an ISO date`);
      }
      break;
    }
    case "capacity_change": {
      if (!op.resource_id) errors.push(`${at}: resource required`);
      if (typeof op.delta_units !== "number" || op.delta_units === 0) {
        errors.push(`${at}: capacity delta must be a non-zero number of FTE`);
      }
      break;
    }
    case "scope_change": {
      const ids = (op.item_ids as string[]) ?? [];
      if (ids.length === 0) errors.push(`${at}: select at least one cost item`);
      const factor = op.factor as number;
      if (!(typeof factor === "number" && factor > 0)) {
        errors.push(`${at}: scope factor must be > 0`);
      }
      break;
    }
    case "resequence": {
      const add = (op.add as unknown[]) ?? [];
      const remove = (op.remove as unknown[]) ?? [];
      if (add.length === 0 && remove.length === 0) {
        errors.push(`${at}: add or remove at least one relation`);
      }
      break;
    }
  }
  return errors;
}

export function validateScenario(doc: ScenarioDoc): ValidationResult {
  const errors: string[] = [];
  if (!doc.name || !doc.name.trim()) errors.push("scenario name required");
  doc.operators.forEach((op, i) => errors.push(...validateOperator(op, i)));
  if (doc.trials !== undefined && !(doc.trials > 0)) {
    errors.push("trials must be positive");
  }
  return { ok: errors.length === 0, errors };
}

export function validateDecision(doc: DecisionDoc): ValidationResult {
  const errors: string[] = [];
  if (!doc.adopt && !doc.reason.trim()) {
    errors.push("a reason is required to reject a recommendation");
  }
  return { ok: errors.length === 0, errors };
}
