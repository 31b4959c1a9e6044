/** Scenario form model: a list of operator drafts plus validation state.
 *
 * The model is pure (no DOM); `main.ts` binds it to inputs. Submit stays
 * disabled while any validation error is present, mirroring the server
 * rules so a request that would 400 is never sent.
 */

import { escapeHtml, show } from "./format.js";
import type { OperatorDoc, OperatorKind, ScenarioDoc } from "./types.js";
import { validateScenario } from "./validate.js";

export const OPERATOR_TEMPLATES: Record<OperatorKind, OperatorDoc> = {
  price_multiplier: { op: "price_multiplier", factor: 1.05, divisions: [], item_ids: [] },
  delivery_shift: { op: "delivery_shift", activity_ids: [], days: 7 },
  weather_days: { op: "weather_days", dates: [] },
  capacity_change: { op: "capacity_change", resource_id: "", delta_units: -1, week_range: [0, 0] },
  scope_change: { op: "scope_change", item_ids: [], factor: 1.05 },
  resequence: { op: "resequence", add: [], remove: [] },
};

export const OPERATOR_UNITS: Record<OperatorKind, string> = {
  price_multiplier: "factor (x)",
  delivery_shift: "delay (days)",
  weather_days: "dates (ISO)",
  capacity_change: "capacity delta (FTE)",
  scope_change: "factor (x)",
  resequence: "relation edits",
};

export class ScenarioFormModel {
  name = "";
  notes = "";
  trials: number | undefined;
  operators: OperatorDoc[] = [];

  addOperator(kind: OperatorKind): void {
    this.operators.push(structuredClone(OPERATOR_TEMPLATES[kind]));
  }

  removeOperator(index: number): void {
    this.operators.splice(index, 1);
  }

  toDoc(): ScenarioDoc {
    const doc: ScenarioDoc = {
      name: this.name,
      operators: structuredClone(this.operators),
    };
    if (this.notes) doc.notes = this.notes;
    if (this.trials !== undefined) doc.trials = this.trials;
    return doc;
  }

  validation() {
    return validateScenario(this.toDoc());
  }

  get submittable(): boolean {
    return this.validation().ok;
  }
}

export function renderForm(model: ScenarioFormModel): string {
  const validation = model.validation();
  const errors = validation.errors
    .map((e) => `<li class="form-error">${escapeHtml(e)}</li>`)
    .join("");
  const operatorRows = model.operators
    .map(
      (op, i) =>
        `<li class="operator" data-index="${i}">` +
        `<code>${escapeHtml(op.op)}</code> <span class="unit">${escapeHtml(
          OPERATOR_UNITS[op.op as OperatorKind] ?? "",
        )}</span>` +
        `<pre>${escapeHtml(JSON.stringify(op, null, 1))}</pre>` +
        `<button data-action="remove-operator" data-index="${i}">remove</button></li>`,
    )
    .join("");
  const pickers = (Object.keys(OPERATOR_TEMPLATES) as OperatorKind[])
    .map((kind) => `<button data-action="add-operator" data-kind="${kind}">${kind}</button>`)
    .join(" ");
  return (
    `<form id="scenario-form">` +
    `<label>name <input name="name" value="${escapeHtml(model.name)}" required/></label>` +
    `<label>trials <input name="trials" type="number" min="1" value="${show(model.trials ?? "")}"/></label>` +
    `<div class="pickers">${pickers}</div>` +
    `<ol class="operators">${operatorRows}</ol>` +
    `<ul class="errors">${errors}</ul>` +
    `<button type="submit" ${validation.ok ? "" : "disabled"}>Evaluate</button>` +
    `</form>`
  );
}
