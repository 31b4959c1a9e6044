import { describe, expect, it } from "vitest";

import { ScenarioFormModel, renderForm } from "../src/form.js";
import { validateDecision, validateScenario } from "../src/validate.js";

describe("scenario validation", () => {
  it("accepts a well-formed delivery shift", () => {
    const result = validateScenario({
      name: "late ahu",
      operators: [{ op: "delivery_shift", activity_ids: ["A120"], days: 14 }],
    });
    expect(result.ok).toBe(true);
  });

  it("rejects non-positive price factors", () => {
    const result = validateScenario({
      name: "bad price",
      operators: [{ op: "price_multiplier", factor: 0, divisions: ["09"] }],
    });
    expect(result.ok).toBe(false);
    expect(result.errors.join(" ")).toContain("factor must be > 0");
  });

  it("rejects negative delay days", () => {
    const result = validateScenario({
      name: "time travel",
      operators: [{ op: "delivery_shift", activity_ids: ["A120"], days: -3 }],
    });
    expect(result.ok).toBe(false);
  });

  it("rejects unknown operators and bad dates", () => {
    expect(
      validateScenario({ name: "x", operators: [{ op: "warp" as never }] }).ok,
    ).toBe(false);
    expect(
      validateScenario({
        name: "w",
        operators: [{ op: "weather_days", dates: ["not-a-date"] }],
      }).ok,
    ).toBe(false);
  });

  it("requires a name", () => {
    expect(validateScenario({ name: "  ", operators: [] }).ok).toBe(false);
  });
});

describe("decision validation", () => {
  it("blocks reject without a reason", () => {
    const result = validateDecision({ adopt: false, reason: "   " });
    expect(result.ok).toBe(false);
    expect(result.errors[0]).toContain("reason is required");
  });

  it("allows adopt without a reason and reject with one", () => {
    expect(validateDecision({ adopt: true, reason: "" }).ok).toBe(true);
    expect(validateDecision({ adopt: false, reason: "crane conflict" }).ok).toBe(true);
  });
});

describe("form model", () => {
  it("disables submit while invalid and enables it when complete", () => {
    const model = new ScenarioFormModel();
    expect(model.submittable).toBe(false); // no name yet
    let html = renderForm(model);
    expect(html).toContain("<button type=\"submit\" disabled>");

    model.name = "drywall escalation";
    model.addOperator("price_multiplier");
    expect(model.submittable).toBe(false); // factor has no target yet
    (model.operators[0] as { divisions: string[] }).divisions = ["09"];
    expect(model.submittable).toBe(true);
    html = renderForm(model);
    expect(html).toContain("<button type=\"submit\" >");
  });

  it("operator add/remove round-trips", () => {
    const model = new ScenarioFormModel();
    model.addOperator("weather_days");
    model.addOperator("delivery_shift");
    expect(model.operators.length).toBe(2);
    model.removeOperator(0);
    expect(model.operators.length).toBe(1);
    expect(model.operators[0].op).toBe("delivery_shift");
  });
});
