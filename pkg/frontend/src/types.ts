/** Payload shapes returned by the sitetwin service. */

export interface Seeded {
  seed: number;
  input_hash: string;
}

export interface ForecastRow {
  week: number;
  p50: number;
  p80: number;
  actual: number | null;
  note: string;
}

export interface ForecastPayload extends Seeded {
  rows: ForecastRow[];
  convergence_week: number | null;
  band_nonincreasing: boolean;
}

export interface BuffersPayload extends Seeded {
  columns?: string[];
  rows: (number | string)[][];
  project_used_pct: number;
  feeding_used_pct: number;
}

export interface EvPayload extends Seeded {
  columns: string[];
  rows: (number | string | null)[][];
  annotations: string[];
}

export interface CriticalityPayload extends Seeded {
  columns: string[];
  rows: (number | string)[][];
  p50: number;
  p80: number;
  n_trials: number;
}

export interface RankRow {
  scenario: string;
  dfinish_p50: number;
  dfinish_p80: number;
  dcost_p50_kusd: number;
  dcost_p80_kusd: number;
}

export interface RankPayload extends Seeded {
  rows: RankRow[];
  tornado: [string, number][];
  n_trials: number;
}

export interface LevelerRow {
  week: number;
  action_id: string;
  summary: string;
  predicted_delta_objective: number;
  predicted_delta_overtime_hours: number;
  adopted: "pending" | "yes" | "no";
  rejection_reason: string;
}

export interface LevelerLogPayload extends Seeded {
  rows: LevelerRow[];
  adoption_rate: number;
}

export interface ScenarioResultPayload extends Seeded {
  name: string;
  dfinish_p50: number;
  dfinish_p80: number;
  dcost_p50_kusd: number;
  dcost_p80_kusd: number;
  affected_divisions: string[];
  assumed_cost_spread: boolean;
  n_trials: number;
}

export type OperatorKind =
  | "price_multiplier"
  | "delivery_shift"
  | "weather_days"
  | "capacity_change"
  | "scope_change"
  | "resequence";

export interface OperatorDoc {
  op: OperatorKind;
  [key: string]: unknown;
}

export interface ScenarioDoc {
  name: string;
  operators: OperatorDoc[];
  notes?: string;
  trials?: number;
  seed?: number;
}

export interface DecisionDoc {
  adopt: boolean;
  reason: string;
}
