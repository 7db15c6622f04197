/** Decision-bundle document types (schema_version 1). */

export type OutcomeLabelName = 'win' | 'tie' | 'loss';

export interface OutcomeJson {
  label: OutcomeLabelName;
  symbol: string;
  note: string;
}

export interface AggregatedCostJson {
  value: number;
  anchor: string;
  contributions: Record<string, number>;
}

export interface SystemJson {
  system_id: string;
  effectiveness: number;
  evaluated_queries: number;
  skipped_queries: number;
  costs: Record<string, number>;
  cost_units: Record<string, string>;
  aggregated_cost: AggregatedCostJson;
}

export interface CriterionJson {
  candidate: string;
  id: string;
  kind: 'primary' | 'secondary';
  outcome: OutcomeJson;
  evidence: {
    type: string;
    target?: string;
    cost_candidate?: number;
    cost_anchor?: number;
    factor_cap?: number | null;
    margin_cap?: number | null;
    [key: string]: unknown;
  };
}

export interface CostCapJson {
  mode: 'none' | 'anchor' | 'absolute';
  value: number | null;
  on: string;
}

export interface ParetoJson {
  objectives: { key: string; direction: 'max' | 'min' }[];
  frontier: string[];
  dominated: Record<string, string>;
}

export interface VerdictJson {
  candidate: string;
  decision: 'deploy' | 'reject';
  reasons: string[];
}

export interface Bundle {
  schema_version: number;
  incumbent: string;
  anchor: string;
  candidates: string[];
  metric: string;
  significance: { alpha: number; practical_margin: number; min_slice_size: number };
  weights: Record<string, number>;
  weight_presets: Record<string, Record<string, number>>;
  decision_line: { lambda: number };
  cost_cap: CostCapJson;
  chosen_system: string;
  utility_ranking: [string, number][];
  systems: SystemJson[];
  per_query_scores: Record<string, Record<string, number>>;
  skipped: Record<string, string[]>;
  criteria: CriterionJson[];
  pareto: ParetoJson;
  pareto_after_cap: ParetoJson;
  capped_out: string[];
  verdicts: VerdictJson[];
  qualitative_notes: Record<string, string>;
}

export type CapState =
  | { mode: 'none' }
  | { mode: 'anchor' }
  | { mode: 'absolute'; value: number };

/** Everything the dashboard lets the user vary. */
export interface WhatIfState {
  weights: Record<string, number>;
  lambda: number;
  cap: CapState;
  metric: string;
  highlighted: string | null;
}

export const BUNDLE_SCHEMA_VERSION = 1;
