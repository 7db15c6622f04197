/**
 * The deliberately small set of computations duplicated from the backend:
 * anchor-normalized cost aggregation, Pareto dominance, the efficiency cap
 * check (its outcome depends on the weights being explored), and the
 * significance + Pareto decision rules. Everything else is read verbatim
 * from the bundle. Golden-bundle tests pin these to the backend outputs.
 */

import type {
  Bundle,
  CapState,
  CriterionJson,
  OutcomeLabelName,
  SystemJson,
  WhatIfState,
} from './types.js';

export interface SystemView {
  id: string;
  effectiveness: number;
  aggregatedCost: number;
  contributions: Record<string, number>;
  capped: boolean;
  onFrontier: boolean;
  dominatedBy: string | null;
  utility: number;
}

export interface CriterionView {
  id: string;
  kind: 'primary' | 'secondary';
  label: OutcomeLabelName;
  note: string;
  recomputed: boolean;
}

export interface VerdictView {
  candidate: string;
  decision: 'deploy' | 'reject';
  reasons: string[];
}

export function aggregatedCost(
  costs: Record<string, number>,
  anchorCosts: Record<string, number>,
  weights: Record<string, number>,
): { value: number; contributions: Record<string, number> } {
  const contributions: Record<string, number> = {};
  let value = 0;
  for (const factor of Object.keys(weights).sort()) {
    const w = weights[factor];
    if (w === 0) continue;
    if (!(factor in costs) || !(factor in anchorCosts)) {
      throw new Error(`missing cost factor ${factor}`);
    }
    const c = (costs[factor] / anchorCosts[factor]) * w;
    contributions[factor] = c;
    value += c;
  }
  return { value, contributions };
}

/** Weak dominance with at least one strict improvement on (eff up, cost down). */
export function dominates(
  a: { effectiveness: number; aggregatedCost: number },
  b: { effectiveness: number; aggregatedCost: number },
): boolean {
  if (a.effectiveness < b.effectiveness || a.aggregatedCost > b.aggregatedCost) return false;
  return a.effectiveness > b.effectiveness || a.aggregatedCost < b.aggregatedCost;
}

export function frontierOf<T extends { effectiveness: number; aggregatedCost: number }>(
  points: T[],
): { frontier: T[]; dominatedBy: Map<T, T> } {
  const frontier: T[] = [];
  const dominatedBy = new Map<T, T>();
  for (const p of points) {
    const witness = points.find((q) => q !== p && dominates(q, p));
    if (witness === undefined) frontier.push(p);
    else dominatedBy.set(p, witness);
  }
  return { frontier, dominatedBy };
}

function efficiencyOutcome(
  costB: number,
  costA: number,
  factorCap: number | null | undefined,
  marginCap: number | null | undefined,
): { label: OutcomeLabelName; note: string } {
  if (factorCap !== null && factorCap !== undefined) {
    if (costB > factorCap * costA) return { label: 'loss', note: `cost ${fmt(costB)} > ${fmt(factorCap)} x ${fmt(costA)}` };
    if (costA > factorCap * costB) return { label: 'win', note: `cost ${fmt(costB)} beats the inverted cap` };
    return { label: 'tie', note: `cost ${fmt(costB)} within ${fmt(factorCap)} x ${fmt(costA)}` };
  }
  const d = marginCap ?? 0;
  if (costB - costA > d) return { label: 'loss', note: `cost exceeds anchor by more than ${fmt(d)}` };
  if (costA - costB > d) return { label: 'win', note: `cost undercuts anchor by more than ${fmt(d)}` };
  return { label: 'tie', note: `cost difference within ${fmt(d)}` };
}

const fmt = (x: number) => (Number.isInteger(x) ? String(x) : x.toPrecision(6).replace(/\.?0+$/, ''));

/** Criterion outcomes under the explored weights: only aggregated-cost
 * efficiency checks change; every other record is bundle truth. */
export function criteriaUnder(
  bundle: Bundle,
  candidate: string,
  acBySystem: Record<string, number>,
): CriterionView[] {
  return bundle.criteria
    .filter((c: CriterionJson) => c.candidate === candidate)
    .map((c) => {
      if (c.evidence.type === 'efficiency' && (c.evidence.target ?? 'aggregated') === 'aggregated') {
        const out = efficiencyOutcome(
          acBySystem[candidate],
          acBySystem[bundle.anchor],
          c.evidence.factor_cap as number | null | undefined,
          c.evidence.margin_cap as number | null | undefined,
        );
        return { id: c.id, kind: c.kind, label: out.label, note: out.note, recomputed: true };
      }
      return { id: c.id, kind: c.kind, label: c.outcome.label, note: c.outcome.note, recomputed: false };
    });
}

export function significanceRule(criteria: CriterionView[]): { passed: boolean; reasons: string[] } {
  const losses = criteria.filter((c) => c.label === 'loss');
  const primaryWins = criteria.filter((c) => c.kind === 'primary' && c.label === 'win');
  const reasons: string[] = [];
  for (const l of losses) reasons.push(`${l.id} (${l.kind}) is a loss: ${l.note}`);
  if (primaryWins.length === 0) reasons.push('no primary criterion shows a win');
  const passed = primaryWins.length > 0 && losses.length === 0;
  return {
    passed,
    reasons: passed
      ? [...primaryWins.map((w) => `primary win on ${w.id}`), 'no losses on any criterion']
      : reasons,
  };
}

export function capValue(cap: CapState, weights: Record<string, number>): number | null {
  if (cap.mode === 'none') return null;
  if (cap.mode === 'anchor') return Object.values(weights).reduce((a, b) => a + b, 0);
  return cap.value;
}

export interface ViewModel {
  systems: SystemView[];
  chosen: string;
  criteria: Map<string, CriterionView[]>;
  verdicts: VerdictView[];
  capValue: number | null;
}

/** Pure recomputation of the dashboard state; same inputs, same view. */
export function recomputeView(bundle: Bundle, state: WhatIfState): ViewModel {
  const anchorRow = bundle.systems.find((s) => s.system_id === bundle.anchor);
  if (anchorRow === undefined) throw new Error(`anchor ${bundle.anchor} missing from bundle`);

  const acBySystem: Record<string, number> = {};
  const base = bundle.systems.map((s: SystemJson) => {
    const ac = aggregatedCost(s.costs, anchorRow.costs, state.weights);
    acBySystem[s.system_id] = ac.value;
    return {
      id: s.system_id,
      effectiveness: s.effectiveness,
      aggregatedCost: ac.value,
      contributions: ac.contributions,
      utility: s.effectiveness - state.lambda * ac.value,
    };
  });

  const cap = capValue(state.cap, state.weights);
  const within = cap === null ? base : base.filter((p) => p.aggregatedCost <= cap);
  const ruleBasis = within.length > 0 ? within : base.filter((p) => p.id === bundle.incumbent);
  const { frontier: displayFrontier, dominatedBy } = frontierOf(base);
  const { frontier: ruleFrontier } = frontierOf(ruleBasis);

  const ranked = [...ruleBasis].sort(
    (a, b) => b.utility - a.utility || a.aggregatedCost - b.aggregatedCost || a.id.localeCompare(b.id),
  );
  const chosen = ranked.length > 0 ? ranked[0].id : bundle.incumbent;
  const chosenOnFrontier = ruleFrontier.some((p) => p.id === chosen);

  const criteria = new Map<string, CriterionView[]>();
  const verdicts: VerdictView[] = [];
  for (const candidate of bundle.candidates) {
    const records = criteriaUnder(bundle, candidate, acBySystem);
    criteria.set(candidate, records);
    const sig = significanceRule(records);
    const isChosen = chosen === candidate;
    if (sig.passed && chosenOnFrontier && isChosen) {
      verdicts.push({ candidate, decision: 'deploy', reasons: [...sig.reasons, `${chosen} is Pareto optimal`] });
    } else {
      const reasons: string[] = [];
      if (!sig.passed) reasons.push(...sig.reasons);
      if (!isChosen) reasons.push(`decision line selects ${chosen}, not ${candidate}`);
      if (!chosenOnFrontier) reasons.push(`${chosen} is dominated`);
      verdicts.push({ candidate, decision: 'reject', reasons });
    }
  }

  const frontierIds = new Set(displayFrontier.map((p) => p.id));
  const systems: SystemView[] = base.map((p) => ({
    id: p.id,
    effectiveness: p.effectiveness,
    aggregatedCost: p.aggregatedCost,
    contributions: p.contributions,
    capped: cap !== null && p.aggregatedCost > cap,
    onFrontier: frontierIds.has(p.id),
    dominatedBy: (() => {
      const w = dominatedBy.get(p);
      return w === undefined ? null : w.id;
    })(),
    utility: p.utility,
  }));

  return { systems, chosen, criteria, verdicts, capValue: cap };
}

/** Serializable fragment reproducing this state through `decide --scenario`. */
export function exportScenario(state: WhatIfState): Record<string, unknown> {
  const fragment: Record<string, unknown> = {
    schema_version: 1,
    weights: state.weights,
    lambda: state.lambda,
  };
  if (state.cap.mode !== 'none') {
    fragment.cost_cap =
      state.cap.mode === 'anchor'
        ? { mode: 'anchor' }
        : { mode: 'absolute', value: state.cap.value, on: 'aggregated_cost' };
  }
  return fragment;
}

export function initialState(bundle: Bundle): WhatIfState {
  const cap: CapState =
    bundle.cost_cap.mode === 'none'
      ? { mode: 'none' }
      : bundle.cost_cap.mode === 'anchor'
        ? { mode: 'anchor' }
        : { mode: 'absolute', value: bundle.cost_cap.value ?? 1 };
  return {
    weights: { ...bundle.weights },
    lambda: bundle.decision_line.lambda,
    cap,
    metric: bundle.metric,
    highlighted: null,
  };
}
