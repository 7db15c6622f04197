import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { exportScenario, recomputeView } from '../src/model.js';
import type { Bundle, WhatIfState } from '../src/types.js';
import { cleanScratch, mulberry32, runDecide } from './golden.js';

let baseline: Bundle;

beforeAll(() => {
  baseline = runDecide('scenario1.json').bundle;
}, 60_000);

afterAll(cleanScratch);

function randomState(rand: () => number): WhatIfState {
  const weights: Record<string, number> = {};
  for (const factor of Object.keys(baseline.weights)) {
    weights[factor] = Math.round(rand() * 120) / 10; // 0.0 .. 12.0
  }
  if (Object.values(weights).every((w) => w === 0)) weights.latency = 1;
  const capRoll = rand();
  const cap: WhatIfState['cap'] =
    capRoll < 0.4
      ? { mode: 'none' }
      : capRoll < 0.7
        ? { mode: 'anchor' }
        : { mode: 'absolute', value: Math.round((5 + rand() * 35) * 10) / 10 };
  return {
    weights,
    lambda: Math.round(rand() * 300) / 10000, // 0 .. 0.03
    cap,
    metric: baseline.metric,
    highlighted: null,
  };
}

describe('scenario round-trip through the CLI', () => {
  it('cmd_decide reproduces the dashboard verdict on 20 randomized states', () => {
    const rand = mulberry32(20240901);
    for (let round = 0; round < 20; round++) {
      const state = randomState(rand);
      const uiVerdicts = recomputeView(baseline, state).verdicts;
      const fragment = { schema_version: 1, ...exportScenario(state) };
      const { bundle, exitCode } = runDecide('scenario1.json', fragment);
      const cliVerdicts = bundle.verdicts;
      expect(
        uiVerdicts.map((v) => ({ candidate: v.candidate, decision: v.decision })),
        `state ${JSON.stringify(state)}`,
      ).toEqual(cliVerdicts.map((v) => ({ candidate: v.candidate, decision: v.decision })));
      expect(exitCode === 0).toBe(uiVerdicts.some((v) => v.decision === 'deploy'));
    }
  }, 180_000);
});
