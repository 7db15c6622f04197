/**
 * Golden-bundle plumbing: every bundle used by the tests is produced by the
 * real CLI on the shipped fixtures, so the dashboard is pinned to the
 * backend through its public interface only.
 */

import { execFileSync } from 'node:child_process';
import { mkdirSync, writeFileSync, readFileSync, rmSync } from 'node:fs';
import { join, resolve, dirname } from 'node:path';
import { fileURLToPath } from 'node:url';

import type { Bundle } from '../src/types.js';

const HERE = dirname(fileURLToPath(import.meta.url));
export const REPO_ROOT = resolve(HERE, '..', '..');
const FIXTURES = join(REPO_ROOT, 'fixtures');
const SCRATCH = join(HERE, 'golden');

const PYTHON = process.env.PYTHON ?? 'python3';

export interface DecideResult {
  bundle: Bundle;
  exitCode: number;
}

let counter = 0;

/** Run `retdecide decide` on the fixture workload, optionally overlaying a
 * what-if scenario fragment; returns the emitted bundle and exit code. */
export function runDecide(config: string, scenario?: Record<string, unknown>): DecideResult {
  mkdirSync(SCRATCH, { recursive: true });
  const outPath = join(SCRATCH, `bundle-${counter}.json`);
  const args = [
    '-m',
    'retdecide.cli',
    'decide',
    '--config',
    join(FIXTURES, config),
    '--run',
    `bm25=${join(FIXTURES, 'bm25.run')}`,
    '--run',
    `tas=${join(FIXTURES, 'tas.run')}`,
    '--qrels',
    join(FIXTURES, 'qrels.txt'),
    '--costs',
    join(FIXTURES, 'costs.json'),
    '--queries',
    join(FIXTURES, 'queries.tsv'),
    '--collection',
    join(FIXTURES, 'collection.tsv'),
    '--out',
    outPath,
  ];
  if (scenario !== undefined) {
    const fragPath = join(SCRATCH, `fragment-${counter}.json`);
    writeFileSync(fragPath, JSON.stringify(scenario));
    args.push('--scenario', fragPath);
  }
  counter += 1;
  let exitCode = 0;
  try {
    execFileSync(PYTHON, args, { cwd: REPO_ROOT, stdio: ['ignore', 'ignore', 'pipe'] });
  } catch (err) {
    const status = (err as { status?: number }).status;
    if (status !== 1) throw err; // 1 = reject verdict, anything else is a real failure
    exitCode = status;
  }
  const bundle = JSON.parse(readFileSync(outPath, 'utf-8')) as Bundle;
  return { bundle, exitCode };
}

export function cleanScratch(): void {
  rmSync(SCRATCH, { recursive: true, force: true });
}

/** Deterministic PRNG so the randomized round-trip suite is reproducible. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}
