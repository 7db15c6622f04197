/**
 * What-if dashboard: load a decision bundle (served at /bundle.json or via
 * file picker), move cost weights / decision-line slope / cost cap, and
 * watch the scatter, criterion panel, and verdict update live. The current
 * exploration exports as a scenario fragment replayable by the CLI.
 */

import {
  exportScenario,
  initialState,
  recomputeView,
  type SystemView,
  type ViewModel,
} from './model.js';
import { BUNDLE_SCHEMA_VERSION, type Bundle, type WhatIfState } from './types.js';

const SVG_NS = 'http://www.w3.org/2000/svg';
const PLOT_W = 560;
const PLOT_H = 380;
const MARGIN = { left: 54, right: 16, top: 14, bottom: 40 };

let bundle: Bundle | null = null;
let state: WhatIfState | null = null;

const $ = <T extends HTMLElement>(sel: string): T => {
  const el = document.querySelector(sel);
  if (el === null) throw new Error(`missing element ${sel}`);
  return el as T;
};

function blockingBanner(message: string): void {
  document.body.innerHTML = '';
  const banner = document.createElement('div');
  banner.className = 'blocking-banner';
  banner.textContent = message;
  document.body.appendChild(banner);
}

async function tryFetchBundle(): Promise<void> {
  try {
    const response = await fetch('/bundle.json');
    if (!response.ok) return;
    loadBundle(await response.json());
  } catch {
    /* no server-side bundle; the file picker still works */
  }
}

function loadBundle(doc: unknown): void {
  const candidate = doc as Bundle;
  if (candidate.schema_version !== BUNDLE_SCHEMA_VERSION) {
    blockingBanner(
      `Bundle schema_version ${String(candidate.schema_version)} is not supported ` +
        `(this viewer reads version ${BUNDLE_SCHEMA_VERSION}). Nothing was rendered.`,
    );
    return;
  }
  bundle = candidate;
  state = initialState(candidate);
  $('#workspace').classList.remove('hidden');
  $('#loader-hint').classList.add('hidden');
  buildControls();
  render();
}

function buildControls(): void {
  if (bundle === null || state === null) return;
  const b = bundle;
  const s = state;

  const presets = $('#presets');
  presets.innerHTML = '';
  for (const [name, weights] of Object.entries(b.weight_presets)) {
    const button = document.createElement('button');
    button.textContent = name;
    button.addEventListener('click', () => {
      s.weights = { ...weights };
      buildControls();
      render();
    });
    presets.appendChild(button);
  }

  const sliders = $('#weight-sliders');
  sliders.innerHTML = '';
  for (const factor of Object.keys(s.weights).sort()) {
    const row = document.createElement('label');
    row.className = 'slider-row';
    const caption = document.createElement('span');
    caption.textContent = factor;
    const value = document.createElement('output');
    value.textContent = String(s.weights[factor]);
    const input = document.createElement('input');
    input.type = 'range';
    input.min = '0';
    input.max = '20';
    input.step = '0.1';
    input.value = String(s.weights[factor]);
    input.addEventListener('input', () => {
      s.weights[factor] = Number(input.value);
      value.textContent = input.value;
      render();
    });
    row.append(caption, input, value);
    sliders.appendChild(row);
  }

  const lambda = $<HTMLInputElement>('#lambda');
  lambda.value = String(s.lambda);
  lambda.oninput = () => {
    s.lambda = Number(lambda.value) >= 0 ? Number(lambda.value) : 0;
    render();
  };

  const capMode = $<HTMLSelectElement>('#cap-mode');
  const capInput = $<HTMLInputElement>('#cap-value');
  capMode.value = s.cap.mode;
  capInput.value = s.cap.mode === 'absolute' ? String(s.cap.value) : '';
  capInput.disabled = s.cap.mode !== 'absolute';
  capMode.onchange = () => {
    if (capMode.value === 'absolute') {
      const fallback = Number(capInput.value) > 0 ? Number(capInput.value) : 12;
      s.cap = { mode: 'absolute', value: fallback };
      capInput.value = String(fallback);
      capInput.disabled = false;
    } else {
      s.cap = { mode: capMode.value as 'none' | 'anchor' };
      capInput.disabled = true;
    }
    render();
  };
  capInput.oninput = () => {
    if (s.cap.mode === 'absolute' && Number(capInput.value) > 0) {
      s.cap = { mode: 'absolute', value: Number(capInput.value) };
      render();
    }
  };

  $('#metric-name').textContent = b.metric;
  $<HTMLButtonElement>('#export').onclick = downloadScenario;
}

function downloadScenario(): void {
  if (state === null) return;
  const fragment = exportScenario(state);
  const blob = new Blob([JSON.stringify(fragment, null, 2) + '\n'], { type: 'application/json' });
  const link = document.createElement('a');
  link.href = URL.createObjectURL(blob);
  link.download = 'scenario.json';
  link.click();
  URL.revokeObjectURL(link.href);
}

function svgEl<K extends keyof SVGElementTagNameMap>(tag: K, attrs: Record<string, string>): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) el.setAttribute(k, v);
  return el;
}

function renderScatter(view: ViewModel): void {
  if (bundle === null || state === null) return;
  const svg = $('#scatter') as unknown as SVGSVGElement;
  svg.innerHTML = '';
  svg.setAttribute('viewBox', `0 0 ${PLOT_W} ${PLOT_H}`);

  const xs = view.systems.map((p) => p.aggregatedCost);
  const ys = view.systems.map((p) => p.effectiveness);
  const xMax = Math.max(...xs) * 1.12 + 1e-9;
  const xMin = 0;
  const yMax = Math.min(1.02, Math.max(...ys) * 1.1 + 0.02);
  const yMin = Math.max(0, Math.min(...ys) - 0.08);
  const sx = (x: number) =>
    MARGIN.left + ((x - xMin) / (xMax - xMin)) * (PLOT_W - MARGIN.left - MARGIN.right);
  const sy = (y: number) =>
    PLOT_H - MARGIN.bottom - ((y - yMin) / (yMax - yMin)) * (PLOT_H - MARGIN.top - MARGIN.bottom);

  // axes
  svg.append(
    svgEl('line', { x1: String(MARGIN.left), y1: String(PLOT_H - MARGIN.bottom), x2: String(PLOT_W - MARGIN.right), y2: String(PLOT_H - MARGIN.bottom), class: 'axis' }),
    svgEl('line', { x1: String(MARGIN.left), y1: String(MARGIN.top), x2: String(MARGIN.left), y2: String(PLOT_H - MARGIN.bottom), class: 'axis' }),
  );
  const xLabel = svgEl('text', { x: String(PLOT_W / 2), y: String(PLOT_H - 6), class: 'axis-label' });
  xLabel.textContent = 'aggregated cost (anchor-normalized)';
  const yLabel = svgEl('text', { x: '14', y: String(PLOT_H / 2), class: 'axis-label', transform: `rotate(-90 14 ${PLOT_H / 2})` });
  yLabel.textContent = `effectiveness (${state.metric})`;
  svg.append(xLabel, yLabel);
  for (const t of [0, 0.25, 0.5, 0.75, 1]) {
    const x = xMin + t * (xMax - xMin);
    const tick = svgEl('text', { x: String(sx(x)), y: String(PLOT_H - MARGIN.bottom + 16), class: 'tick' });
    tick.textContent = x.toFixed(1);
    const yv = yMin + t * (yMax - yMin);
    const ytick = svgEl('text', { x: String(MARGIN.left - 8), y: String(sy(yv) + 4), class: 'tick tick-y' });
    ytick.textContent = yv.toFixed(2);
    svg.append(tick, ytick);
  }

  // cost-cap shading
  if (view.capValue !== null && view.capValue < xMax) {
    svg.append(
      svgEl('rect', {
        x: String(sx(view.capValue)),
        y: String(MARGIN.top),
        width: String(Math.max(0, sx(xMax) - sx(view.capValue))),
        height: String(PLOT_H - MARGIN.top - MARGIN.bottom),
        class: 'cap-region',
      }),
    );
  }

  // frontier polyline (sorted by cost)
  const frontierPts = view.systems
    .filter((p) => p.onFrontier)
    .sort((a, b) => a.aggregatedCost - b.aggregatedCost);
  if (frontierPts.length > 1) {
    svg.append(
      svgEl('polyline', {
        points: frontierPts.map((p) => `${sx(p.aggregatedCost)},${sy(p.effectiveness)}`).join(' '),
        class: 'frontier-line',
      }),
    );
  }

  // decision line through the chosen system: eff = U_chosen + lambda * cost
  const chosen = view.systems.find((p) => p.id === view.chosen);
  if (chosen !== undefined && state.lambda > 0) {
    const u = chosen.utility;
    const y0 = u + state.lambda * xMin;
    const y1 = u + state.lambda * xMax;
    svg.append(
      svgEl('line', {
        x1: String(sx(xMin)), y1: String(sy(y0)), x2: String(sx(xMax)), y2: String(sy(y1)), class: 'decision-line',
      }),
    );
  }

  for (const p of view.systems) {
    const group = svgEl('g', { class: pointClass(p, view.chosen, state.highlighted) });
    const dot = svgEl('circle', { cx: String(sx(p.aggregatedCost)), cy: String(sy(p.effectiveness)), r: '7' });
    const name = svgEl('text', { x: String(sx(p.aggregatedCost) + 10), y: String(sy(p.effectiveness) + 4), class: 'point-label' });
    name.textContent = p.id;
    group.append(dot, name);
    group.addEventListener('click', () => {
      if (state !== null) {
        state.highlighted = state.highlighted === p.id ? null : p.id;
        render();
      }
    });
    svg.append(group);
  }
}

function pointClass(p: SystemView, chosen: string, highlighted: string | null): string {
  const classes = ['point'];
  if (p.capped) classes.push('capped');
  if (p.onFrontier) classes.push('frontier');
  if (p.id === chosen) classes.push('chosen');
  if (p.id === highlighted) classes.push('highlighted');
  return classes.join(' ');
}

function renderCriteria(view: ViewModel): void {
  if (bundle === null) return;
  const table = $('#criteria-body');
  table.innerHTML = '';
  for (const candidate of bundle.candidates) {
    for (const c of view.criteria.get(candidate) ?? []) {
      const row = document.createElement('tr');
      row.className = `outcome-${c.label}`;
      const symbol = c.label === 'win' ? '✓' : c.label === 'loss' ? '✗' : '≈';
      row.innerHTML =
        `<td>${c.id}</td><td>${c.kind}</td><td class="symbol">${symbol}</td>` +
        `<td>${c.note}${c.recomputed ? ' <em>(recomputed)</em>' : ''}</td>`;
      table.appendChild(row);
    }
  }
}

function renderSystems(view: ViewModel): void {
  if (bundle === null) return;
  const body = $('#systems-body');
  body.innerHTML = '';
  for (const p of view.systems) {
    const row = document.createElement('tr');
    if (p.capped) row.className = 'capped-row';
    const flags = [
      p.id === view.chosen ? 'chosen' : '',
      p.onFrontier ? 'frontier' : p.dominatedBy !== null ? `dominated by ${p.dominatedBy}` : '',
      p.capped ? 'over cap' : '',
    ]
      .filter(Boolean)
      .join(', ');
    row.innerHTML =
      `<td>${p.id}</td><td>${p.effectiveness.toFixed(4)}</td>` +
      `<td>${p.aggregatedCost.toFixed(3)}</td><td>${p.utility.toFixed(4)}</td><td>${flags}</td>`;
    body.appendChild(row);
  }
}

function renderVerdict(view: ViewModel): void {
  const banner = $('#verdict-banner');
  banner.innerHTML = '';
  for (const v of view.verdicts) {
    const block = document.createElement('div');
    block.className = `verdict ${v.decision}`;
    const head = document.createElement('strong');
    head.textContent = `${v.candidate}: ${v.decision.toUpperCase()}`;
    block.appendChild(head);
    const list = document.createElement('ul');
    for (const reason of v.reasons) {
      const item = document.createElement('li');
      item.textContent = reason;
      list.appendChild(item);
    }
    block.appendChild(list);
    banner.appendChild(block);
  }
}

function renderDrilldown(): void {
  if (bundle === null || state === null) return;
  const section = $('#drilldown');
  const target = state.highlighted;
  if (target === null || !(target in bundle.per_query_scores)) {
    section.classList.add('hidden');
    return;
  }
  section.classList.remove('hidden');
  $('#drilldown-title').textContent = `${target}: per-query ${bundle.metric} (read-only from bundle)`;
  const body = $('#drilldown-body');
  body.innerHTML = '';
  const scores = bundle.per_query_scores[target];
  const rows = Object.keys(scores)
    .sort((a, b) => scores[a] - scores[b])
    .slice(0, 25);
  for (const qid of rows) {
    const row = document.createElement('tr');
    row.innerHTML = `<td>${qid}</td><td>${scores[qid].toFixed(4)}</td>`;
    body.appendChild(row);
  }
}

function render(): void {
  if (bundle === null || state === null) return;
  const view = recomputeView(bundle, state);
  renderScatter(view);
  renderCriteria(view);
  renderSystems(view);
  renderVerdict(view);
  renderDrilldown();
  $('#notes').textContent = Object.entries(bundle.qualitative_notes)
    .map(([k, v]) => `${k}: ${v}`)
    .join('\n');
}

function wireFilePicker(): void {
  const picker = $<HTMLInputElement>('#bundle-file');
  picker.addEventListener('change', async () => {
    const file = picker.files?.[0];
    if (file === undefined) return;
    try {
      loadBundle(JSON.parse(await file.text()));
    } catch (err) {
      blockingBanner(`Could not parse bundle: ${String(err)}`);
    }
  });
}

wireFilePicker();
void tryFetchBundle();
