// Preview cards: one per layout method, combining similar-graph previews,
// estimated metrics, and (once computed) the actual layout with deltas.

import type { LayoutPayload, MaybeMetrics, MetricsRecord, SimilarResult } from './api.js';
import { renderLayout } from './render.js';

export type ActualStatus = 'none' | 'pending' | 'ready' | 'failed';

export interface CardState {
  method: string;
  similars: SimilarResult[];
  previews: LayoutPayload[];
  estimates: MetricsRecord;
  actualStatus: ActualStatus;
  actualLayout?: LayoutPayload;
  actualMetrics?: MaybeMetrics;
  error?: string;
}

export const METRIC_KEYS: (keyof MetricsRecord)[] = ['m_c', 'm_a', 'm_l', 'm_s'];
const METRIC_LABELS: Record<keyof MetricsRecord, string> = {
  m_c: 'crosslessness',
  m_a: 'min angle',
  m_l: 'edge length',
  m_s: 'shape',
};

const PREVIEW_VIEWPORT = { width: 160, height: 120 };
const ACTUAL_VIEWPORT = { width: 240, height: 180 };

export function formatMetric(value: number): string {
  return value.toFixed(3);
}

function clamp01(value: number): number {
  return Math.min(1, Math.max(0, value));
}

function metricBar(key: keyof MetricsRecord, value: number): HTMLElement {
  const row = document.createElement('div');
  row.className = 'metric-row';
  const label = document.createElement('span');
  label.className = 'metric-label';
  label.textContent = METRIC_LABELS[key];
  const bar = document.createElement('div');
  bar.className = 'metric-bar';
  const fill = document.createElement('div');
  fill.className = 'metric-fill';
  fill.style.width = `${(clamp01(value) * 100).toFixed(1)}%`;
  bar.appendChild(fill);
  const num = document.createElement('span');
  num.className = 'metric-value';
  num.textContent = formatMetric(value);
  row.append(label, bar, num);
  return row;
}

function deltaRow(key: keyof MetricsRecord, estimate: number, actual: number | null): HTMLElement {
  const row = document.createElement('div');
  row.className = 'delta-row';
  const label = document.createElement('span');
  label.className = 'metric-label';
  label.textContent = METRIC_LABELS[key];
  const text = document.createElement('span');
  text.className = 'delta-value';
  if (actual === null) {
    text.textContent = `est ${formatMetric(estimate)} / actual n/a`;
  } else {
    const delta = actual - estimate;
    const sign = delta >= 0 ? '+' : '';
    text.textContent =
      `est ${formatMetric(estimate)} / actual ${formatMetric(actual)} (${sign}${formatMetric(delta)})`;
  }
  row.append(label, text);
  return row;
}

export function renderCard(state: CardState): HTMLElement {
  const card = document.createElement('section');
  card.className = 'card';
  card.dataset.method = state.method;
  card.dataset.status = state.actualStatus;

  const title = document.createElement('h2');
  title.textContent = state.method;
  card.appendChild(title);

  const previews = document.createElement('div');
  previews.className = 'previews';
  const ordered = [...state.similars].sort((a, b) => a.rank - b.rank);
  ordered.forEach((similar, index) => {
    const box = document.createElement('figure');
    box.className = 'preview';
    const payload = state.previews[index];
    if (payload) {
      box.appendChild(renderLayout(payload.positions, payload.edges, PREVIEW_VIEWPORT));
    }
    const caption = document.createElement('figcaption');
    caption.textContent = `#${similar.rank} ${similar.graph_id} (${similar.similarity.toFixed(3)})`;
    box.appendChild(caption);
    previews.appendChild(box);
  });
  card.appendChild(previews);

  const estimateBlock = document.createElement('div');
  estimateBlock.className = 'estimates';
  for (const key of METRIC_KEYS) {
    estimateBlock.appendChild(metricBar(key, state.estimates[key]));
  }
  card.appendChild(estimateBlock);

  const actual = document.createElement('div');
  actual.className = 'actual';
  actual.dataset.status = state.actualStatus;
  if (state.actualStatus === 'none') {
    const button = document.createElement('button');
    button.className = 'compute-actual';
    button.textContent = 'compute actual layout';
    actual.appendChild(button);
  } else if (state.actualStatus === 'pending') {
    const note = document.createElement('p');
    note.className = 'pending-note';
    note.textContent = 'computing layout…';
    actual.appendChild(note);
  } else if (state.actualStatus === 'failed') {
    const note = document.createElement('p');
    note.className = 'error-note';
    note.textContent = state.error ?? 'layout failed';
    actual.appendChild(note);
  } else if (state.actualLayout) {
    actual.appendChild(
      renderLayout(state.actualLayout.positions, state.actualLayout.edges, ACTUAL_VIEWPORT),
    );
    const deltas = document.createElement('div');
    deltas.className = 'deltas';
    for (const key of METRIC_KEYS) {
      const actualValue = state.actualMetrics ? state.actualMetrics[key] : null;
      deltas.appendChild(deltaRow(key, state.estimates[key], actualValue));
    }
    actual.appendChild(deltas);
  }
  card.appendChild(actual);
  return card;
}
