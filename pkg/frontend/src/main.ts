// Page wiring: upload a graph, build one preview card per layout method,
// and close the loop by computing actual layouts on demand.

import { api, ApiError, type LayoutPayload, type MetricsRecord, type SimilarResult } from './api.js';
import { type CardState, renderCard } from './cards.js';
import { InFlightGuard, pollJob } from './poll.js';

const PREVIEW_COUNT = 3;
const POLL_INTERVAL_MS = 1000;

interface Session {
  graphId: string;
  cards: Map<string, CardState>;
}

const guard = new InFlightGuard();
let session: Session | null = null;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function showError(message: string): void {
  const box = el<HTMLElement>('error-box');
  box.textContent = message;
  box.hidden = message.length === 0;
}

async function fetchCard(graphId: string, method: string): Promise<CardState> {
  const [similars, estimates] = await Promise.all([
    api.similar(graphId, method, PREVIEW_COUNT),
    api.estimates(graphId, method),
  ]);
  const previews: LayoutPayload[] = [];
  for (const similar of [...similars].sort((a, b) => a.rank - b.rank)) {
    previews.push(await api.corpusLayout(similar.layout_url));
  }
  return {
    method,
    similars,
    previews,
    estimates,
    actualStatus: 'none',
  };
}

function redraw(): void {
  if (!session) return;
  const host = el<HTMLElement>('cards');
  host.replaceChildren();
  for (const state of session.cards.values()) {
    const card = renderCard(state);
    const button = card.querySelector<HTMLButtonElement>('button.compute-actual');
    if (button) {
      const method = state.method;
      button.addEventListener('click', () => void computeActual(method));
    }
    host.appendChild(card);
  }
}

async function computeActual(method: string): Promise<void> {
  if (!session) return;
  const current = session.cards.get(method);
  if (!current || current.actualStatus === 'pending') return;
  const graphId = session.graphId;
  await guard.run(method, async () => {
    const state = session!.cards.get(method)!;
    state.actualStatus = 'pending';
    redraw();
    try {
      const accepted = await api.computeLayout(graphId, method);
      let layoutId = accepted.layout_id ?? null;
      if (accepted.status === 'pending' && accepted.job_id) {
        const job = await pollJob(accepted.job_id, (id) => api.job(id), POLL_INTERVAL_MS);
        if (job.status === 'failed') {
          throw new Error(job.error ?? 'layout job failed');
        }
        layoutId = job.layout_id;
      }
      if (!layoutId) throw new Error('no layout id returned');
      state.actualLayout = await api.layout(layoutId);
      state.actualMetrics = await api.layoutMetrics(layoutId);
      state.actualStatus = 'ready';
    } catch (error) {
      state.actualStatus = 'failed';
      state.error = error instanceof Error ? error.message : String(error);
    }
    redraw();
  });
}

async function uploadAndExplore(text: string): Promise<void> {
  showError('');
  try {
    const uploaded = await api.uploadGraph(text);
    el<HTMLElement>('graph-info').textContent =
      `graph ${uploaded.graph_id}: ${uploaded.n} vertices, ${uploaded.m} edges`;
    const { methods } = await api.methods();
    const cards = new Map<string, CardState>();
    for (const method of methods) {
      cards.set(method, await fetchCard(uploaded.graph_id, method));
    }
    session = { graphId: uploaded.graph_id, cards };
    redraw();
  } catch (error) {
    if (error instanceof ApiError) {
      showError(`${error.code}: ${error.message}`);
    } else {
      showError(String(error));
    }
  }
}

export function init(): void {
  const input = el<HTMLInputElement>('graph-file');
  const button = el<HTMLButtonElement>('upload-button');
  button.addEventListener('click', async () => {
    const file = input.files?.[0];
    if (!file) {
      showError('choose an edge-list file first');
      return;
    }
    await uploadAndExplore(await file.text());
  });
}

if (typeof document !== 'undefined' && document.getElementById('upload-button')) {
  init();
}
