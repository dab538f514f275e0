// Thin typed client over the estimation service. Every number shown in the
// UI comes from these endpoints; the client performs no metric computation.

export interface MetricsRecord {
  m_c: number;
  m_a: number;
  m_l: number;
  m_s: number;
}

export type MaybeMetrics = { [K in keyof MetricsRecord]: number | null };

export interface UploadResult {
  graph_id: string;
  n: number;
  m: number;
}

export interface SimilarResult {
  graph_id: string;
  similarity: number;
  rank: number;
  layout_url: string;
  metrics: MetricsRecord | null;
}

export interface LayoutPayload {
  graph_id: string;
  method: string;
  positions: [number, number][];
  edges: [number, number][];
}

export interface LayoutAccepted {
  status: 'ready' | 'pending';
  layout_id?: string;
  job_id?: string;
}

export interface JobStatus {
  job_id: string;
  status: 'pending' | 'ready' | 'failed';
  layout_id: string | null;
  error: string | null;
}

export class ApiError extends Error {
  constructor(public status: number, public code: string, message: string) {
    super(message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, init);
  const body = await response.json();
  if (!response.ok) {
    throw new ApiError(response.status, body.error ?? 'error', body.message ?? 'request failed');
  }
  return body as T;
}

export const api = {
  uploadGraph(edgeList: string): Promise<UploadResult> {
    return request('/api/graphs', {
      method: 'POST',
      headers: { 'content-type': 'text/plain' },
      body: edgeList,
    });
  },
  methods(): Promise<{ methods: string[] }> {
    return request('/api/methods');
  },
  similar(graphId: string, method: string, k: number): Promise<SimilarResult[]> {
    return request(`/api/graphs/${graphId}/similar?method=${encodeURIComponent(method)}&k=${k}`);
  },
  estimates(graphId: string, method: string): Promise<MetricsRecord> {
    return request(`/api/graphs/${graphId}/estimates?method=${encodeURIComponent(method)}`);
  },
  computeLayout(graphId: string, method: string, seed = 0): Promise<LayoutAccepted> {
    return request(
      `/api/graphs/${graphId}/layouts?method=${encodeURIComponent(method)}&seed=${seed}`,
      { method: 'POST' },
    );
  },
  job(jobId: string): Promise<JobStatus> {
    return request(`/api/jobs/${jobId}`);
  },
  layout(layoutId: string): Promise<LayoutPayload> {
    return request(`/api/layouts/${layoutId}`);
  },
  layoutMetrics(layoutId: string): Promise<MaybeMetrics> {
    return request(`/api/layouts/${layoutId}/metrics`);
  },
  corpusLayout(layoutUrl: string): Promise<LayoutPayload> {
    return request(layoutUrl);
  },
};
