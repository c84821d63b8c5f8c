// Thin fetch client for the review service. Every method maps to one
// documented endpoint; no state is kept here.

import type {
  Candidate,
  DecisionRequest,
  DecisionResponse,
  PairDetail,
  QueueStats,
} from './types';

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
    this.name = 'ApiError';
  }
}

async function readDetail(response: Response): Promise<string> {
  try {
    const body = await response.json();
    if (body && typeof body.detail === 'string') return body.detail;
  } catch {
    // non-JSON error body; fall through to the status line
  }
  return response.statusText || `status ${response.status}`;
}

export class ReviewApi {
  constructor(
    readonly baseUrl: string,
    readonly reviewer: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init: RequestInit = {}): Promise<T> {
    const headers = {
      'X-Reviewer': this.reviewer,
      ...(init.body ? { 'Content-Type': 'application/json' } : {}),
      ...(init.headers ?? {}),
    };
    const response = await this.fetchFn(this.baseUrl + path, { ...init, headers });
    if (!response.ok) {
      throw new ApiError(response.status, await readDetail(response));
    }
    return (await response.json()) as T;
  }

  async health(): Promise<boolean> {
    const body = await this.request<{ status: string }>('/healthz');
    return body.status === 'ok';
  }

  /** Lease the oldest pending candidate; null when the queue is drained. */
  async nextCandidate(): Promise<Candidate | null> {
    const body = await this.request<{ candidate: Candidate | null }>('/queue/next');
    return body.candidate;
  }

  async submitDecision(decision: DecisionRequest): Promise<DecisionResponse> {
    return this.request<DecisionResponse>('/decision', {
      method: 'POST',
      body: JSON.stringify(decision),
    });
  }

  async stats(): Promise<QueueStats> {
    return this.request<QueueStats>('/stats');
  }

  async pairDetail(pairId: string): Promise<PairDetail> {
    return this.request<PairDetail>(`/pair/${encodeURIComponent(pairId)}`);
  }

  progImageUrl(pairId: string): string {
    return `${this.baseUrl}/pair/${encodeURIComponent(pairId)}/prog.png`;
  }

  candidateImageUrl(pairId: string): string {
    return `${this.baseUrl}/pair/${encodeURIComponent(pairId)}/candidate.png`;
  }
}
