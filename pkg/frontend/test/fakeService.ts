// In-memory stand-in for the review service, exposed as a fetch-compatible
// function. It mirrors the server's endpoint shapes, lease rules, and error
// mapping so controller tests exercise the real wire contract end to end.

import type { FetchLike } from '../src/api';
import type {
  Candidate,
  Criterion,
  DecisionRecord,
  DecisionRequest,
  QueueStats,
  TextRegion,
} from '../src/types';

const VALID_CRITERIA: readonly string[] = ['labels', 'topology', 'visual'];

interface Lease {
  reviewer: string;
  expires: number;
}

export interface RegenJob {
  pair_id: string;
  prompt_id: string;
  strength: number;
  attempt: number;
}

export interface SeedOptions {
  pairId: string;
  promptId?: string;
  strength?: number;
  attempt?: number;
  labelsPreserved?: boolean;
  missingLabels?: string[];
  regions?: TextRegion[];
}

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'Content-Type': 'application/json' },
  });
}

function errorResponse(status: number, detail: string): Response {
  return jsonResponse({ detail }, status);
}

export class FakeReviewService {
  candidates: Candidate[] = [];
  decisions = new Map<string, DecisionRecord>();
  regenJobs: RegenJob[] = [];
  leases = new Map<string, Lease>();
  requests: Array<{ method: string; path: string; headers: Record<string, string>; body?: unknown }> = [];
  down = false;

  private seq = 0;
  private clock = 1000;
  private leaseSeconds = 600;

  seed(options: SeedOptions): Candidate {
    this.seq += 1;
    const regions = options.regions ?? [
      { text: 'Nucleus', bbox: [40, 8, 60, 10] },
      { text: 'Membrane', bbox: [40, 24, 64, 10] },
    ];
    const candidate: Candidate = {
      pair_id: options.pairId,
      prompt_id: options.promptId ?? 'bio-001',
      prog_path: `/runs/${options.promptId ?? 'bio-001'}/prog.png`,
      candidate_path: `/store/images/${options.pairId}.png`,
      verification: {
        labels_preserved: options.labelsPreserved ?? true,
        missing_labels: options.missingLabels ?? [],
        topology_ok: true,
        min_iou: 1.0,
        visual: 'pending-human',
        overall: 'pending',
      },
      style: {
        prompt: 'clean educational illustration',
        strength: options.strength ?? 0.7,
        seed: 0,
      },
      attempt: options.attempt ?? 1,
      seq: this.seq,
      regions,
    };
    this.candidates.push(candidate);
    return candidate;
  }

  expireAllLeases(): void {
    this.clock += this.leaseSeconds + 1;
  }

  private status(pairId: string): 'pending' | 'accepted' | 'rejected' {
    const decision = this.decisions.get(pairId);
    if (!decision) return 'pending';
    return decision.verdict === 'accept' ? 'accepted' : 'rejected';
  }

  private stats(): QueueStats {
    let pending = 0;
    let accepted = 0;
    let rejected = 0;
    let firstDecided = 0;
    let firstAccepted = 0;
    for (const candidate of this.candidates) {
      const status = this.status(candidate.pair_id);
      if (status === 'pending') pending += 1;
      else if (status === 'accepted') accepted += 1;
      else rejected += 1;
      if (status !== 'pending' && candidate.attempt === 1) {
        firstDecided += 1;
        if (status === 'accepted') firstAccepted += 1;
      }
    }
    return {
      pending,
      accepted,
      rejected,
      first_attempt_pass_rate: firstDecided === 0 ? null : firstAccepted / firstDecided,
      regen_pending: this.regenJobs.length,
    };
  }

  private nextFor(reviewer: string): Candidate | null {
    const pending = this.candidates
      .filter((c) => this.status(c.pair_id) === 'pending')
      .sort((a, b) => a.seq - b.seq);
    for (const candidate of pending) {
      const lease = this.leases.get(candidate.pair_id);
      if (lease && lease.expires > this.clock && lease.reviewer !== reviewer) continue;
      this.leases.set(candidate.pair_id, { reviewer, expires: this.clock + this.leaseSeconds });
      return candidate;
    }
    return null;
  }

  // Mirrors the server's validation order: body shape first (422), then
  // existence (404), then decision/lease state (409).
  private decide(body: DecisionRequest, reviewer: string): Response {
    if (body.verdict !== 'accept' && body.verdict !== 'reject') {
      return errorResponse(422, `verdict must be accept or reject, got ${body.verdict}`);
    }
    const bad = (body.failed_criteria ?? []).filter((c) => !VALID_CRITERIA.includes(c));
    if (bad.length > 0) {
      return errorResponse(422, `unknown criteria: ${bad.join(', ')}`);
    }
    if (body.verdict === 'reject' && (body.failed_criteria ?? []).length === 0) {
      return errorResponse(422, 'reject requires at least one failed criterion');
    }
    if (body.verdict === 'accept' && (body.failed_criteria ?? []).length > 0) {
      return errorResponse(422, 'accept cannot carry failed criteria');
    }
    if (body.adjusted_strength != null && body.verdict !== 'reject') {
      return errorResponse(422, 'adjusted_strength only applies to rejections');
    }

    const candidate = this.candidates.find((c) => c.pair_id === body.pair_id);
    if (!candidate) {
      return errorResponse(404, `unknown pair id '${body.pair_id}'`);
    }
    if (this.status(body.pair_id) !== 'pending') {
      return errorResponse(409, `pair ${body.pair_id} is already decided`);
    }
    const lease = this.leases.get(body.pair_id);
    if (!lease || lease.expires <= this.clock) {
      return errorResponse(409, `pair ${body.pair_id} is not leased; fetch it via next_candidate first`);
    }
    if (lease.reviewer !== reviewer) {
      return errorResponse(409, `pair ${body.pair_id} is leased by '${lease.reviewer}', not '${reviewer}'`);
    }
    if (body.verdict === 'accept' && !candidate.verification.labels_preserved) {
      return errorResponse(
        409,
        `refusing accept for ${body.pair_id}: automated label check failed and label preservation is machine-enforced`,
      );
    }

    const decision: DecisionRecord = {
      pair_id: body.pair_id,
      verdict: body.verdict,
      failed_criteria: (body.failed_criteria ?? []) as Criterion[],
      adjusted_strength: body.adjusted_strength ?? null,
      reviewer,
      timestamp: this.clock,
    };
    this.decisions.set(body.pair_id, decision);
    this.leases.delete(body.pair_id);
    if (body.verdict === 'reject') {
      this.regenJobs.push({
        pair_id: candidate.pair_id,
        prompt_id: candidate.prompt_id,
        strength: body.adjusted_strength ?? candidate.style.strength,
        attempt: candidate.attempt + 1,
      });
    }
    return jsonResponse({ decision, stats: this.stats() });
  }

  fetch: FetchLike = async (input, init = {}) => {
    if (this.down) {
      throw new TypeError('fetch failed: service unreachable');
    }
    const url = new URL(input, 'http://fake');
    const path = url.pathname;
    const method = (init.method ?? 'GET').toUpperCase();
    const headers = Object.fromEntries(
      Object.entries((init.headers ?? {}) as Record<string, string>).map(([k, v]) => [
        k.toLowerCase(),
        v,
      ]),
    );
    const body = init.body ? JSON.parse(String(init.body)) : undefined;
    this.requests.push({ method, path, headers, body });
    const reviewer = headers['x-reviewer'] ?? url.searchParams.get('reviewer') ?? 'anonymous';

    if (method === 'GET' && path === '/healthz') {
      return jsonResponse({ status: 'ok' });
    }
    if (method === 'GET' && path === '/queue/next') {
      const candidate = this.nextFor(reviewer);
      return jsonResponse({ candidate });
    }
    if (method === 'POST' && path === '/decision') {
      return this.decide(body as DecisionRequest, reviewer);
    }
    if (method === 'GET' && path === '/stats') {
      return jsonResponse(this.stats());
    }
    const pairMatch = path.match(/^\/pair\/([^/]+)$/);
    if (method === 'GET' && pairMatch) {
      const pairId = decodeURIComponent(pairMatch[1]!);
      const candidate = this.candidates.find((c) => c.pair_id === pairId);
      if (!candidate) return errorResponse(404, `unknown pair id '${pairId}'`);
      return jsonResponse({
        ...candidate,
        prog_url: `/pair/${pairId}/prog.png`,
        candidate_url: `/pair/${pairId}/candidate.png`,
      });
    }
    return errorResponse(404, `no route for ${method} ${path}`);
  };
}
