// Wire types for the review service HTTP API. Field names mirror the JSON
// payloads exactly; nothing here is derived client-side.

export type Verdict = 'accept' | 'reject';

export type Criterion = 'labels' | 'topology' | 'visual';

export const CRITERIA: readonly Criterion[] = ['labels', 'topology', 'visual'];

export interface TextRegion {
  text: string;
  bbox: [number, number, number, number]; // x, y, w, h in image pixels
}

export interface PairVerification {
  labels_preserved: boolean;
  missing_labels: string[];
  topology_ok: boolean;
  min_iou: number | null;
  visual: string; // the server never auto-passes this; 'pending-human' until reviewed
  overall: string;
}

export interface StyleSpec {
  prompt: string;
  strength: number;
  seed: number;
}

export interface Candidate {
  pair_id: string;
  prompt_id: string;
  prog_path: string;
  candidate_path: string;
  verification: PairVerification;
  style: StyleSpec;
  attempt: number;
  seq: number;
  regions?: TextRegion[]; // absent on items enqueued by older stores
}

export interface PairDetail extends Candidate {
  prog_url: string;
  candidate_url: string;
}

export interface QueueStats {
  pending: number;
  accepted: number;
  rejected: number;
  first_attempt_pass_rate: number | null;
  regen_pending: number;
}

export interface DecisionRequest {
  pair_id: string;
  verdict: Verdict;
  failed_criteria: Criterion[];
  adjusted_strength?: number | null;
  reviewer?: string;
}

export interface DecisionRecord {
  pair_id: string;
  verdict: Verdict;
  failed_criteria: Criterion[];
  adjusted_strength: number | null;
  reviewer: string;
  timestamp: number;
}

export interface DecisionResponse {
  decision: DecisionRecord;
  stats: QueueStats;
}
