// View-state machine for the review console. Owns everything the page
// shows: the current candidate, verdict and criteria selection, the
// strength slider, and the stats footer. DOM code subscribes and renders.

import { ApiError, ReviewApi } from './api';
import type { Candidate, Criterion, QueueStats, Verdict } from './types';

// Historical first-attempt acceptance rate drawn as a reference line in
// the stats footer.
export const FIRST_ATTEMPT_REFERENCE = 0.68;

export type Screen = 'loading' | 'review' | 'idle' | 'error';

export interface ViewState {
  screen: Screen;
  candidate: Candidate | null;
  verdict: Verdict | null;
  selectedCriteria: readonly Criterion[];
  strength: number;
  overlaysVisible: boolean;
  stats: QueueStats | null;
  notice: string | null;
  errorMessage: string | null;
  submitting: boolean;
}

type Listener = (state: ViewState) => void;

export class ReviewController {
  private screen: Screen = 'loading';
  private candidate: Candidate | null = null;
  private verdict: Verdict | null = null;
  private selected = new Set<Criterion>();
  private strength = 0.7;
  private overlaysVisible = true;
  private stats: QueueStats | null = null;
  private notice: string | null = null;
  private errorMessage: string | null = null;
  private submitting = false;
  private listeners: Listener[] = [];

  constructor(private readonly api: ReviewApi) {}

  get state(): ViewState {
    return {
      screen: this.screen,
      candidate: this.candidate,
      verdict: this.verdict,
      selectedCriteria: [...this.selected],
      strength: this.strength,
      overlaysVisible: this.overlaysVisible,
      stats: this.stats,
      notice: this.notice,
      errorMessage: this.errorMessage,
      submitting: this.submitting,
    };
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    listener(this.state);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private notify(): void {
    const snapshot = this.state;
    for (const listener of this.listeners) listener(snapshot);
  }

  /** Lease the next candidate and refresh the footer. */
  async loadNext(): Promise<void> {
    this.screen = 'loading';
    this.errorMessage = null;
    this.notify();
    try {
      const [candidate, stats] = await Promise.all([
        this.api.nextCandidate(),
        this.api.stats(),
      ]);
      this.stats = stats;
      this.candidate = candidate;
      this.verdict = null;
      this.selected.clear();
      this.strength = candidate?.style.strength ?? this.strength;
      this.screen = candidate ? 'review' : 'idle';
    } catch (error) {
      this.screen = 'error';
      this.errorMessage = error instanceof Error ? error.message : String(error);
    }
    this.notify();
  }

  /** Re-run the last fetch after a network failure. */
  async retry(): Promise<void> {
    await this.loadNext();
  }

  chooseVerdict(verdict: Verdict): void {
    this.verdict = verdict;
    // Accepts carry no failed criteria; drop any leftover reject selection
    // so switching verdicts cannot produce an invalid submission.
    if (verdict === 'accept') this.selected.clear();
    this.notify();
  }

  toggleCriterion(criterion: Criterion): void {
    if (this.selected.has(criterion)) {
      this.selected.delete(criterion);
    } else {
      this.selected.add(criterion);
    }
    this.notify();
  }

  setStrength(value: number): void {
    if (!Number.isFinite(value)) return;
    this.strength = Math.min(1, Math.max(0.05, value));
    this.notify();
  }

  toggleOverlays(): void {
    this.overlaysVisible = !this.overlaysVisible;
    this.notify();
  }

  /** Submit stays disabled until a verdict is chosen and, on reject, at
   *  least one criterion names what failed. */
  canSubmit(): boolean {
    if (this.candidate === null || this.submitting) return false;
    if (this.verdict === null) return false;
    if (this.verdict === 'reject' && this.selected.size === 0) return false;
    return true;
  }

  /**
   * Post the decision and advance to the next candidate. A conflict means
   * the lease lapsed while the reviewer deliberated; the item is refetched
   * rather than treated as an error.
   */
  async submit(): Promise<void> {
    if (!this.canSubmit() || this.candidate === null || this.verdict === null) return;
    this.submitting = true;
    this.notice = null;
    this.notify();
    try {
      const response = await this.api.submitDecision({
        pair_id: this.candidate.pair_id,
        verdict: this.verdict,
        failed_criteria: [...this.selected],
        adjusted_strength: this.verdict === 'reject' ? this.strength : null,
      });
      this.stats = response.stats;
      this.submitting = false;
      await this.loadNext();
      return;
    } catch (error) {
      this.submitting = false;
      if (error instanceof ApiError && error.status === 409) {
        this.notice = error.detail;
        // A lapsed lease or a decision that raced ours means this item is
        // no longer ours to judge; anything else (for example an accept the
        // server refuses on machine-checked grounds) keeps the item up so
        // the reviewer can change the verdict.
        if (error.detail.includes('leased') || error.detail.includes('already decided')) {
          await this.loadNext();
        } else {
          this.notify();
        }
        return;
      }
      this.errorMessage = error instanceof Error ? error.message : String(error);
      this.notify();
    }
  }

  async refreshStats(): Promise<void> {
    try {
      this.stats = await this.api.stats();
      this.notify();
    } catch {
      // footer refresh is best-effort; the next submit surfaces real errors
    }
  }
}
