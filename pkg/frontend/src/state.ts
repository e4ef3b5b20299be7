// Client-side game state machine. Pure of DOM concerns so it can be driven
// headlessly; the UI layer subscribes to change events.

import { Api, ApiError, EntityCard, SessionState, Sentiment } from './api.js';

export interface TokenStore {
  get(): string | null;
  set(token: string): void;
}

export const TOKEN_KEY = 'kgrec_token';

export function localStorageTokenStore(): TokenStore {
  return {
    get: () => window.localStorage.getItem(TOKEN_KEY),
    set: (token) => window.localStorage.setItem(TOKEN_KEY, token),
  };
}

export type Listener = (game: Game) => void;

export class Game {
  state: SessionState | null = null;
  answers = new Map<number, Sentiment>();
  error: string | null = null;
  busy = false;
  private listeners: Listener[] = [];

  constructor(private api: Api, private tokens: TokenStore) {}

  onChange(fn: Listener): void {
    this.listeners.push(fn);
  }

  private emit(): void {
    for (const fn of this.listeners) fn(this);
  }

  get batch(): EntityCard[] {
    return this.state?.batch ?? [];
  }

  get phase(): string {
    return this.state?.phase ?? 'loading';
  }

  /** Fraction of the like/dislike target reached, for the progress bar. */
  get progressFraction(): number {
    if (!this.state) return 0;
    return Math.min(this.state.progress, this.state.progress_target) / this.state.progress_target;
  }

  canSubmit(): boolean {
    if (!this.state || this.busy || this.state.phase === 'done') return false;
    return (
      this.batch.length > 0 && this.batch.every((card) => this.answers.has(card.id))
    );
  }

  /** Cards outside the current batch can never be answered: the UI only ever
   * posts entity ids the server handed out in the last payload. */
  setAnswer(entityId: number, sentiment: Sentiment): void {
    if (!this.batch.some((card) => card.id === entityId)) return;
    this.answers.set(entityId, sentiment);
    this.emit();
  }

  cycleAnswer(entityId: number): void {
    const order: Sentiment[] = [1, -1, 0];
    const current = this.answers.get(entityId);
    const next = current === undefined ? 0 : (order.indexOf(current) + 1) % order.length;
    this.setAnswer(entityId, order[next] as Sentiment);
  }

  async start(): Promise<void> {
    this.busy = true;
    this.error = null;
    this.emit();
    try {
      const token = this.tokens.get();
      this.state = await this.api.createSession(token);
      this.tokens.set(this.state.token);
      this.answers = new Map();
    } catch (err) {
      this.error = describe(err);
    } finally {
      this.busy = false;
      this.emit();
    }
  }

  async submit(): Promise<void> {
    if (!this.state || !this.canSubmit()) return;
    this.busy = true;
    this.error = null;
    this.emit();
    const payload = this.batch.map((card) => ({
      entity_id: card.id,
      sentiment: this.answers.get(card.id) as Sentiment,
    }));
    try {
      this.state = await this.api.postAnswers(
        this.state.session_id,
        this.state.batch_number,
        payload,
      );
      this.answers = new Map();
    } catch (err) {
      if (err instanceof ApiError && err.status === 409 && this.state) {
        // batch drifted (e.g. stale tab): re-fetch and keep answers whose
        // entity ids still match
        const fresh = await this.api.getSession(this.state.session_id);
        const keep = new Map<number, Sentiment>();
        for (const card of fresh.batch) {
          const existing = this.answers.get(card.id);
          if (existing !== undefined) keep.set(card.id, existing);
        }
        this.state = fresh;
        this.answers = keep;
        this.error = 'The batch was refreshed; your matching answers were kept.';
      } else {
        this.error = describe(err);
      }
    } finally {
      this.busy = false;
      this.emit();
    }
  }

  /** Restart after completion: a new session under the same token. */
  async restart(): Promise<void> {
    await this.start();
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return `Server error ${err.status}: ${err.message}`;
  return err instanceof Error ? err.message : String(err);
}
