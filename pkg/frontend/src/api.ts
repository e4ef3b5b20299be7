// Typed client for the interview service JSON API.

export type Sentiment = -1 | 0 | 1;

export interface EntityCard {
  id: number;
  uri: string;
  name: string;
  kind: string;
  recommendable: boolean;
}

export interface FinalLists {
  predicted_liked: EntityCard[];
  predicted_disliked: EntityCard[];
  extras: EntityCard[];
}

export interface SessionState {
  session_id: string;
  token: string;
  phase: 'initial' | 'exploration' | 'recommendation' | 'done';
  batch_number: number;
  progress: number;
  progress_target: number;
  truncated: boolean;
  batch: EntityCard[];
  final?: FinalLists;
  resumed?: boolean;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export interface Api {
  createSession(token: string | null): Promise<SessionState>;
  getSession(sessionId: string): Promise<SessionState>;
  postAnswers(
    sessionId: string,
    batchNumber: number,
    answers: Array<{ entity_id: number; sentiment: Sentiment }>,
  ): Promise<SessionState>;
  exportRatings(): Promise<string>;
}

async function parse(res: Response): Promise<SessionState> {
  if (!res.ok) {
    let detail = res.statusText;
    try {
      const body = await res.json();
      if (body && typeof body.detail === 'string') detail = body.detail;
    } catch {
      // keep the status text
    }
    throw new ApiError(res.status, detail);
  }
  return (await res.json()) as SessionState;
}

export class HttpApi implements Api {
  constructor(private baseUrl: string = '') {}

  async createSession(token: string | null): Promise<SessionState> {
    const res = await fetch(`${this.baseUrl}/api/sessions`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(token ? { token } : {}),
    });
    return parse(res);
  }

  async getSession(sessionId: string): Promise<SessionState> {
    return parse(await fetch(`${this.baseUrl}/api/sessions/${sessionId}`));
  }

  async postAnswers(
    sessionId: string,
    batchNumber: number,
    answers: Array<{ entity_id: number; sentiment: Sentiment }>,
  ): Promise<SessionState> {
    const res = await fetch(`${this.baseUrl}/api/sessions/${sessionId}/answers`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ batch_number: batchNumber, answers }),
    });
    return parse(res);
  }

  async exportRatings(): Promise<string> {
    const res = await fetch(`${this.baseUrl}/api/export`);
    if (!res.ok) throw new ApiError(res.status, res.statusText);
    return res.text();
  }
}
