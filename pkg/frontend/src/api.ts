import type {
  AnswerLabel,
  ApiErrorBody,
  DecisionLabel,
  RelationshipState,
  SessionStatus,
  SessionSummary,
  StepResponse,
} from './types.js';

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly body: ApiErrorBody,
  ) {
    super(body.message);
  }
}

export interface CreateSessionParams {
  participant_id: string;
  seed: number;
  mode?: string;
  sample_size?: number;
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, {
    headers: { 'Content-Type': 'application/json' },
    ...init,
  });
  if (!response.ok) {
    const body = (await response.json()) as ApiErrorBody;
    throw new ApiError(response.status, body);
  }
  return (await response.json()) as T;
}

/** Thin typed wrapper over the audit service; one instance per session host. */
export class AuditApi {
  constructor(private readonly baseUrl: string) {}

  createSession(params: CreateSessionParams): Promise<StepResponse> {
    return request(`${this.baseUrl}/sessions`, {
      method: 'POST',
      body: JSON.stringify(params),
    });
  }

  nextStep(sessionId: string): Promise<StepResponse> {
    return request(`${this.baseUrl}/sessions/${sessionId}/next`);
  }

  submitResponses(
    sessionId: string,
    friendId: string,
    responses: Record<string, AnswerLabel>,
    timings: number[],
  ): Promise<StepResponse> {
    return request(`${this.baseUrl}/sessions/${sessionId}/responses`, {
      method: 'POST',
      body: JSON.stringify({ friend_id: friendId, responses, timings }),
    });
  }

  submitDecision(
    sessionId: string,
    friendId: string,
    decision: DecisionLabel,
    ignoreReason?: string,
  ): Promise<StepResponse & { state: RelationshipState }> {
    return request(`${this.baseUrl}/sessions/${sessionId}/decision`, {
      method: 'POST',
      body: JSON.stringify({
        friend_id: friendId,
        decision,
        ignore_reason: ignoreReason ?? null,
      }),
    });
  }

  summary(sessionId: string): Promise<SessionStatus & { summary: SessionSummary }> {
    return request(`${this.baseUrl}/sessions/${sessionId}/summary`);
  }

  async log(sessionId: string): Promise<string> {
    const response = await fetch(`${this.baseUrl}/sessions/${sessionId}/log`);
    if (!response.ok) {
      throw new ApiError(response.status, (await response.json()) as ApiErrorBody);
    }
    return await response.text();
  }
}
