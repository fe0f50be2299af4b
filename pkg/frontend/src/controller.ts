import { AuditApi, type CreateSessionParams } from './api.js';
import { DecisionForm, QuestionnaireForm, type Clock } from './forms.js';
import type { NextStep, SessionSummary, StepResponse } from './types.js';

export type ScreenState =
  | { kind: 'Questionnaire'; form: QuestionnaireForm }
  | { kind: 'Suggestion'; form: DecisionForm }
  | { kind: 'Summary'; summary: SessionSummary }
  | { kind: 'Done' };

/**
 * One audit session from the client's point of view. Screen state is a pure
 * function of the latest service response; the client never computes
 * verdicts, compatibility sets, or reason texts locally.
 */
export class AuditFlow {
  private sessionId: string | null = null;
  private screenState: ScreenState = { kind: 'Done' };

  constructor(
    private readonly api: AuditApi,
    private readonly clock: Clock = () => Date.now(),
  ) {}

  get screen(): ScreenState {
    return this.screenState;
  }

  get session(): string {
    if (this.sessionId === null) {
      throw new Error('no session started');
    }
    return this.sessionId;
  }

  async start(params: CreateSessionParams): Promise<ScreenState> {
    const response = await this.api.createSession(params);
    this.sessionId = response.session_id;
    return this.apply(response);
  }

  async submitQuestionnaire(): Promise<ScreenState> {
    if (this.screenState.kind !== 'Questionnaire') {
      throw new Error('no questionnaire on screen');
    }
    const form = this.screenState.form;
    const { responses, timings } = form.payload();
    const response = await this.api.submitResponses(
      this.session,
      form.step.friend_id,
      responses,
      timings,
    );
    return this.apply(response);
  }

  async confirmDecision(): Promise<ScreenState> {
    if (this.screenState.kind !== 'Suggestion') {
      throw new Error('no suggestion on screen');
    }
    const form = this.screenState.form;
    const { decision, ignoreReason } = form.payload();
    const response = await this.api.submitDecision(
      this.session,
      form.step.friend_id,
      decision,
      ignoreReason,
    );
    return this.apply(response);
  }

  fetchLog(): Promise<string> {
    return this.api.log(this.session);
  }

  private apply(response: StepResponse): ScreenState {
    this.screenState = this.toScreen(response.next);
    return this.screenState;
  }

  private toScreen(next: NextStep): ScreenState {
    switch (next.kind) {
      case 'questionnaire':
        return {
          kind: 'Questionnaire',
          form: new QuestionnaireForm(next, this.clock),
        };
      case 'suggestion':
        return { kind: 'Suggestion', form: new DecisionForm(next) };
      case 'complete':
        return { kind: 'Summary', summary: next.summary };
    }
  }
}
