import type {
  AnswerLabel,
  DecisionLabel,
  QuestionnaireStep,
  SuggestionStep,
} from './types.js';

export type Clock = () => number; // milliseconds, monotonic enough for timing

/**
 * Local state for one friend's questionnaire screen.
 *
 * All five questions render on a single screen; submit stays disabled until
 * each has an answer. Per-question timing is the gap between the screen (or
 * previous answer) and the moment the answer was picked, in seconds.
 */
export class QuestionnaireForm {
  private readonly answers = new Map<number, AnswerLabel>();
  private readonly timings = new Map<number, number>();
  private lastMark: number;

  constructor(
    readonly step: QuestionnaireStep,
    private readonly clock: Clock = () => Date.now(),
  ) {
    this.lastMark = clock();
  }

  answer(index: number, label: AnswerLabel): void {
    const question = this.step.questions.find((q) => q.index === index);
    if (!question) {
      throw new Error(`no question with index ${index}`);
    }
    if (!question.answers.includes(label)) {
      throw new Error(`answer ${label} not offered for question ${index}`);
    }
    const now = this.clock();
    if (!this.answers.has(index)) {
      this.timings.set(index, (now - this.lastMark) / 1000);
    }
    this.lastMark = now;
    this.answers.set(index, label);
  }

  answerFor(index: number): AnswerLabel | undefined {
    return this.answers.get(index);
  }

  get canSubmit(): boolean {
    return this.step.questions.every((q) => this.answers.has(q.index));
  }

  /** Wire payload: q1..q5 labels plus a timings array of length 5. */
  payload(): { responses: Record<string, AnswerLabel>; timings: number[] } {
    if (!this.canSubmit) {
      throw new Error('cannot submit: unanswered questions remain');
    }
    const responses: Record<string, AnswerLabel> = {};
    const timings: number[] = [];
    for (const question of this.step.questions) {
      responses[`q${question.index}`] = this.answers.get(question.index)!;
      timings.push(this.timings.get(question.index)!);
    }
    return { responses, timings };
  }
}

/**
 * Local state for a suggestion screen.
 *
 * Only decisions from the service's compatibility set are selectable, and
 * confirming Ignore is blocked until one of the offered reasons is chosen.
 */
export class DecisionForm {
  private decision: DecisionLabel | null = null;
  private ignoreReason: string | null = null;

  constructor(readonly step: SuggestionStep) {}

  choose(decision: DecisionLabel): void {
    if (!this.step.compatible_decisions.includes(decision)) {
      throw new Error(`decision ${decision} not offered for this suggestion`);
    }
    this.decision = decision;
    if (decision !== 'Ignore') {
      this.ignoreReason = null;
    }
  }

  chooseIgnoreReason(reason: string): void {
    if (this.decision !== 'Ignore') {
      throw new Error('pick Ignore before choosing a reason');
    }
    if (!this.step.ignore_reasons.includes(reason)) {
      throw new Error(`unknown ignore reason ${reason}`);
    }
    this.ignoreReason = reason;
  }

  get needsReason(): boolean {
    return this.decision === 'Ignore' && this.ignoreReason === null;
  }

  get canConfirm(): boolean {
    return this.decision !== null && !this.needsReason;
  }

  payload(): { decision: DecisionLabel; ignoreReason?: string } {
    if (!this.canConfirm) {
      throw new Error('cannot confirm: decision incomplete');
    }
    return this.ignoreReason === null
      ? { decision: this.decision! }
      : { decision: this.decision!, ignoreReason: this.ignoreReason };
  }
}
