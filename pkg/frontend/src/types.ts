// Wire-protocol types mirroring the audit service payloads. The client never
// derives verdicts or compatibility sets on its own; everything here is a
// direct transcription of what the service sends.

export type FrequencyLabel =
  | 'Frequently'
  | 'Occasionally'
  | 'NotAnymore'
  | 'Never'
  | 'DontRemember';

export type AgreementLabel = 'Agree' | 'Disagree' | 'DontKnow';

export type AnswerLabel = FrequencyLabel | AgreementLabel;

export type ActionLabel =
  | 'Unfriend'
  | 'UnfriendOrSandbox'
  | 'Restrict'
  | 'Unfollow';

export type DecisionLabel =
  | 'Unfriend'
  | 'Sandbox'
  | 'Restrict'
  | 'Unfollow'
  | 'Ignore';

export interface Question {
  index: number;
  text: string;
  answers: AnswerLabel[];
}

export interface QuestionnaireStep {
  kind: 'questionnaire';
  friend_id: string;
  questions: Question[];
}

export interface SuggestionStep {
  kind: 'suggestion';
  friend_id: string;
  action: ActionLabel;
  matched_rule: number;
  reasons: string[];
  compatible_decisions: DecisionLabel[];
  ignore_reasons: string[];
}

export interface SessionSummary {
  actions: Record<string, [number, number]>;
  ignore_reasons: Record<string, number>;
}

export interface CompleteStep {
  kind: 'complete';
  summary: SessionSummary;
}

export type NextStep = QuestionnaireStep | SuggestionStep | CompleteStep;

export interface SessionStatus {
  session_id: string;
  participant_id: string;
  mode: string;
  status: 'InProgress' | 'Complete';
  queue_length: number;
  position: number;
}

export interface StepResponse extends SessionStatus {
  next: NextStep;
}

export interface RelationshipState {
  is_friend: boolean;
  user_sees_friend: boolean;
  friend_sees_user: boolean;
}

export interface ApiErrorBody {
  code: 'BadRequest' | 'NotFound' | 'Conflict' | 'Invariant';
  message: string;
}
