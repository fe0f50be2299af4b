// HTML renderers for each screen. Pure string functions so they are
// testable without a browser; main.ts mounts the output into the page.

import type { DecisionForm, QuestionnaireForm } from './forms.js';
import type { SessionSummary, SuggestionStep } from './types.js';

const ACTION_MEANING: Record<string, string> = {
  Unfriend: 'Remove this person from your friend list.',
  UnfriendOrSandbox:
    'You never interact with this friend. You can unfriend them, or ' +
    'sandbox them: keep the friendship but stop all story sharing in both ' +
    'directions, without them noticing.',
  Restrict: 'Stop your stories from reaching this friend.',
  Unfollow: "Stop this friend's stories from reaching your news feed.",
};

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

export function renderQuestionnaire(form: QuestionnaireForm): string {
  const groups = form.step.questions
    .map((question) => {
      const options = question.answers
        .map((label) => {
          const checked = form.answerFor(question.index) === label ? ' checked' : '';
          return (
            `<label><input type="radio" name="q${question.index}" ` +
            `value="${label}"${checked}> ${escapeHtml(label)}</label>`
          );
        })
        .join('');
      return (
        `<fieldset class="question" data-index="${question.index}">` +
        `<legend>${escapeHtml(question.text)}</legend>${options}</fieldset>`
      );
    })
    .join('');
  const disabled = form.canSubmit ? '' : ' disabled';
  return (
    `<form class="questionnaire" data-friend="${escapeHtml(form.step.friend_id)}">` +
    `${groups}<button type="submit"${disabled}>Submit</button></form>`
  );
}

export function renderSuggestion(form: DecisionForm): string {
  const step: SuggestionStep = form.step;
  const reasons = step.reasons
    .map((reason) => `<li>${escapeHtml(reason)}</li>`)
    .join('');
  const buttons = step.compatible_decisions
    .map((d) => `<button class="decision" data-decision="${d}">${d}</button>`)
    .join('');
  const reasonPrompt = form.needsReason
    ? `<div class="ignore-reasons">` +
      step.ignore_reasons
        .map(
          (reason) =>
            `<label><input type="radio" name="ignore-reason" ` +
            `value="${escapeHtml(reason)}"> ${escapeHtml(reason)}</label>`,
        )
        .join('') +
      `</div>`
    : '';
  const disabled = form.canConfirm ? '' : ' disabled';
  return (
    `<section class="suggestion" data-friend="${escapeHtml(step.friend_id)}">` +
    `<p class="meaning">${escapeHtml(ACTION_MEANING[step.action] ?? step.action)}</p>` +
    `<ul class="reasons">${reasons}</ul>` +
    `<div class="choices">${buttons}</div>` +
    reasonPrompt +
    `<button class="confirm"${disabled}>Confirm</button></section>`
  );
}

export function renderSummary(summary: SessionSummary): string {
  const actions = Object.entries(summary.actions);
  if (actions.length === 0) {
    return `<section class="summary"><p class="empty">No suggestions were raised in this session.</p></section>`;
  }
  let recommendedTotal = 0;
  let acceptedTotal = 0;
  const rows = actions
    .map(([action, [recommended, accepted]]) => {
      recommendedTotal += recommended;
      acceptedTotal += accepted;
      return (
        `<div class="bar-pair" data-action="${escapeHtml(action)}">` +
        `<span class="recommended" data-count="${recommended}">${recommended}</span>` +
        `<span class="accepted" data-count="${accepted}">${accepted}</span></div>`
      );
    })
    .join('');
  const reasons = Object.entries(summary.ignore_reasons)
    .map(
      ([reason, count]) =>
        `<li data-reason="${escapeHtml(reason)}">${escapeHtml(reason)}: ${count}</li>`,
    )
    .join('');
  return (
    `<section class="summary">${rows}` +
    `<div class="totals" data-recommended="${recommendedTotal}" ` +
    `data-accepted="${acceptedTotal}"></div>` +
    `<ul class="ignore-breakdown">${reasons}</ul></section>`
  );
}
