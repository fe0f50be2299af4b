// Browser entry point: mounts the flow into #app and re-renders after every
// service response. Logic lives in controller/forms/render; this file only
// touches the DOM.

import { AuditApi } from './api.js';
import { AuditFlow } from './controller.js';
import { renderQuestionnaire, renderSuggestion, renderSummary } from './render.js';
import type { AnswerLabel, DecisionLabel } from './types.js';

function mount(root: HTMLElement, flow: AuditFlow): void {
  const draw = () => {
    const screen = flow.screen;
    switch (screen.kind) {
      case 'Questionnaire':
        root.innerHTML = renderQuestionnaire(screen.form);
        break;
      case 'Suggestion':
        root.innerHTML = renderSuggestion(screen.form);
        break;
      case 'Summary':
        root.innerHTML = renderSummary(screen.summary);
        break;
      case 'Done':
        root.innerHTML = '<p>Session closed.</p>';
        break;
    }
  };

  root.addEventListener('change', (event) => {
    const input = event.target as HTMLInputElement;
    const screen = flow.screen;
    if (screen.kind === 'Questionnaire' && input.name?.startsWith('q')) {
      screen.form.answer(Number(input.name.slice(1)), input.value as AnswerLabel);
      draw();
    } else if (screen.kind === 'Suggestion' && input.name === 'ignore-reason') {
      screen.form.chooseIgnoreReason(input.value);
      draw();
    }
  });

  root.addEventListener('click', (event) => {
    const button = event.target as HTMLButtonElement;
    const screen = flow.screen;
    if (screen.kind === 'Suggestion' && button.classList.contains('decision')) {
      screen.form.choose(button.dataset.decision as DecisionLabel);
      draw();
    } else if (screen.kind === 'Suggestion' && button.classList.contains('confirm')) {
      void flow.confirmDecision().then(draw);
    }
  });

  root.addEventListener('submit', (event) => {
    event.preventDefault();
    if (flow.screen.kind === 'Questionnaire') {
      void flow.submitQuestionnaire().then(draw);
    }
  });

  draw();
}

export function boot(root: HTMLElement, baseUrl: string): AuditFlow {
  const flow = new AuditFlow(new AuditApi(baseUrl));
  mount(root, flow);
  return flow;
}
