// DOM rendering: 3x3 card grid, progress bar, final recommendation lists.

import { EntityCard, Sentiment } from './api.js';
import { Game } from './state.js';

const SENTIMENT_LABEL: Record<string, string> = {
  '1': 'Like',
  '-1': 'Dislike',
  '0': "Don't know",
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderCard(game: Game, card: EntityCard): HTMLElement {
  const answer = game.answers.get(card.id);
  const node = el('div', 'card' + (answer !== undefined ? ` answered s${answer}` : ''));
  node.dataset.entityId = String(card.id);
  node.appendChild(el('div', 'card-kind', card.kind));
  node.appendChild(el('div', 'card-name', card.name));
  const state = el('div', 'card-state', answer === undefined ? 'Tap to rate' : SENTIMENT_LABEL[String(answer)]);
  node.appendChild(state);
  node.addEventListener('click', () => game.cycleAnswer(card.id));
  return node;
}

function renderFinalList(title: string, cards: EntityCard[], game: Game): HTMLElement | null {
  if (cards.length === 0) return null; // empty sections stay hidden
  const section = el('section', 'final-list');
  section.appendChild(el('h3', undefined, title));
  const grid = el('div', 'grid');
  for (const card of cards) grid.appendChild(renderCard(game, card));
  section.appendChild(grid);
  return section;
}

export function render(game: Game, root: HTMLElement): void {
  root.textContent = '';

  const header = el('header');
  header.appendChild(el('h1', undefined, 'Movie Mind Game'));
  const phase = game.phase;
  header.appendChild(el('div', 'phase-banner', phaseBanner(phase)));
  const bar = el('div', 'progress');
  const fill = el('div', 'progress-fill');
  fill.style.width = `${Math.round(game.progressFraction * 100)}%`;
  bar.appendChild(fill);
  if (game.state) {
    bar.title = `${game.state.progress}/${game.state.progress_target} rated`;
  }
  header.appendChild(bar);
  root.appendChild(header);

  if (game.error) {
    const banner = el('div', 'error', game.error);
    const retry = el('button', 'retry', 'Retry');
    retry.addEventListener('click', () => void game.start());
    banner.appendChild(retry);
    root.appendChild(banner);
  }

  if (!game.state) return;

  if (phase === 'recommendation' || phase === 'done') {
    const final = game.state.final;
    if (final) {
      root.appendChild(el('p', 'hint', 'Our guesses from your answers. Rate them to finish!'))
      for (const [title, cards] of [
        ['We think you like these', final.predicted_liked],
        ["We think you don't like these", final.predicted_disliked],
        ['Wildcards', final.extras],
      ] as const) {
        const section = renderFinalList(title, cards, game);
        if (section) root.appendChild(section);
      }
    }
  }

  if (phase !== 'done' && game.batch.length > 0 && phase !== 'recommendation') {
    const grid = el('div', 'grid');
    for (const card of game.batch) grid.appendChild(renderCard(game, card));
    root.appendChild(grid);
  }

  const controls = el('div', 'controls');
  if (phase === 'done') {
    const restart = el('button', 'restart', 'Play again');
    restart.addEventListener('click', () => void game.restart());
    controls.appendChild(restart);
    controls.appendChild(el('p', 'hint', 'Thanks for playing! Your answers were saved.'));
  } else {
    const submit = el('button', 'submit', game.busy ? 'Sending…' : 'Submit answers');
    submit.disabled = !game.canSubmit();
    submit.addEventListener('click', () => void game.submit());
    controls.appendChild(submit);
  }
  root.appendChild(controls);
}

function phaseBanner(phase: string): string {
  switch (phase) {
    case 'initial':
      return 'Warm-up: tell us about these movies';
    case 'exploration':
      return 'Getting to know your taste';
    case 'recommendation':
      return 'Mind read complete: our guesses';
    case 'done':
      return 'All done';
    default:
      return 'Loading…';
  }
}
