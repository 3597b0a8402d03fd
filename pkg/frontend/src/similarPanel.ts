/** Ranked similar-contributions panel for a contribution page.
 *
 * Shows the API's top-5 exactly as returned (no client-side re-sorting),
 * scores to two decimals, with a link to each owning paper and an
 * add-to-comparison action.
 */

import { api } from './api.js';
import { inBasket, toggleBasketEntry, type Basket } from './basket.js';

export async function renderSimilarPanel(
  root: HTMLElement,
  contributionId: string,
  basket: Basket,
): Promise<void> {
  root.innerHTML = '';
  root.className = 'similar-panel';
  const heading = document.createElement('h3');
  heading.textContent = 'Similar contributions';
  root.appendChild(heading);

  const items = await api.similarContributions(contributionId, 5);
  if (items.length === 0) {
    const empty = document.createElement('p');
    empty.className = 'empty-state';
    empty.textContent = 'No similar contributions yet.';
    root.appendChild(empty);
    return;
  }

  const list = document.createElement('ol');
  list.className = 'similar-list';
  for (const item of items) {
    const entry = document.createElement('li');
    entry.dataset.contribution = item.contribution;

    const score = document.createElement('span');
    score.className = 'similar-score';
    score.textContent = item.score.toFixed(2);
    entry.appendChild(score);

    const label = document.createElement('span');
    label.className = 'similar-label';
    label.textContent = ` ${item.label} `;
    entry.appendChild(label);

    if (item.paper) {
      const link = document.createElement('a');
      link.href = `#/papers/${item.paper}`;
      link.textContent = item.paper_title ?? item.paper;
      entry.appendChild(link);
    }

    const add = document.createElement('button');
    add.type = 'button';
    add.className = 'add-to-comparison';
    add.textContent = inBasket(basket, item.contribution)
      ? 'remove from comparison'
      : 'add to comparison';
    add.addEventListener('click', () => {
      toggleBasketEntry(basket, {
        contribution: item.contribution,
        label: item.label,
      });
      add.textContent = inBasket(basket, item.contribution)
        ? 'remove from comparison'
        : 'add to comparison';
    });
    entry.appendChild(add);
    list.appendChild(entry);
  }
  root.appendChild(list);
}
