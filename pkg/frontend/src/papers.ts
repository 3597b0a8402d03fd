/** Paper browsing: the list of curated papers and one paper's detail page. */

import { api } from './api.js';
import { inBasket, toggleBasketEntry, type Basket } from './basket.js';
import { renderSimilarPanel } from './similarPanel.js';

export async function renderPaperList(root: HTMLElement): Promise<void> {
  root.innerHTML = '';
  root.className = 'paper-list';
  const heading = document.createElement('h2');
  heading.textContent = 'Papers';
  root.appendChild(heading);
  const ids = await api.listPapers();
  if (ids.length === 0) {
    const empty = document.createElement('p');
    empty.className = 'empty-state';
    empty.textContent = 'Nothing curated yet. Add a paper with the wizard.';
    root.appendChild(empty);
    return;
  }
  const list = document.createElement('ul');
  for (const id of ids) {
    const view = await api.getPaper(id);
    const item = document.createElement('li');
    const link = document.createElement('a');
    link.href = `#/papers/${id}`;
    link.textContent = view.metadata.title;
    item.appendChild(link);
    const meta = document.createElement('small');
    const year = view.metadata.publication_year ?? '';
    meta.textContent = ` ${year} · ${view.contributions.length} contribution(s)`;
    item.appendChild(meta);
    list.appendChild(item);
  }
  root.appendChild(list);
}

export async function renderPaperDetail(
  root: HTMLElement,
  paperId: string,
  basket: Basket,
): Promise<void> {
  root.innerHTML = '';
  root.className = 'paper-detail';
  const view = await api.getPaper(paperId);

  const heading = document.createElement('h2');
  heading.textContent = view.metadata.title;
  root.appendChild(heading);

  const meta = document.createElement('p');
  meta.className = 'paper-meta';
  const parts = [
    view.metadata.authors.join(', '),
    view.metadata.publication_year?.toString() ?? '',
    view.metadata.venue ?? '',
    view.metadata.doi ?? '',
  ].filter(Boolean);
  meta.textContent = parts.join(' · ');
  root.appendChild(meta);

  for (const contribution of view.contributions) {
    const card = document.createElement('section');
    card.className = 'contribution-detail';
    card.dataset.contribution = contribution.id;

    const title = document.createElement('h3');
    title.textContent = contribution.name;
    card.appendChild(title);

    const table = document.createElement('dl');
    if (contribution.problem) {
      table.appendChild(term('addresses'));
      table.appendChild(definition(contribution.problem.label));
    }
    if (contribution.method) {
      table.appendChild(term('utilizes method'));
      table.appendChild(definition(contribution.method.label));
    }
    for (const property of contribution.properties) {
      table.appendChild(term(property.label));
      table.appendChild(
        definition(property.values.map((value) => value.label).join('; ')),
      );
    }
    card.appendChild(table);

    const compare = document.createElement('button');
    compare.type = 'button';
    compare.className = 'add-to-comparison';
    compare.textContent = inBasket(basket, contribution.id)
      ? 'remove from comparison'
      : 'add to comparison';
    compare.addEventListener('click', () => {
      toggleBasketEntry(basket, {
        contribution: contribution.id,
        label: `${contribution.name} — ${view.metadata.title}`,
      });
      compare.textContent = inBasket(basket, contribution.id)
        ? 'remove from comparison'
        : 'add to comparison';
    });
    card.appendChild(compare);

    const similar = document.createElement('div');
    card.appendChild(similar);
    void renderSimilarPanel(similar, contribution.id, basket);

    root.appendChild(card);
  }
}

function term(text: string): HTMLElement {
  const dt = document.createElement('dt');
  dt.textContent = text;
  return dt;
}

function definition(text: string): HTMLElement {
  const dd = document.createElement('dd');
  dd.textContent = text;
  return dd;
}
