/** Comparison view: the selection basket rendered as a property matrix.
 *
 * The table mirrors the API response one-to-one: properties as rows in the
 * server's order, contributions as columns, multi-valued cells joined for
 * display. CSV download proxies the server's format=csv output untouched.
 */

import { api, type ComparisonTable } from './api.js';
import { toggleBasketEntry, type Basket } from './basket.js';

export function renderComparisonTable(table: ComparisonTable): HTMLTableElement {
  const element = document.createElement('table');
  element.className = 'comparison-table';
  const head = document.createElement('thead');
  const headRow = document.createElement('tr');
  const corner = document.createElement('th');
  corner.textContent = 'Property';
  headRow.appendChild(corner);
  for (const column of table.columns) {
    const th = document.createElement('th');
    th.dataset.contribution = column.contribution;
    th.textContent = column.title;
    headRow.appendChild(th);
  }
  head.appendChild(headRow);
  element.appendChild(head);

  const body = document.createElement('tbody');
  for (const row of table.rows) {
    const tr = document.createElement('tr');
    tr.dataset.property = row.property;
    const th = document.createElement('th');
    th.textContent = row.property;
    tr.appendChild(th);
    for (const cell of row.cells) {
      const td = document.createElement('td');
      td.textContent = cell.join('; ');
      tr.appendChild(td);
    }
    body.appendChild(tr);
  }
  element.appendChild(body);
  return element;
}

export async function renderComparisonView(root: HTMLElement, basket: Basket): Promise<void> {
  root.innerHTML = '';
  root.className = 'comparison-view';

  const heading = document.createElement('h2');
  heading.textContent = 'Compare contributions';
  root.appendChild(heading);

  const entries = basket.get();
  const selection = document.createElement('ul');
  selection.className = 'basket-list';
  for (const entry of entries) {
    const item = document.createElement('li');
    item.textContent = `${entry.label} (${entry.contribution}) `;
    const remove = document.createElement('button');
    remove.type = 'button';
    remove.textContent = 'remove';
    remove.addEventListener('click', () => {
      toggleBasketEntry(basket, entry);
      void renderComparisonView(root, basket);
    });
    item.appendChild(remove);
    selection.appendChild(item);
  }
  root.appendChild(selection);

  if (entries.length < 2) {
    const hint = document.createElement('p');
    hint.className = 'compare-hint';
    hint.textContent = 'Select at least two contributions to compare.';
    root.appendChild(hint);
    const disabled = document.createElement('button');
    disabled.type = 'button';
    disabled.className = 'compare-action';
    disabled.disabled = true;
    disabled.textContent = 'Compare';
    root.appendChild(disabled);
    return;
  }

  const ids = entries.map((entry) => entry.contribution);
  const table = await api.comparison(ids);
  root.appendChild(renderComparisonTable(table));

  const download = document.createElement('button');
  download.type = 'button';
  download.className = 'download-csv';
  download.textContent = 'Download CSV';
  download.addEventListener('click', () => void downloadCsv(ids));
  root.appendChild(download);
}

async function downloadCsv(ids: string[]): Promise<void> {
  const blob = await api.comparisonCsv(ids);
  const url = URL.createObjectURL(blob);
  const link = document.createElement('a');
  link.href = url;
  link.download = 'comparison.csv';
  link.click();
  URL.revokeObjectURL(url);
}
