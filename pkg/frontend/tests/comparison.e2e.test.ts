/** Comparison view against a real backend: the rendered row set must equal
 * the API's JSON rows, and the CSV download must be byte-identical to the
 * API's CSV output. */

import { readFileSync } from 'node:fs';
import { join } from 'node:path';
import { afterAll, beforeAll, beforeEach, expect, test } from 'vitest';
import { api, configureApi } from '../src/api.js';
import { createBasket } from '../src/basket.js';
import { renderComparisonView } from '../src/comparisonView.js';
import { startBackend, waitFor, type Backend } from './helpers.js';

const SUBMISSION_PATH = join(
  __dirname,
  '..',
  '..',
  'src',
  'scholargraph',
  'data',
  'frankenstein_submission.json',
);

let backend: Backend;
let contributionA: string;
let contributionB: string;

async function ingestFixture(): Promise<string> {
  const payload = JSON.parse(readFileSync(SUBMISSION_PATH, 'utf-8'));
  const response = await fetch(`${backend.baseUrl}/api/papers`, {
    method: 'POST',
    headers: { 'Content-Type': 'application/json', 'X-Curator': 'seeder' },
    body: JSON.stringify(payload),
  });
  expect(response.status).toBe(201);
  const view = await response.json();
  return view.contributions[0].id;
}

beforeAll(async () => {
  backend = await startBackend();
  configureApi({ baseUrl: backend.baseUrl, token: 'viewer' });
  contributionA = await ingestFixture();
  contributionB = await ingestFixture();
});

afterAll(async () => {
  await backend.stop();
});

beforeEach(() => {
  localStorage.clear();
});

test('fewer than two selections disables the compare action with a hint', async () => {
  const root = document.createElement('div');
  document.body.appendChild(root);
  const basket = createBasket(localStorage);
  basket.set([{ contribution: contributionA, label: 'only one' }]);
  await renderComparisonView(root, basket);
  const action = root.querySelector<HTMLButtonElement>('.compare-action')!;
  expect(action.disabled).toBe(true);
  expect(root.querySelector('.compare-hint')?.textContent).toMatch(/at least two/i);
  expect(root.querySelector('table')).toBeNull();
});

test('rendered rows equal the API row set', async () => {
  const root = document.createElement('div');
  document.body.appendChild(root);
  const basket = createBasket(localStorage);
  basket.set([
    { contribution: contributionA, label: 'first' },
    { contribution: contributionB, label: 'second' },
  ]);
  await renderComparisonView(root, basket);

  const table = await waitFor(() => root.querySelector('table.comparison-table'));
  const domRows = [...table.querySelectorAll('tbody tr')].map((tr) => ({
    property: tr.getAttribute('data-property'),
    cells: [...tr.querySelectorAll('td')].map((td) => td.textContent),
  }));

  const apiTable = await api.comparison([contributionA, contributionB]);
  expect(domRows).toEqual(
    apiTable.rows.map((row) => ({
      property: row.property,
      cells: row.cells.map((cell) => cell.join('; ')),
    })),
  );
  // column headers carry the paper titles, in input order
  const headers = [...table.querySelectorAll('thead th')].slice(1).map(
    (th) => th.textContent,
  );
  expect(headers).toEqual(apiTable.columns.map((column) => column.title));
  // sanity: the golden fixture shares these properties
  const properties = domRows.map((row) => row.property);
  expect(properties).toContain('evaluated on dataset');
  expect(properties).toContain('utilizes programming language');
});

test('CSV download is byte-identical to the API CSV', async () => {
  const root = document.createElement('div');
  document.body.appendChild(root);
  const basket = createBasket(localStorage);
  basket.set([
    { contribution: contributionA, label: 'first' },
    { contribution: contributionB, label: 'second' },
  ]);
  await renderComparisonView(root, basket);

  const captured: Blob[] = [];
  (URL as unknown as { createObjectURL(blob: Blob): string }).createObjectURL = (
    blob: Blob,
  ) => {
    captured.push(blob);
    return 'blob:captured';
  };
  (URL as unknown as { revokeObjectURL(url: string): void }).revokeObjectURL = () => {};

  const download = await waitFor(() =>
    root.querySelector<HTMLButtonElement>('.download-csv'),
  );
  download.click();
  await waitFor(() => captured.length === 1);

  const downloaded = new Uint8Array(await captured[0].arrayBuffer());
  const direct = new Uint8Array(
    await (
      await fetch(
        `${backend.baseUrl}/api/comparison?contributions=${contributionA},${contributionB}&format=csv`,
      )
    ).arrayBuffer(),
  );
  expect(downloaded.length).toBe(direct.length);
  expect([...downloaded]).toEqual([...direct]);
  const text = new TextDecoder().decode(downloaded);
  expect(text.startsWith('Property,')).toBe(true);
  expect(text).toContain('LC-Quad; QALD');
});
