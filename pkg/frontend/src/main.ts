/** Application shell: hash router, curator token prompt, navigation. */

import { apiBaseUrl, configureApi } from './api.js';
import { createBasket } from './basket.js';
import { renderComparisonView } from './comparisonView.js';
import { renderPaperDetail, renderPaperList } from './papers.js';
import { createWizardStore, renderWizard } from './wizard.js';

function ensureToken(): string {
  let token = sessionStorage.getItem('scholargraph.curator');
  if (!token) {
    token = window.prompt('Curator name (recorded as statement provenance):') || 'curator';
    sessionStorage.setItem('scholargraph.curator', token);
  }
  return token;
}

export function startApp(root: HTMLElement): void {
  const declared = (window as { SCHOLARGRAPH_API?: string }).SCHOLARGRAPH_API;
  configureApi({
    baseUrl: declared ?? localStorage.getItem('scholargraph.api') ?? '',
    token: ensureToken(),
  });

  const basket = createBasket(localStorage);
  const wizardStore = createWizardStore(localStorage);

  const nav = document.createElement('nav');
  nav.className = 'app-nav';
  for (const [hash, label] of [
    ['#/papers', 'Papers'],
    ['#/add', 'Add paper'],
    ['#/compare', 'Compare'],
  ]) {
    const link = document.createElement('a');
    link.href = hash;
    link.textContent = label;
    nav.appendChild(link);
  }
  const outlet = document.createElement('main');
  root.appendChild(nav);
  root.appendChild(outlet);

  let teardown: (() => void) | null = null;

  function route(): void {
    if (teardown) {
      teardown();
      teardown = null;
    }
    outlet.innerHTML = '';
    const hash = window.location.hash || '#/papers';
    const paperMatch = /^#\/papers\/(.+)$/.exec(hash);
    if (hash === '#/add') {
      teardown = renderWizard(outlet, wizardStore, {
        onSubmitted(paperId) {
          window.location.hash = `#/papers/${paperId}`;
        },
      });
    } else if (paperMatch) {
      void renderPaperDetail(outlet, paperMatch[1], basket);
    } else if (hash === '#/compare') {
      void renderComparisonView(outlet, basket);
    } else {
      void renderPaperList(outlet);
    }
  }

  window.addEventListener('hashchange', route);
  route();
  console.info(`scholargraph ui ready (api: ${apiBaseUrl() || 'same origin'})`);
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  startApp(document.getElementById('app') as HTMLElement);
}
