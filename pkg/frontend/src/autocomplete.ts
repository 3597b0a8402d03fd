/** Debounced auto-completion against /api/nodes for linking existing
 * resources.
 *
 * Typing never creates anything; selecting an existing entry hands back a
 * `{ id }` reference, and choosing the trailing "create" row hands back a
 * `{ label }` reference that the server materializes at submission time.
 * Out-of-order responses are dropped: the list always reflects the most
 * recent completed query.
 */

import { api, type ApiNode, type NodeRef } from './api.js';

export interface AutocompleteOptions {
  placeholder?: string;
  kind?: 'resource' | 'predicate' | 'literal';
  allowCreate?: boolean;
  debounceMs?: number;
  limit?: number;
  onSelect(ref: NodeRef, label: string): void;
}

export interface AutocompleteHandle {
  root: HTMLElement;
  input: HTMLInputElement;
  clear(): void;
}

export function createAutocomplete(options: AutocompleteOptions): AutocompleteHandle {
  const debounceMs = options.debounceMs ?? 250;
  const allowCreate = options.allowCreate ?? true;

  const root = document.createElement('div');
  root.className = 'autocomplete';
  const input = document.createElement('input');
  input.type = 'text';
  input.placeholder = options.placeholder ?? '';
  input.setAttribute('autocomplete', 'off');
  const list = document.createElement('ul');
  list.className = 'autocomplete-results';
  list.hidden = true;
  root.appendChild(input);
  root.appendChild(list);

  let timer: ReturnType<typeof setTimeout> | null = null;
  let latestQuery = 0;

  function close(): void {
    list.hidden = true;
    list.innerHTML = '';
  }

  function select(ref: NodeRef, label: string): void {
    input.value = label;
    close();
    options.onSelect(ref, label);
  }

  function render(query: string, nodes: ApiNode[]): void {
    list.innerHTML = '';
    for (const node of nodes) {
      const item = document.createElement('li');
      item.className = 'autocomplete-item';
      item.dataset.nodeId = node.id;
      item.textContent = node.label;
      const kindTag = document.createElement('small');
      kindTag.textContent = ` ${node.id}`;
      item.appendChild(kindTag);
      item.addEventListener('mousedown', (event) => {
        event.preventDefault();
        select({ id: node.id }, node.label);
      });
      list.appendChild(item);
    }
    if (allowCreate && query.trim()) {
      const creator = document.createElement('li');
      creator.className = 'autocomplete-item autocomplete-create';
      creator.textContent = `create “${query.trim()}”`;
      creator.addEventListener('mousedown', (event) => {
        event.preventDefault();
        select({ label: query.trim() }, query.trim());
      });
      list.appendChild(creator);
    }
    list.hidden = list.children.length === 0;
  }

  async function runQuery(query: string): Promise<void> {
    const ticket = ++latestQuery;
    try {
      const nodes = await api.findNodes(query, options.kind, options.limit ?? 8);
      if (ticket !== latestQuery) return; // a newer query finished after us
      render(query, nodes);
    } catch {
      if (ticket !== latestQuery) return;
      render(query, []);
    }
  }

  input.addEventListener('input', () => {
    if (timer !== null) clearTimeout(timer);
    const query = input.value;
    if (!query.trim()) {
      latestQuery++;
      close();
      return;
    }
    timer = setTimeout(() => void runQuery(query), debounceMs);
  });

  input.addEventListener('blur', () => {
    // allow item mousedown handlers to run first
    setTimeout(close, 100);
  });

  return {
    root,
    input,
    clear() {
      input.value = '';
      close();
    },
  };
}
