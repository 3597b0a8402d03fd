/** Three-step add-paper wizard.
 *
 * Step 1 collects bibliographic metadata, pre-filled by DOI lookup or
 * entered manually. Step 2 classifies the paper in the research-field
 * tree. Step 3 assembles contributions with autocomplete-backed property
 * and value entry. The draft lives in localStorage, so a reload resumes
 * where the curator left off.
 */

import { api, ApiError, type NodeRef, type ResearchField } from './api.js';
import { createAutocomplete } from './autocomplete.js';
import { persistedStore, type Store } from './state.js';
import {
  allIssues,
  buildSubmission,
  contributionIssues,
  emptyContribution,
  emptyDraft,
  fieldIssues,
  metadataIssues,
  reachableStep,
  stepValid,
  type WizardDraft,
} from './wizardState.js';

const STEP_TITLES: Record<number, string> = {
  1: 'Paper metadata',
  2: 'Research field',
  3: 'Contributions',
};

export interface WizardCallbacks {
  onSubmitted?(paperId: string): void;
}

export function createWizardStore(storage: Storage): Store<WizardDraft> {
  return persistedStore<WizardDraft>('scholargraph.wizard', emptyDraft(), storage);
}

export function renderWizard(
  root: HTMLElement,
  store: Store<WizardDraft>,
  callbacks: WizardCallbacks = {},
): () => void {
  let fieldsCache: ResearchField[] | null = null;
  let fieldsLoading = false;
  let doiError = '';
  let submitError = '';
  let busy = false;

  function set(fn: (draft: WizardDraft) => WizardDraft): void {
    store.update(fn);
  }

  function goto(step: 1 | 2 | 3): void {
    if (reachableStep(store.get(), step)) {
      set((draft) => ({ ...draft, step }));
    }
  }

  function renderNav(draft: WizardDraft): HTMLElement {
    const nav = document.createElement('nav');
    nav.className = 'wizard-nav';
    ([1, 2, 3] as const).forEach((step) => {
      const button = document.createElement('button');
      button.type = 'button';
      button.dataset.step = String(step);
      button.textContent = `${step}. ${STEP_TITLES[step]}`;
      button.disabled = !reachableStep(draft, step);
      if (draft.step === step) button.classList.add('active');
      button.addEventListener('click', () => goto(step));
      nav.appendChild(button);
    });
    return nav;
  }

  // --- step 1: metadata ------------------------------------------------------

  function renderMetadataStep(draft: WizardDraft): HTMLElement {
    const panel = document.createElement('section');
    panel.className = 'wizard-step step-metadata';

    const doiRow = document.createElement('div');
    doiRow.className = 'doi-lookup';
    const doiInput = document.createElement('input');
    doiInput.name = 'doi';
    doiInput.placeholder = 'DOI, e.g. 10.1145/3178876.3186023';
    doiInput.value = draft.metadata.doi;
    doiInput.addEventListener('change', () => {
      set((d) => ({ ...d, metadata: { ...d.metadata, doi: doiInput.value } }));
    });
    const lookup = document.createElement('button');
    lookup.type = 'button';
    lookup.className = 'doi-lookup-button';
    lookup.textContent = 'Look up DOI';
    lookup.addEventListener('click', () => void lookupDoi(doiInput.value));
    doiRow.appendChild(doiInput);
    doiRow.appendChild(lookup);
    panel.appendChild(doiRow);

    if (doiError) {
      const note = document.createElement('p');
      note.className = 'inline-error doi-error';
      note.textContent = doiError;
      panel.appendChild(note);
    }

    const hint = document.createElement('p');
    hint.className = 'hint';
    hint.textContent = 'or fill the fields in manually:';
    panel.appendChild(hint);

    const form = document.createElement('div');
    form.className = 'metadata-form';

    const title = textField('title', 'Title', draft.metadata.title, (value) =>
      set((d) => ({ ...d, metadata: { ...d.metadata, title: value } })),
    );
    const authors = textField(
      'authors',
      'Authors (one per line)',
      draft.metadata.authors.join('\n'),
      (value) =>
        set((d) => ({
          ...d,
          metadata: {
            ...d.metadata,
            authors: value.split('\n').map((a) => a.trim()).filter(Boolean),
          },
        })),
      true,
    );
    const year = textField(
      'publication_year',
      'Publication year',
      draft.metadata.publication_year?.toString() ?? '',
      (value) =>
        set((d) => ({
          ...d,
          metadata: {
            ...d.metadata,
            publication_year: value.trim() ? Number(value.trim()) : null,
          },
        })),
    );
    const venue = textField('venue', 'Venue', draft.metadata.venue, (value) =>
      set((d) => ({ ...d, metadata: { ...d.metadata, venue: value } })),
    );
    form.append(title, authors, year, venue);
    panel.appendChild(form);

    metadataIssues(draft).forEach((issue) => {
      const note = document.createElement('p');
      note.className = 'inline-error';
      note.textContent = issue.message;
      panel.appendChild(note);
    });

    const next = document.createElement('button');
    next.type = 'button';
    next.className = 'next-step';
    next.textContent = 'Next: research field';
    next.disabled = !stepValid(draft, 1);
    next.addEventListener('click', () => goto(2));
    panel.appendChild(next);
    return panel;
  }

  async function lookupDoi(rawDoi: string): Promise<void> {
    doiError = '';
    try {
      const metadata = await api.fetchDoiMetadata(rawDoi.trim());
      set((draft) => ({
        ...draft,
        metadata: {
          title: metadata.title,
          doi: metadata.doi ?? rawDoi.trim(),
          authors: metadata.authors,
          publication_year: metadata.publication_year,
          venue: metadata.venue ?? '',
        },
      }));
    } catch (error) {
      doiError =
        error instanceof ApiError && error.status === 404
          ? 'DOI not found; you can enter the metadata manually below.'
          : `DOI lookup failed: ${(error as Error).message}`;
      rerender();
    }
  }

  // --- step 2: research field ------------------------------------------------

  function renderFieldStep(draft: WizardDraft): HTMLElement {
    const panel = document.createElement('section');
    panel.className = 'wizard-step step-field';
    const tree = document.createElement('div');
    tree.className = 'field-tree';
    panel.appendChild(tree);

    const renderTree = (fields: ResearchField[]): void => {
      tree.innerHTML = '';
      const walk = (entries: ResearchField[], parent: HTMLElement): void => {
        const list = document.createElement('ul');
        for (const field of entries) {
          const item = document.createElement('li');
          const label = document.createElement('label');
          const radio = document.createElement('input');
          radio.type = 'radio';
          radio.name = 'research-field';
          radio.setAttribute('value', field.id);
          radio.checked = draft.research_field === field.id;
          radio.addEventListener('change', () => {
            set((d) => ({ ...d, research_field: field.id }));
          });
          label.appendChild(radio);
          label.appendChild(document.createTextNode(` ${field.label}`));
          item.appendChild(label);
          if (field.children.length > 0) walk(field.children, item);
          list.appendChild(item);
        }
        parent.appendChild(list);
      };
      walk(fields, tree);
    };

    if (fieldsCache) {
      renderTree(fieldsCache);
    } else {
      tree.textContent = 'loading fields…';
      if (!fieldsLoading) {
        fieldsLoading = true;
        void api.researchFields().then((fields) => {
          fieldsCache = fields;
          fieldsLoading = false;
          rerender();
        });
      }
    }

    fieldIssues(draft).forEach((issue) => {
      const note = document.createElement('p');
      note.className = 'inline-error';
      note.textContent = issue.message;
      panel.appendChild(note);
    });

    const next = document.createElement('button');
    next.type = 'button';
    next.className = 'next-step';
    next.textContent = 'Next: contributions';
    next.disabled = !stepValid(draft, 2);
    next.addEventListener('click', () => goto(3));
    panel.appendChild(next);
    return panel;
  }

  // --- step 3: contributions ---------------------------------------------------

  function refChip(ref: NodeRef, label: string, onRemove: () => void): HTMLElement {
    const chip = document.createElement('span');
    chip.className = 'chip';
    chip.dataset.ref = 'id' in ref ? ref.id : `new:${ref.label}`;
    chip.textContent = label;
    const remove = document.createElement('button');
    remove.type = 'button';
    remove.className = 'chip-remove';
    remove.textContent = '×';
    remove.addEventListener('click', onRemove);
    chip.appendChild(remove);
    return chip;
  }

  function renderContributionStep(draft: WizardDraft): HTMLElement {
    const panel = document.createElement('section');
    panel.className = 'wizard-step step-contributions';

    draft.contributions.forEach((contribution, ci) => {
      const card = document.createElement('fieldset');
      card.className = 'contribution-card';
      const legend = document.createElement('legend');
      legend.textContent = contribution.name;
      card.appendChild(legend);

      // problem
      const problemRow = document.createElement('div');
      problemRow.className = 'problem-row';
      problemRow.appendChild(rowLabel('Research problem'));
      if (contribution.problem) {
        problemRow.appendChild(
          refChip(contribution.problem, refLabel(contribution.problem), () =>
            set((d) => patchContribution(d, ci, { problem: null })),
          ),
        );
      } else {
        const auto = createAutocomplete({
          placeholder: 'link or create a research problem',
          kind: 'resource',
          onSelect: (ref) => set((d) => patchContribution(d, ci, { problem: ref })),
        });
        auto.input.dataset.role = 'problem-input';
        problemRow.appendChild(auto.root);
      }
      card.appendChild(problemRow);

      // method (optional)
      const methodRow = document.createElement('div');
      methodRow.className = 'method-row';
      methodRow.appendChild(rowLabel('Method (optional)'));
      if (contribution.method) {
        methodRow.appendChild(
          refChip(contribution.method, refLabel(contribution.method), () =>
            set((d) => patchContribution(d, ci, { method: null })),
          ),
        );
      } else {
        const auto = createAutocomplete({
          placeholder: 'link or create a method',
          kind: 'resource',
          onSelect: (ref) => set((d) => patchContribution(d, ci, { method: ref })),
        });
        auto.input.dataset.role = 'method-input';
        methodRow.appendChild(auto.root);
      }
      card.appendChild(methodRow);

      // property groups
      contribution.results.forEach((group, gi) => {
        const groupRow = document.createElement('div');
        groupRow.className = 'property-group';
        if (group.predicate) {
          groupRow.appendChild(
            refChip(group.predicate, refLabel(group.predicate), () =>
              set((d) => patchGroup(d, ci, gi, { predicate: null })),
            ),
          );
        } else {
          const auto = createAutocomplete({
            placeholder: 'property, e.g. evaluated on dataset',
            kind: 'predicate',
            onSelect: (ref) => set((d) => patchGroup(d, ci, gi, { predicate: ref })),
          });
          auto.input.dataset.role = `predicate-input-${gi}`;
          groupRow.appendChild(auto.root);
        }

        const values = document.createElement('span');
        values.className = 'value-chips';
        group.values.forEach((value, vi) => {
          values.appendChild(
            refChip(value, refLabel(value), () =>
              set((d) =>
                patchGroup(d, ci, gi, {
                  values: group.values.filter((_, idx) => idx !== vi),
                }),
              ),
            ),
          );
        });
        groupRow.appendChild(values);

        const valueAuto = createAutocomplete({
          placeholder: 'add value',
          kind: 'resource',
          onSelect: (ref) =>
            set((d) => patchGroup(d, ci, gi, { values: [...group.values, ref] })),
        });
        valueAuto.input.dataset.role = `value-input-${gi}`;
        groupRow.appendChild(valueAuto.root);

        const removeGroup = document.createElement('button');
        removeGroup.type = 'button';
        removeGroup.className = 'remove-group';
        removeGroup.textContent = 'remove property';
        removeGroup.addEventListener('click', () =>
          set((d) =>
            patchContribution(d, ci, {
              results: contribution.results.filter((_, idx) => idx !== gi),
            }),
          ),
        );
        groupRow.appendChild(removeGroup);
        card.appendChild(groupRow);
      });

      const addGroup = document.createElement('button');
      addGroup.type = 'button';
      addGroup.className = 'add-group';
      addGroup.textContent = 'add property';
      addGroup.addEventListener('click', () =>
        set((d) =>
          patchContribution(d, ci, {
            results: [...contribution.results, { predicate: null, values: [] }],
          }),
        ),
      );
      card.appendChild(addGroup);
      panel.appendChild(card);
    });

    const addContribution = document.createElement('button');
    addContribution.type = 'button';
    addContribution.className = 'add-contribution';
    addContribution.textContent = 'add contribution';
    addContribution.addEventListener('click', () =>
      set((d) => ({
        ...d,
        contributions: [...d.contributions, emptyContribution(d.contributions.length + 1)],
      })),
    );
    panel.appendChild(addContribution);

    contributionIssues(draft).forEach((issue) => {
      const note = document.createElement('p');
      note.className = 'inline-error';
      note.textContent = issue.message;
      panel.appendChild(note);
    });

    if (submitError) {
      const note = document.createElement('p');
      note.className = 'inline-error submit-error';
      note.textContent = submitError;
      panel.appendChild(note);
    }

    const submit = document.createElement('button');
    submit.type = 'button';
    submit.className = 'submit-paper';
    submit.textContent = busy ? 'submitting…' : 'Submit paper';
    submit.disabled = busy || allIssues(draft).length > 0;
    submit.addEventListener('click', () => void submitDraft());
    panel.appendChild(submit);
    return panel;
  }

  async function submitDraft(): Promise<void> {
    const draft = store.get();
    if (allIssues(draft).length > 0) return; // structural issues stay client-side
    busy = true;
    submitError = '';
    rerender();
    try {
      const view = await api.submitPaper(buildSubmission(draft));
      store.set(emptyDraft());
      callbacks.onSubmitted?.(view.id);
    } catch (error) {
      if (error instanceof ApiError && error.issues.length > 0) {
        submitError = error.issues
          .map((issue) => `${issue.path}: ${issue.message}`)
          .join('; ');
      } else {
        submitError = (error as Error).message;
      }
    } finally {
      busy = false;
      rerender();
    }
  }

  // --- shared ---------------------------------------------------------------------

  function rerender(): void {
    const draft = store.get();
    root.innerHTML = '';
    root.appendChild(renderNav(draft));
    if (draft.step === 1) root.appendChild(renderMetadataStep(draft));
    else if (draft.step === 2) root.appendChild(renderFieldStep(draft));
    else root.appendChild(renderContributionStep(draft));
  }

  const unsubscribe = store.subscribe(rerender);
  rerender();
  return unsubscribe;
}

function rowLabel(text: string): HTMLElement {
  const label = document.createElement('span');
  label.className = 'row-label';
  label.textContent = text;
  return label;
}

function refLabel(ref: NodeRef): string {
  return 'label' in ref ? `${ref.label} (new)` : ref.id;
}

function textField(
  name: string,
  label: string,
  value: string,
  onChange: (value: string) => void,
  multiline = false,
): HTMLElement {
  const wrapper = document.createElement('label');
  wrapper.className = `field field-${name}`;
  wrapper.appendChild(document.createTextNode(label));
  const input = multiline
    ? document.createElement('textarea')
    : document.createElement('input');
  input.setAttribute('name', name);
  input.value = value;
  input.addEventListener('change', () => onChange(input.value));
  wrapper.appendChild(input);
  return wrapper;
}

type ContributionPatch = Partial<import('./wizardState.js').ContributionDraft>;

function patchContribution(
  draft: WizardDraft,
  index: number,
  patch: ContributionPatch,
): WizardDraft {
  const contributions = draft.contributions.map((c, i) =>
    i === index ? { ...c, ...patch } : c,
  );
  return { ...draft, contributions };
}

function patchGroup(
  draft: WizardDraft,
  contributionIndex: number,
  groupIndex: number,
  patch: Partial<import('./wizardState.js').PropertyGroupDraft>,
): WizardDraft {
  const contribution = draft.contributions[contributionIndex];
  const results = contribution.results.map((g, i) =>
    i === groupIndex ? { ...g, ...patch } : g,
  );
  return patchContribution(draft, contributionIndex, { results });
}
