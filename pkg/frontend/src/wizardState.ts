/** Add-paper wizard state: the draft under construction plus step gating.
 *
 * The client-side validity rules mirror the server's submission validator,
 * so the wizard can never emit a payload the server rejects for structural
 * reasons. Step k+1 is reachable only while every step up to k is valid.
 */

import type { NodeRef, PaperSubmission, ContributionPayload } from './api.js';

export interface MetadataDraft {
  title: string;
  doi: string;
  authors: string[];
  publication_year: number | null;
  venue: string;
}

export interface PropertyGroupDraft {
  predicate: NodeRef | null;
  values: NodeRef[];
}

export interface ContributionDraft {
  name: string;
  problem: NodeRef | null;
  method: NodeRef | null;
  results: PropertyGroupDraft[];
}

export interface WizardDraft {
  step: 1 | 2 | 3;
  metadata: MetadataDraft;
  research_field: string | null;
  contributions: ContributionDraft[];
}

export function emptyContribution(index: number): ContributionDraft {
  return {
    name: `Contribution ${index}`,
    problem: null,
    method: null,
    results: [],
  };
}

export function emptyDraft(): WizardDraft {
  return {
    step: 1,
    metadata: { title: '', doi: '', authors: [], publication_year: null, venue: '' },
    research_field: null,
    contributions: [emptyContribution(1)],
  };
}

export interface StepIssue {
  step: 1 | 2 | 3;
  message: string;
}

export function metadataIssues(draft: WizardDraft): StepIssue[] {
  const issues: StepIssue[] = [];
  if (!draft.metadata.title.trim()) {
    issues.push({ step: 1, message: 'a title is required' });
  }
  const year = draft.metadata.publication_year;
  if (year !== null && (year < 1600 || year > 2100)) {
    issues.push({ step: 1, message: 'publication year must be between 1600 and 2100' });
  }
  return issues;
}

export function fieldIssues(draft: WizardDraft): StepIssue[] {
  return draft.research_field ? [] : [{ step: 2, message: 'select a research field' }];
}

export function contributionIssues(draft: WizardDraft): StepIssue[] {
  const issues: StepIssue[] = [];
  if (draft.contributions.length === 0) {
    issues.push({ step: 3, message: 'at least one contribution is required' });
  }
  draft.contributions.forEach((contribution, i) => {
    const name = contribution.name || `Contribution ${i + 1}`;
    if (!contribution.problem) {
      issues.push({ step: 3, message: `${name}: a research problem is required` });
    }
    if (contribution.results.length === 0) {
      issues.push({ step: 3, message: `${name}: at least one result is required` });
    }
    contribution.results.forEach((group, j) => {
      if (!group.predicate) {
        issues.push({ step: 3, message: `${name}: property ${j + 1} needs a name` });
      }
      if (group.values.length === 0) {
        issues.push({ step: 3, message: `${name}: property ${j + 1} needs at least one value` });
      }
    });
  });
  return issues;
}

export function stepValid(draft: WizardDraft, step: 1 | 2 | 3): boolean {
  if (step === 1) return metadataIssues(draft).length === 0;
  if (step === 2) return fieldIssues(draft).length === 0;
  return contributionIssues(draft).length === 0;
}

export function reachableStep(draft: WizardDraft, step: 1 | 2 | 3): boolean {
  for (let previous = 1; previous < step; previous++) {
    if (!stepValid(draft, previous as 1 | 2 | 3)) return false;
  }
  return true;
}

export function allIssues(draft: WizardDraft): StepIssue[] {
  return [...metadataIssues(draft), ...fieldIssues(draft), ...contributionIssues(draft)];
}

/** The exact PaperSubmission JSON shape; field names match the wire format. */
export function buildSubmission(draft: WizardDraft): PaperSubmission {
  if (allIssues(draft).length > 0) {
    throw new Error('draft is not valid yet');
  }
  const contributions: ContributionPayload[] = draft.contributions.map((c, i) => {
    const payload: ContributionPayload = {
      name: c.name || `Contribution ${i + 1}`,
      problem: c.problem as NodeRef,
      results: c.results.map((group) => ({
        predicate: group.predicate as NodeRef,
        values: [...group.values],
      })),
    };
    if (c.method) payload.method = c.method;
    return payload;
  });
  return {
    metadata: {
      title: draft.metadata.title.trim(),
      doi: draft.metadata.doi.trim() || null,
      authors: [...draft.metadata.authors],
      publication_year: draft.metadata.publication_year,
      venue: draft.metadata.venue.trim() || null,
    },
    research_field: draft.research_field as string,
    contributions,
  };
}
