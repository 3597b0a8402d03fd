/** Typed client for the scholargraph REST API.
 *
 * All rendering in this app is a pure function of what these calls return;
 * the client adds nothing beyond the curator header and JSON decoding.
 */

export type NodeRef = { id: string } | { label: string };

export interface ApiNode {
  id: string;
  kind: 'resource' | 'predicate' | 'literal';
  label: string;
  classes: string[];
}

export interface BibliographicMetadata {
  title: string;
  doi: string | null;
  authors: string[];
  publication_year: number | null;
  venue: string | null;
}

export interface PropertyGroupPayload {
  predicate: NodeRef;
  values: NodeRef[];
}

export interface ContributionPayload {
  name: string;
  problem: NodeRef;
  method?: NodeRef;
  results: PropertyGroupPayload[];
}

export interface PaperSubmission {
  metadata: BibliographicMetadata;
  research_field: string;
  contributions: ContributionPayload[];
  submitted_by?: string;
}

export interface PropertyView {
  predicate: string;
  label: string;
  values: { id: string; label: string }[];
}

export interface ContributionView {
  id: string;
  name: string;
  problem: { id: string; label: string } | null;
  method: { id: string; label: string } | null;
  properties: PropertyView[];
}

export interface PaperView {
  id: string;
  metadata: BibliographicMetadata;
  research_field: string | null;
  contributions: ContributionView[];
}

export interface ResearchField {
  id: string;
  label: string;
  children: ResearchField[];
}

export interface SimilarItem {
  contribution: string;
  label: string;
  score: number;
  paper: string | null;
  paper_title: string | null;
}

export interface ComparisonTable {
  columns: { contribution: string; title: string }[];
  rows: { property: string; coverage: number; cells: string[][] }[];
}

export interface ValidationIssue {
  severity: 'error' | 'warning';
  message: string;
  path: string;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly issues: ValidationIssue[] = [],
  ) {
    super(message);
  }
}

let baseUrl = '';
let curatorToken: string | null = null;

export function configureApi(options: { baseUrl?: string; token?: string | null }): void {
  if (options.baseUrl !== undefined) baseUrl = options.baseUrl.replace(/\/$/, '');
  if (options.token !== undefined) curatorToken = options.token;
}

export function apiBaseUrl(): string {
  return baseUrl;
}

async function request<T>(method: string, path: string, body?: unknown): Promise<T> {
  const headers: Record<string, string> = {};
  if (body !== undefined) headers['Content-Type'] = 'application/json';
  if (method !== 'GET' && curatorToken) headers['X-Curator'] = curatorToken;
  const response = await fetch(baseUrl + path, {
    method,
    headers,
    body: body === undefined ? undefined : JSON.stringify(body),
  });
  if (response.status === 204) return undefined as T;
  if (!response.ok) {
    let code = 'Error';
    let message = `${response.status}`;
    let issues: ValidationIssue[] = [];
    try {
      const payload = await response.json();
      code = payload.error ?? code;
      message = payload.message ?? message;
      issues = payload.report?.issues ?? [];
    } catch {
      /* non-JSON error body */
    }
    throw new ApiError(response.status, code, message, issues);
  }
  return (await response.json()) as T;
}

export const api = {
  health: () => request<{ status: string; statements: number }>('GET', '/health'),

  findNodes: (query: string, kind?: string, limit = 8) => {
    const params = new URLSearchParams({ q: query, limit: String(limit) });
    if (kind) params.set('kind', kind);
    return request<ApiNode[]>('GET', `/api/nodes?${params}`);
  },

  fetchDoiMetadata: (doi: string) =>
    request<BibliographicMetadata>('GET', `/api/metadata/doi/${doi}`),

  researchFields: () => request<ResearchField[]>('GET', '/api/fields'),

  submitPaper: (submission: PaperSubmission) =>
    request<PaperView>('POST', '/api/papers', submission),

  getPaper: (paperId: string) => request<PaperView>('GET', `/api/papers/${paperId}`),

  listPapers: () => request<string[]>('GET', '/api/papers'),

  similarContributions: (contributionId: string, k = 5) =>
    request<SimilarItem[]>('GET', `/api/contributions/${contributionId}/similar?k=${k}`),

  comparison: (contributionIds: string[]) =>
    request<ComparisonTable>(
      'GET',
      `/api/comparison?contributions=${contributionIds.join(',')}&format=json`,
    ),

  comparisonCsv: async (contributionIds: string[]): Promise<Blob> => {
    const response = await fetch(
      `${baseUrl}/api/comparison?contributions=${contributionIds.join(',')}&format=csv`,
    );
    if (!response.ok) throw new ApiError(response.status, 'Error', 'CSV export failed');
    return await response.blob();
  },
};
