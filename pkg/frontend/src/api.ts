/**
 * Typed client for the rulekit service. The UI performs no parsing,
 * compilation, or evaluation of its own; every semantic result comes
 * through these calls.
 */

export interface TextSpan {
  start: number;
  end: number;
}

export interface Diagnostic {
  severity: 'error' | 'warning';
  message: string;
  span: TextSpan;
  hint?: string;
}

export interface SourceSpan {
  file: string;
  startLine: number;
  startCol: number;
  endLine: number;
  endCol: number;
}

export interface MatchRecord {
  span: SourceSpan;
  snippetText: string;
  status: 'satisfied' | 'violated';
}

export interface EvalResult {
  satisfied: MatchRecord[];
  violated: MatchRecord[];
  filesConsidered: number;
  filterMatchedZero: boolean;
}

export type ElementState = 'inactive' | 'ofInterest' | 'active';

export interface GuiElement {
  id: string;
  /** element kind surface form, or "group" for a parenthesized group */
  kind: string;
  state: ElementState;
  valueText: string | null;
  constraintFlag: boolean;
  connective: 'and' | 'or';
  eoiEligible: boolean;
  textSpan: [number, number] | null;
  children: GuiElement[];
}

export interface FileFilter {
  include: string[];
}

export interface GuiModel {
  root: GuiElement;
  eoiId: string | null;
  title: string;
  description: string;
  tags: string[];
  fileFilter: FileFilter;
}

export interface TokenLink {
  start: number;
  end: number;
  id: string;
}

export interface SyncPayload {
  ok: boolean;
  text?: string;
  canonicalText?: string;
  model?: GuiModel;
  tokenMap?: TokenLink[];
  diagnostics: Diagnostic[];
  error?: string;
  elementId?: string | null;
}

export interface Suggestion {
  token: string;
  doc: string;
  example: string;
}

export interface DocEntry {
  term: string;
  description: string;
  example: string;
}

export interface EvaluateResponse {
  status: 'ok' | 'invalid-rule' | 'skipped';
  result?: EvalResult;
  diagnostics?: Diagnostic[];
}

export interface ProjectFile {
  path: string;
  ok: boolean;
  error: string | null;
  warnings: number;
}

export interface RuleRecordBody {
  id: string;
  title?: string;
  description?: string;
  tags?: string[];
  fileFilter?: FileFilter;
  ruleText: string;
  modelSnapshot?: GuiModel | null;
}

export interface EventsResponse {
  seq: number;
  events: { type: string; seq: number; at: number }[];
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: unknown,
  ) {
    super(`service error ${status}`);
  }
}

export class ApiClient {
  constructor(readonly baseUrl: string) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const res = await fetch(`${this.baseUrl}${path}`, {
      method,
      headers: body !== undefined ? { 'content-type': 'application/json' } : {},
      body: body !== undefined ? JSON.stringify(body) : undefined,
    });
    const data = res.status === 204 ? null : await res.json();
    if (!res.ok) {
      throw new ApiError(res.status, data);
    }
    return data as T;
  }

  health(): Promise<{ ok: boolean; project: string; seq: number }> {
    return this.request('GET', '/health');
  }

  template(): Promise<{ model: GuiModel }> {
    return this.request('GET', '/template');
  }

  parse(text: string): Promise<SyncPayload> {
    return this.request('POST', '/parse', { text });
  }

  render(model: GuiModel): Promise<SyncPayload> {
    return this.request('POST', '/render', { model });
  }

  complete(text: string, cursor: number): Promise<{ suggestions: Suggestion[] }> {
    return this.request('POST', '/complete', { text, cursor });
  }

  hover(text: string, offset: number): Promise<{ doc: DocEntry | null }> {
    return this.request('POST', '/hover', { text, offset });
  }

  lint(text: string): Promise<{ diagnostics: Diagnostic[] }> {
    return this.request('POST', '/lint', { text });
  }

  evaluateText(ruleText: string, fileFilter?: FileFilter): Promise<EvaluateResponse> {
    return this.request('POST', '/evaluate', { ruleText, fileFilter });
  }

  evaluateRule(ruleId: string): Promise<EvaluateResponse> {
    return this.request('POST', '/evaluate', { ruleId });
  }

  listRules(): Promise<{ rules: (RuleRecordBody & { diagnostics?: Diagnostic[] })[] }> {
    return this.request('GET', '/rules');
  }

  createRule(rule: RuleRecordBody): Promise<RuleRecordBody> {
    return this.request('POST', '/rules', rule);
  }

  updateRule(id: string, rule: RuleRecordBody): Promise<RuleRecordBody> {
    return this.request('PUT', `/rules/${encodeURIComponent(id)}`, rule);
  }

  deleteRule(id: string): Promise<{ deleted: string }> {
    return this.request('DELETE', `/rules/${encodeURIComponent(id)}`);
  }

  projectFiles(): Promise<{ rootDir: string; files: ProjectFile[] }> {
    return this.request('GET', '/project/files');
  }

  rescan(): Promise<{ changed: boolean; seq: number }> {
    return this.request('POST', '/rescan');
  }

  events(since: number, wait = 0): Promise<EventsResponse> {
    return this.request('GET', `/events?since=${since}&wait=${wait}`);
  }
}
