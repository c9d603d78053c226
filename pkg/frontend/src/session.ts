/**
 * Editing session state: one rule draft whose structured model and text
 * are kept in lockstep through service round-trips. Every graphical
 * mutation posts the model and adopts the returned canonical text and
 * normalized model; every text edit is parsed back into a model. Stale
 * responses are discarded by sequence number.
 */

import {
  ApiClient,
  Diagnostic,
  EvalResult,
  FileFilter,
  GuiElement,
  GuiModel,
  SyncPayload,
  TokenLink,
} from './api.js';

export interface GuideState {
  step1Done: boolean;
  step2Done: boolean;
  currentStep: 1 | 2 | 3;
}

export interface RuleDraft {
  title: string;
  description: string;
  tags: string[];
  fileFilter: FileFilter;
  model: GuiModel | null;
  text: string;
}

export type SessionListener = () => void;

export function findElement(root: GuiElement, id: string): GuiElement | null {
  if (root.id === id) {
    return root;
  }
  for (const child of root.children) {
    const found = findElement(child, id);
    if (found) {
      return found;
    }
  }
  return null;
}

export function pathTo(root: GuiElement, id: string): GuiElement[] | null {
  if (root.id === id) {
    return [root];
  }
  for (const child of root.children) {
    const sub = pathTo(child, id);
    if (sub) {
      return [root, ...sub];
    }
  }
  return null;
}

export function walk(root: GuiElement): GuiElement[] {
  const out: GuiElement[] = [root];
  for (const child of root.children) {
    out.push(...walk(child));
  }
  return out;
}

export function childOfKind(el: GuiElement, kind: string): GuiElement | null {
  return el.children.find((c) => c.kind === kind) ?? null;
}

export function deriveGuide(model: GuiModel | null): GuideState {
  if (!model) {
    return { step1Done: false, step2Done: false, currentStep: 1 };
  }
  const elements = walk(model.root);
  const step1Done = elements.some((e) => e.state === 'active');
  const step2Done = elements.some((e) => e.state === 'active' && e.constraintFlag);
  const currentStep = !step1Done ? 1 : !step2Done ? 2 : 3;
  return { step1Done, step2Done, currentStep };
}

export class EditorSession {
  draft: RuleDraft = {
    title: '',
    description: '',
    tags: [],
    fileFilter: { include: [] },
    model: null,
    text: '',
  };

  /** links from element-name tokens in the text to graphical elements */
  tokenMap: TokenLink[] = [];
  diagnostics: Diagnostic[] = [];
  /** error from the last model sync (e.g. constraint outside the EoI) */
  modelError: { message: string; elementId: string | null } | null = null;
  results: EvalResult | null = null;
  resultsStale = false;

  private syncSeq = 0;
  private evalSeq = 0;
  private listeners: SessionListener[] = [];

  constructor(readonly api: ApiClient) {}

  onChange(listener: SessionListener): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const l of this.listeners) {
      l();
    }
  }

  guide(): GuideState {
    return deriveGuide(this.draft.model);
  }

  /** Start from the blank template form. */
  async init(): Promise<void> {
    const { model } = await this.api.template();
    this.draft.model = model;
    this.draft.text = '';
    this.tokenMap = [];
    this.diagnostics = [];
    this.modelError = null;
    this.results = null;
    this.emit();
  }

  /** The prominent "Clear Form" action. */
  async clearForm(): Promise<void> {
    this.draft.title = '';
    this.draft.description = '';
    this.draft.tags = [];
    this.draft.fileFilter = { include: [] };
    await this.init();
  }

  // -- graphical mutations (local field edits + a sync round-trip)

  private model(): GuiModel {
    if (!this.draft.model) {
      throw new Error('session not initialized');
    }
    return this.draft.model;
  }

  private activateUp(id: string): void {
    const path = pathTo(this.model().root, id);
    if (!path) {
      throw new Error(`no element ${id}`);
    }
    for (const el of path) {
      if (el.kind !== 'group') {
        el.state = 'active';
      }
    }
  }

  async setValue(id: string, value: string): Promise<void> {
    const el = findElement(this.model().root, id);
    if (!el) {
      throw new Error(`no element ${id}`);
    }
    el.valueText = value;
    this.activateUp(id);
    await this.syncModel();
  }

  async activate(id: string, on = true): Promise<void> {
    const el = findElement(this.model().root, id);
    if (!el) {
      throw new Error(`no element ${id}`);
    }
    if (on) {
      this.activateUp(id);
    } else {
      for (const d of walk(el)) {
        d.state = 'inactive';
        d.constraintFlag = false;
      }
    }
    await this.syncModel();
  }

  async toggleConstraint(id: string, flag: boolean): Promise<void> {
    const el = findElement(this.model().root, id);
    if (!el) {
      throw new Error(`no element ${id}`);
    }
    for (const d of walk(el)) {
      if (flag && d !== el && d.state !== 'active') {
        continue;
      }
      d.constraintFlag = flag;
    }
    if (flag) {
      this.activateUp(id);
    } else {
      const path = pathTo(this.model().root, id) ?? [];
      for (const anc of path.slice(0, -1)) {
        anc.constraintFlag = false;
      }
    }
    await this.syncModel();
  }

  async setConnective(id: string, connective: 'and' | 'or'): Promise<void> {
    const el = findElement(this.model().root, id);
    if (!el) {
      throw new Error(`no element ${id}`);
    }
    el.connective = connective;
    await this.syncModel();
  }

  /** Clicking an element's star makes it the element of interest. */
  async setEoi(id: string): Promise<void> {
    this.model().eoiId = id;
    await this.syncModel();
  }

  async setFileFilter(include: string[]): Promise<void> {
    this.draft.fileFilter = { include };
    this.model().fileFilter = { include };
    if (this.draft.text) {
      await this.evaluate();
    }
    this.emit();
  }

  /** Push the model through the service; adopt canonical text + model. */
  async syncModel(): Promise<void> {
    const seq = ++this.syncSeq;
    const model = this.model();
    let payload: SyncPayload;
    try {
      payload = await this.api.render(model);
    } finally {
      this.resultsStale = true;
    }
    if (seq !== this.syncSeq) {
      return; // a newer sync is in flight
    }
    if (!payload.ok) {
      this.modelError = {
        message: payload.error ?? 'the form state is not expressible',
        elementId: payload.elementId ?? null,
      };
      this.emit();
      return;
    }
    this.adopt(payload);
    await this.evaluate();
  }

  /** A completed text edit; on errors the graphical side stays frozen. */
  async editText(text: string): Promise<void> {
    const seq = ++this.syncSeq;
    this.draft.text = text;
    const payload = await this.api.parse(text);
    if (seq !== this.syncSeq) {
      return;
    }
    if (!payload.ok) {
      this.diagnostics = payload.diagnostics;
      this.resultsStale = true;
      this.emit();
      return;
    }
    this.adopt(payload);
    await this.evaluate();
  }

  private adopt(payload: SyncPayload): void {
    const metadata = {
      title: this.draft.title,
      description: this.draft.description,
      tags: this.draft.tags,
      fileFilter: this.draft.fileFilter,
    };
    const model = payload.model!;
    model.title = metadata.title;
    model.description = metadata.description;
    model.tags = metadata.tags;
    model.fileFilter = metadata.fileFilter;
    this.draft.model = model;
    this.draft.text = payload.text ?? payload.canonicalText ?? this.draft.text;
    this.tokenMap = payload.tokenMap ?? [];
    this.diagnostics = [];
    this.modelError = null;
    this.emit();
  }

  async evaluate(): Promise<void> {
    if (!this.draft.text) {
      this.results = null;
      this.emit();
      return;
    }
    const seq = ++this.evalSeq;
    const response = await this.api.evaluateText(this.draft.text, this.draft.fileFilter);
    if (seq !== this.evalSeq) {
      return;
    }
    if (response.status === 'ok' && response.result) {
      this.results = response.result;
      this.resultsStale = false;
    } else {
      this.results = null;
      this.diagnostics = response.diagnostics ?? this.diagnostics;
    }
    this.emit();
  }

  /** The graphical element to highlight for a cursor position in the text. */
  elementAt(offset: number): string | null {
    for (const link of this.tokenMap) {
      if (link.start <= offset && offset < link.end) {
        return link.id;
      }
    }
    return null;
  }

  /** Persist the draft as a rule record. */
  async save(id: string): Promise<void> {
    const body = {
      id,
      title: this.draft.title,
      description: this.draft.description,
      tags: this.draft.tags,
      fileFilter: this.draft.fileFilter,
      ruleText: this.draft.text,
      modelSnapshot: this.draft.model,
    };
    const existing = await this.api.listRules();
    if (existing.rules.some((r) => r.id === id)) {
      await this.api.updateRule(id, body);
    } else {
      await this.api.createRule(body);
    }
  }
}
