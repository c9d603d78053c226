/**
 * DOM rendering for the authoring surface: metadata form, dynamic guide,
 * the structured (graphical) editor with progressive disclosure and
 * constraint/star controls, the textual editor with completions and
 * diagnostics, and the matches/violations panel.
 */

import { Diagnostic, GuiElement, ProjectFile, Suggestion } from './api.js';
import { countMatches } from './filters.js';
import { EditorSession, walk } from './session.js';

const STRUCTURAL_ADDABLE: Record<string, string[]> = {
  class: ['declaration statement', 'function', 'abstract function', 'constructor', 'class'],
  function: ['parameter'],
  'abstract function': ['parameter'],
  constructor: ['parameter'],
};

const VISIBILITY_OPTIONS = ['', 'public', 'private', 'protected'];
const SPECIFIER_OPTIONS = ['', 'static', 'final', 'abstract', 'synchronized', 'static&&final'];

function h<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const el = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) {
    if (k === 'class') {
      el.className = v;
    } else {
      el.setAttribute(k, v);
    }
  }
  el.append(...children);
  return el;
}

export class App {
  private highlightedId: string | null = null;
  private suggestions: Suggestion[] = [];
  private projectPaths: string[] = [];
  private textDirty = false;

  constructor(
    readonly session: EditorSession,
    readonly rootEl: HTMLElement,
  ) {
    session.onChange(() => this.render());
  }

  async start(): Promise<void> {
    const files = await this.session.api.projectFiles();
    this.projectPaths = files.files.map((f) => f.path);
    await this.session.init();
    this.startEventLoop();
  }

  private async startEventLoop(): Promise<void> {
    let since = 0;
    for (;;) {
      try {
        const out = await this.session.api.events(since, 20);
        if (out.seq > since && out.events.some((e) => e.type === 'results-changed')) {
          await this.session.evaluate();
        }
        since = out.seq;
      } catch {
        await new Promise((r) => setTimeout(r, 2000));
      }
    }
  }

  // ---- rendering

  render(): void {
    this.rootEl.replaceChildren(
      this.renderMetadata(),
      this.renderGuide(),
      h(
        'div',
        { class: 'editors' },
        this.renderGraphical(),
        this.renderTextual(),
      ),
      this.renderResults(),
    );
  }

  private renderMetadata(): HTMLElement {
    const d = this.session.draft;
    const title = h('input', { class: 'meta-title', placeholder: 'Rule title' });
    title.value = d.title;
    title.oninput = () => (d.title = title.value);
    const description = h('textarea', {
      class: 'meta-description',
      placeholder: 'Why does this rule exist?',
    });
    description.value = d.description;
    description.oninput = () => (d.description = description.value);
    const tags = h('input', { class: 'meta-tags', placeholder: 'tags, comma separated' });
    tags.value = d.tags.join(', ');
    tags.onchange = () =>
      (d.tags = tags.value.split(',').map((t) => t.trim()).filter(Boolean));
    const filter = h('input', {
      class: 'meta-filter',
      placeholder: 'apply to paths (prefix or glob)',
    });
    filter.value = d.fileFilter.include.join(' ');
    const filterCount = h('span', { class: 'filter-count' });
    const updateCount = () => {
      const includes = filter.value.split(/\s+/).filter(Boolean);
      const matched = includes.length
        ? this.projectPaths.filter((p) => includes.some((i) => countMatches(i, [p]) > 0))
        : this.projectPaths;
      filterCount.textContent = `${matched.length} file(s) match`;
      filterCount.classList.toggle('zero', matched.length === 0);
    };
    updateCount();
    filter.oninput = updateCount;
    filter.onchange = () =>
      void this.session.setFileFilter(filter.value.split(/\s+/).filter(Boolean));
    const clear = h('button', { class: 'clear-form' }, 'Clear Form');
    clear.onclick = () => void this.session.clearForm();
    const save = h('button', { class: 'save-rule' }, 'Save Rule');
    save.onclick = () => {
      const id = prompt('Rule id?', d.title.toLowerCase().replace(/\W+/g, '-'));
      if (id) {
        void this.session.save(id);
      }
    };
    return h(
      'section',
      { class: 'metadata' },
      title,
      description,
      tags,
      h('div', { class: 'filter-row' }, filter, filterCount),
      h('div', { class: 'actions' }, clear, save),
    );
  }

  private renderGuide(): HTMLElement {
    const guide = this.session.guide();
    const steps: [string, boolean][] = [
      ['Describe the code the rule applies to in the form below.', guide.step1Done],
      ['Mark what matched code must have using the constraint checkboxes.', guide.step2Done],
      ["Review the connectives: edit 'and'/'or' in the rule text if needed.", true],
    ];
    return h(
      'section',
      { class: 'guide' },
      ...steps.map(([label, done], i) =>
        h(
          'div',
          {
            class: `guide-step${i + 1 === guide.currentStep ? ' current' : ''}${
              done && i + 1 < guide.currentStep ? ' done' : ''
            }`,
          },
          `${i + 1}. ${label}`,
        ),
      ),
    );
  }

  private renderGraphical(): HTMLElement {
    const model = this.session.draft.model;
    const panel = h('section', { class: 'graphical' });
    if (!model) {
      return panel;
    }
    panel.append(this.renderElement(model.root));
    if (this.session.modelError) {
      panel.append(h('div', { class: 'model-error' }, this.session.modelError.message));
    }
    return panel;
  }

  private renderElement(el: GuiElement): HTMLElement {
    const model = this.session.draft.model!;
    const box = h('div', {
      class: [
        'element',
        `kind-${el.kind.replace(/\s+/g, '-')}`,
        `state-${el.state}`,
        el.constraintFlag && el.state === 'active' ? 'constrained' : '',
        this.highlightedId === el.id ? 'linked' : '',
        this.session.modelError?.elementId === el.id ? 'errored' : '',
      ]
        .filter(Boolean)
        .join(' '),
      'data-id': el.id,
    });
    const header = h('div', { class: 'element-header' });
    if (el.kind !== 'group') {
      header.append(h('span', { class: 'element-kind' }, el.kind));
    } else {
      header.append(h('span', { class: 'element-kind' }, '( group )'));
    }
    if (el.eoiEligible) {
      const isEoi = model.eoiId === el.id;
      const star = h('button', { class: `star ${isEoi ? 'gold' : 'grey'}` }, isEoi ? '★' : '☆');
      star.title = 'Set as the element of interest';
      star.onclick = () => void this.session.setEoi(el.id);
      header.append(star);
    }
    if (el.kind !== 'group') {
      const constraint = h('input', { type: 'checkbox', class: 'constraint-box' });
      (constraint as HTMLInputElement).checked = el.constraintFlag;
      constraint.title = 'Treat as a constraint';
      constraint.onchange = () =>
        void this.session.toggleConstraint(el.id, (constraint as HTMLInputElement).checked);
      header.append(h('label', { class: 'constraint-label' }, constraint, 'constraint'));
    }
    box.append(header);
    box.append(...this.renderValueInput(el));
    if (el.children.length > 1) {
      const connective = h('select', { class: 'connective' });
      for (const op of ['and', 'or']) {
        const opt = h('option', { value: op }, op);
        if (el.connective === op) {
          opt.setAttribute('selected', 'selected');
        }
        connective.append(opt);
      }
      connective.onchange = () =>
        void this.session.setConnective(el.id, (connective as HTMLSelectElement).value as 'and' | 'or');
      box.append(h('div', { class: 'connective-row' }, 'join conditions with ', connective));
    }
    for (const child of el.children) {
      box.append(this.renderElement(child));
    }
    for (const kind of STRUCTURAL_ADDABLE[el.kind] ?? []) {
      const add = h('button', { class: 'add-element' }, `Add ${kind}`);
      add.onclick = () => alert('adding repeated elements is available through text editing');
      box.append(add);
    }
    return box;
  }

  private renderValueInput(el: GuiElement): HTMLElement[] {
    const valueKinds: Record<string, 'dropdown-vis' | 'dropdown-spec' | 'text'> = {
      visibility: 'dropdown-vis',
      specifier: 'dropdown-spec',
      name: 'text',
      type: 'text',
      extension: 'text',
      implementation: 'text',
      annotation: 'text',
      'initial value': 'text',
      'return value': 'text',
      'expression statement': 'text',
    };
    const style = valueKinds[el.kind];
    if (!style) {
      return [];
    }
    if (style === 'text') {
      const input = h('input', { class: 'value-input', placeholder: `${el.kind} value` });
      input.value = el.valueText ?? '';
      input.onchange = () => void this.session.setValue(el.id, input.value);
      return [input];
    }
    const options = style === 'dropdown-vis' ? VISIBILITY_OPTIONS : SPECIFIER_OPTIONS;
    const select = h('select', { class: 'value-input' });
    for (const option of options) {
      const opt = h('option', { value: option }, option || '(any)');
      if ((el.valueText ?? '') === option) {
        opt.setAttribute('selected', 'selected');
      }
      select.append(opt);
    }
    select.onchange = () => void this.session.setValue(el.id, (select as HTMLSelectElement).value);
    return [select];
  }

  private renderTextual(): HTMLElement {
    const textarea = h('textarea', {
      class: 'rule-text',
      spellcheck: 'false',
      placeholder: 'class must have ...',
    });
    textarea.value = this.session.draft.text;
    let debounce: ReturnType<typeof setTimeout> | null = null;
    textarea.oninput = () => {
      this.textDirty = true;
      if (debounce) {
        clearTimeout(debounce);
      }
      debounce = setTimeout(() => {
        this.textDirty = false;
        void this.session.editText(textarea.value);
      }, 350);
      void this.updateSuggestions(textarea);
    };
    textarea.onmousemove = async (ev) => {
      const offset = this.offsetFromPoint(textarea, ev);
      this.setHighlight(offset === null ? null : this.session.elementAt(offset));
      if (offset !== null) {
        const { doc } = await this.session.api.hover(textarea.value, offset);
        const el = document.querySelector('.hover-doc');
        if (el) {
          el.textContent = doc ? `${doc.term}: ${doc.description}` : '';
        }
      }
    };
    const diagnostics = h('div', { class: 'diagnostics' });
    for (const d of this.session.diagnostics) {
      diagnostics.append(
        h('div', { class: `diagnostic ${d.severity}` }, `${d.severity}: ${d.message}`),
      );
    }
    const suggestionBox = h('div', { class: 'suggestions' });
    for (const s of this.suggestions) {
      const item = h('button', { class: 'suggestion' }, s.token);
      item.title = `${s.doc}\n${s.example}`;
      item.onclick = () => {
        textarea.value = `${textarea.value.replace(/\s+$/, '')} ${s.token === '"..."' ? '""' : s.token} `;
        void this.session.editText(textarea.value);
      };
      suggestionBox.append(item);
    }
    return h(
      'section',
      { class: 'textual' },
      textarea,
      suggestionBox,
      h('div', { class: 'hover-doc' }),
      diagnostics,
    );
  }

  private async updateSuggestions(textarea: HTMLTextAreaElement): Promise<void> {
    const { suggestions } = await this.session.api.complete(
      textarea.value,
      textarea.selectionStart ?? textarea.value.length,
    );
    this.suggestions = suggestions;
    const box = this.rootEl.querySelector('.suggestions');
    if (box) {
      const fresh = this.renderTextual().querySelector('.suggestions')!;
      box.replaceWith(fresh);
    }
  }

  private offsetFromPoint(textarea: HTMLTextAreaElement, ev: MouseEvent): number | null {
    // monospace approximation: derive the character offset from the mouse
    // position; good enough for hover links
    const style = getComputedStyle(textarea);
    const charW = parseFloat(style.fontSize) * 0.6;
    const lineH = parseFloat(style.lineHeight) || parseFloat(style.fontSize) * 1.4;
    const rect = textarea.getBoundingClientRect();
    const col = Math.floor((ev.clientX - rect.left - 8) / charW);
    const row = Math.floor((ev.clientY - rect.top - 8) / lineH);
    const lines = textarea.value.split('\n');
    if (row < 0 || row >= lines.length || col < 0) {
      return null;
    }
    const line = lines[row]!;
    if (col >= line.length) {
      return null;
    }
    return lines.slice(0, row).reduce((n, l) => n + l.length + 1, 0) + col;
  }

  private setHighlight(id: string | null): void {
    if (id === this.highlightedId) {
      return;
    }
    this.highlightedId = id;
    for (const el of this.rootEl.querySelectorAll('.element.linked')) {
      el.classList.remove('linked');
    }
    if (id) {
      this.rootEl.querySelector(`.element[data-id="${CSS.escape(id)}"]`)?.classList.add('linked');
    }
  }

  private renderResults(): HTMLElement {
    const results = this.session.results;
    const panel = h('section', { class: 'results' });
    if (!results) {
      panel.append(h('div', { class: 'results-empty' }, 'No evaluation yet.'));
      return panel;
    }
    if (results.filterMatchedZero) {
      panel.append(
        h(
          'div',
          { class: 'banner warning' },
          'The file filter matched no files: check the paths above.',
        ),
      );
    }
    const render = (title: string, records: typeof results.satisfied, cls: string) =>
      h(
        'div',
        { class: `result-list ${cls}` },
        h('h3', {}, `${title} (${records.length})`),
        ...records.map((m) =>
          h(
            'div',
            { class: 'match' },
            h('span', { class: 'loc' }, `${m.span.file}:${m.span.startLine}`),
            h('pre', {}, m.snippetText.split('\n')[0] ?? ''),
          ),
        ),
      );
    panel.append(
      render('Satisfied', results.satisfied, 'satisfied'),
      render('Violations', results.violated, 'violated'),
    );
    return panel;
  }
}
