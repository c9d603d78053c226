/**
 * End-to-end tests against a live service on the desk corpus: the full
 * authoring walkthrough (graphical authoring, textual and→or edit,
 * pattern extension, shrinking violations), editor↔form highlighting,
 * and star toggling. The expected violation counts are frozen from the
 * brute-force oracle over the same corpus (see the engine's
 * TestWalkthroughDeltas).
 */

import { spawn, ChildProcess } from 'node:child_process';
import { cpSync, mkdtempSync, rmSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { dirname, join, resolve } from 'node:path';
import { fileURLToPath } from 'node:url';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { ApiClient, GuiElement } from '../src/api.js';
import { EditorSession, childOfKind, findElement, walk } from '../src/session.js';
import { countMatches } from '../src/filters.js';

const PORT = 8917;
const BASE = `http://127.0.0.1:${PORT}`;

let service: ChildProcess;
let workDir: string;
const api = new ApiClient(BASE);

async function waitForHealth(timeoutMs = 30000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    try {
      await api.health();
      return;
    } catch {
      if (Date.now() > deadline) {
        throw new Error('service did not come up');
      }
      await new Promise((r) => setTimeout(r, 200));
    }
  }
}

const HERE = dirname(fileURLToPath(import.meta.url));

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), 'rulekit-ui-'));
  const corpus = resolve(HERE, '../../tests/fixtures/bankapp');
  cpSync(join(corpus, 'src'), join(workDir, 'src'), { recursive: true });
  writeFileSync(join(workDir, 'design-rules.json'), JSON.stringify({ schemaVersion: 1, rules: [] }));
  service = spawn(
    'python3',
    [
      '-m',
      'rulekit.cli',
      'serve',
      '--port',
      String(PORT),
      '--project',
      workDir,
      '--rules',
      join(workDir, 'design-rules.json'),
    ],
    { stdio: 'ignore' },
  );
  await waitForHealth();
}, 40000);

afterAll(() => {
  service?.kill();
  rmSync(workDir, { recursive: true, force: true });
});

function mustFind(root: GuiElement, pred: (el: GuiElement) => boolean): GuiElement {
  const hit = walk(root).find(pred);
  if (!hit) {
    throw new Error('element not found');
  }
  return hit;
}

describe('authoring walkthrough (graphical → textual → graphical)', () => {
  it('reproduces the public-class getter scenario with shrinking violations', async () => {
    const session = new EditorSession(api);
    await session.init();
    expect(session.guide().currentStep).toBe(1);

    // after each successful sync the session adopts the service's
    // normalized model, so elements are re-queried from the live draft
    const liveRoot = () => session.draft.model!.root;
    const live = (pred: (el: GuiElement) => boolean) => mustFind(liveRoot(), pred);

    // step 1: describe the code — a public class with a void getter-ish fn
    await session.setValue(childOfKind(liveRoot(), 'visibility')!.id, 'public');
    expect(session.guide().currentStep).toBe(2);

    const fn = childOfKind(liveRoot(), 'function')!;
    await session.setValue(childOfKind(fn, 'type')!.id, 'void');
    await session.setValue(
      childOfKind(fn, 'name')!.id,
      'get...||search...||find...',
    );

    // step 2: mark the function's name and type as constraints (the form
    // keeps clause order, so this yields the type-first published text)
    await session.toggleConstraint(
      live((el) => el.kind === 'name' && el.state === 'active').id,
      true,
    );
    await session.toggleConstraint(
      live((el) => el.kind === 'type' && el.state === 'active').id,
      true,
    );
    expect(session.guide().currentStep).toBe(3);

    // quantify over classes, as in the published walkthrough text
    await session.setEoi(liveRoot().id);
    expect(session.draft.text).toBe(
      'class with visibility "public" must have function with type "void" and name "get...||search...||find..."',
    );
    expect(session.results?.violated).toHaveLength(11);

    // step 3: the conjunction is wrong; edit and → or in the text editor
    await session.editText(session.draft.text.replace('"void" and name', '"void" or name'));
    expect(session.draft.text).toBe(
      'class with visibility "public" must have function with type "void" or name "get...||search...||find..."',
    );
    expect(session.results?.violated).toHaveLength(2);
    const files2 = session.results!.violated.map((m) => m.span.file.split('/').pop());
    expect(files2).toContain('AuthController.java');

    // widen the accepted names back in the form: login and make…
    const nameEl = mustFind(
      session.draft.model!.root,
      (el) => el.kind === 'name' && el.valueText === 'get...||search...||find...',
    );
    await session.setValue(nameEl.id, 'get...||search...||find...||login||make...');
    expect(session.draft.text).toBe(
      'class with visibility "public" must have function with type "void" or name "get...||search...||find...||login||make..."',
    );
    expect(session.results?.violated).toHaveLength(1);
    expect(session.results!.violated[0]!.span.file).toBe('src/com/bank/model/Transaction.java');
    expect(session.results!.satisfied).toHaveLength(10);
  }, 30000);

  it('keeps the model frozen while the text is invalid', async () => {
    const session = new EditorSession(api);
    await session.init();
    await session.editText('class with visibility "public" must have function with name "get..."');
    const frozen = session.draft.model!;
    await session.editText('class with visibility "public" must have must');
    expect(session.diagnostics.length).toBeGreaterThan(0);
    expect(session.diagnostics[0]!.message).toContain("only one 'must'");
    expect(session.draft.model).toBe(frozen);
    expect(session.resultsStale).toBe(true);
  });
});

describe('editor linking and element of interest', () => {
  it('maps every element name in the text to exactly one form element', async () => {
    const session = new EditorSession(api);
    await session.init();
    const text = 'function of class with visibility "public" must have name "get..."';
    await session.editText(text);
    expect(session.tokenMap.length).toBe(4);
    const words = session.tokenMap.map((l) => text.slice(l.start, l.end));
    expect(words).toEqual(['function', 'class', 'visibility', 'name']);
    const seen = new Set<string>();
    for (const link of session.tokenMap) {
      const id = session.elementAt(link.start + 1);
      expect(id).toBe(link.id);
      expect(findElement(session.draft.model!.root, id!)).toBeTruthy();
      expect(seen.has(id!)).toBe(false);
      seen.add(id!);
    }
    // a literal has no link
    expect(session.elementAt(text.indexOf('"public"') + 2)).toBeNull();
  });

  it('star toggling rewrites the head token both ways', async () => {
    const session = new EditorSession(api);
    await session.init();
    await session.editText('function of class with visibility "public" must have name "get..."');
    expect(session.draft.text.split(' ')[0]).toBe('function');
    const classEl = session.draft.model!.root;
    expect(classEl.eoiEligible).toBe(true);
    await session.setEoi(classEl.id);
    expect(session.draft.text.split(' ')[0]).toBe('class');
    expect(session.draft.text).toBe(
      'class with visibility "public" must have function with name "get..."',
    );
    const fnEl = mustFind(
      session.draft.model!.root,
      (el) => el.kind === 'function' && el.state === 'active',
    );
    await session.setEoi(fnEl.id);
    expect(session.draft.text.split(' ')[0]).toBe('function');
  });
});

describe('results panel data', () => {
  it('flags zero-match filters instead of silently showing nothing', async () => {
    const session = new EditorSession(api);
    await session.init();
    await session.editText('class must have function with name "get..."');
    expect(session.results?.filterMatchedZero).toBe(false);
    await session.setFileFilter(['no/such/path']);
    expect(session.results?.filterMatchedZero).toBe(true);
    expect(session.results?.satisfied).toHaveLength(0);
    await session.setFileFilter(['src/com/bank/model']);
    expect(session.results?.filterMatchedZero).toBe(false);
    expect(session.results!.filesConsidered).toBe(3);
  });

  it('clear form returns to the blank template', async () => {
    const session = new EditorSession(api);
    await session.init();
    await session.editText('class must have function');
    expect(session.results).not.toBeNull();
    await session.clearForm();
    expect(session.draft.text).toBe('');
    expect(session.results).toBeNull();
    expect(walk(session.draft.model!.root).every((e) => e.state === 'inactive')).toBe(true);
    expect(session.guide().currentStep).toBe(1);
  });

  it('saved rules round-trip through the service', async () => {
    const session = new EditorSession(api);
    await session.init();
    session.draft.title = 'Getters on public classes';
    await session.editText('class with visibility "public" must have function with name "get..."');
    await session.save('public-getters');
    const listed = await api.listRules();
    const record = listed.rules.find((r) => r.id === 'public-getters');
    expect(record?.ruleText).toBe(
      'class with visibility "public" must have function with name "get..."',
    );
    const result = await api.evaluateRule('public-getters');
    expect(result.status).toBe('ok');
    await api.deleteRule('public-getters');
  });
});

describe('filter match counting (form hint)', () => {
  it('counts prefix and glob includes like the service', () => {
    const paths = [
      'src/com/bank/model/Account.java',
      'src/com/bank/model/Customer.java',
      'src/com/bank/view/ConsoleView.java',
    ];
    expect(countMatches('src/com/bank/model', paths)).toBe(2);
    expect(countMatches('src/**/view/**', paths)).toBe(1);
    expect(countMatches('src/*/bank/model/*.java', paths)).toBe(2);
    expect(countMatches('src/*/model/*.java', paths)).toBe(0); // * stays in-segment
    expect(countMatches('bogus', paths)).toBe(0);
    expect(countMatches('', paths)).toBe(3);
  });
});
