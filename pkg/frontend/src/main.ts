import { ApiClient } from './api.js';
import { EditorSession } from './session.js';
import { App } from './ui.js';

const params = new URLSearchParams(window.location.search);
const base =
  params.get('api') ??
  (window.location.pathname.startsWith('/ui') ? '' : 'http://127.0.0.1:8765');

const api = new ApiClient(base);
const session = new EditorSession(api);
const root = document.getElementById('app');
if (!root) {
  throw new Error('missing #app container');
}
const app = new App(session, root);
void app.start();
