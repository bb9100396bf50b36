/**
 * Browser shell: wires a real WebSocket to the client, renders the canvas,
 * header strips, task board, toolbar, and reconnect banner into the page,
 * and translates DOM gestures into engine commands.
 *
 * All document logic lives in the imported modules; this file is the thin
 * layer that cannot run under the test runner (it needs a browser).
 */

import { PolymindClient } from './client.js';
import type { TaskDraft } from './board.js';
import {
  confirmDelegation,
  editPrompt,
  startDelegation,
  switchPromptVariant,
  taskCards,
  toggleInitiative,
  toggleVisibility,
  deleteTask,
} from './board.js';
import { HoverTracker, headerView, labelClick, labelControlClick } from './headers.js';
import type { NodeKind } from './protocol.js';
import { renderScene } from './scene.js';
import { renderHeader, renderSvg, escapeXml } from './render.js';

const WS_URL =
  new URLSearchParams(location.search).get('ws') ??
  `ws://${location.host || 'localhost:8787'}/ws`;

const client = new PolymindClient((handlers) => {
  const socket = new WebSocket(WS_URL);
  socket.onmessage = (event) => handlers.onMessage(String(event.data));
  socket.onclose = () => handlers.onClose();
  return {
    send: (text) => socket.send(text),
    close: () => socket.close(),
  };
});

const canvasHost = document.getElementById('canvas') as HTMLElement;
const headersHost = document.getElementById('headers') as HTMLElement;
const boardHost = document.getElementById('board') as HTMLElement;
const bannerHost = document.getElementById('banner') as HTMLElement;
const toastHost = document.getElementById('toasts') as HTMLElement;

const hoverTrackers = new Map<string, HoverTracker>();
const nowSeconds = () => performance.now() / 1000;
let pendingDraft: TaskDraft | null = null;

function send(cmd: string, args: Record<string, unknown>): void {
  client.command(cmd, args).catch(() => {
    // Rejections surface as toasts; nothing else to do here.
  });
}

function hoverTracker(key: string): HoverTracker {
  let tracker = hoverTrackers.get(key);
  if (!tracker) {
    tracker = new HoverTracker(client.store.config?.hover_summary_seconds ?? 1.5);
    hoverTrackers.set(key, tracker);
  }
  return tracker;
}

function renderBoard(): string {
  const cards = taskCards(client.store)
    .map((card) => {
      const prompts = card.prompts
        .map(
          (p, i) =>
            `<li class="${i === card.activePrompt ? 'active' : ''}">` +
            `<button class="variant" data-task="${card.taskId}" data-index="${i}">` +
            `${escapeXml(p.label)}</button> <code>${escapeXml(p.template)}</code></li>`,
        )
        .join('');
      return (
        `<article class="card" style="border-color:${escapeXml(card.color)}">` +
        `<h3>${escapeXml(card.name)}</h3>` +
        `<p>${card.inputType} → ${card.outputType}</p>` +
        `<label><input type="checkbox" class="visible" data-task="${card.taskId}"` +
        `${card.visible ? ' checked' : ''}/> visible</label>` +
        `<button class="initiative" data-task="${card.taskId}">${card.initiative}</button>` +
        `<button class="delete" data-task="${card.taskId}">delete</button>` +
        `<ul class="prompts">${prompts}</ul></article>`
      );
    })
    .join('');
  return `${cards}<button id="add-card">+ add microtask</button>`;
}

function redraw(): void {
  bannerHost.hidden = client.live;
  bannerHost.textContent = client.live
    ? ''
    : `connection ${client.status}; the canvas is read-only until resync`;
  canvasHost.innerHTML = renderSvg(renderScene(client.store));
  const headers = [...client.store.nodes.keys(), ...client.store.sections.keys()]
    .map((elementId) =>
      renderHeader(headerView(client.store, elementId), (taskId) =>
        hoverTracker(`${elementId}:${taskId}`).detail(nowSeconds()),
      ),
    )
    .join('');
  headersHost.innerHTML = headers;
  boardHost.innerHTML = renderBoard();
  toastHost.innerHTML = client.toasts
    .slice(-3)
    .map((t) => `<div class="toast">${escapeXml(t)}</div>`)
    .join('');
}

client.onChange(redraw);
setInterval(redraw, 250); // advances hover tickers and curtain countdowns

// -- gesture wiring -----------------------------------------------------------

headersHost.addEventListener('click', (event) => {
  const target = event.target as HTMLElement;
  const header = target.closest('.header') as HTMLElement | null;
  const elementId = header?.dataset['element'];
  const taskId = (target.closest('[data-task]') as HTMLElement | null)?.dataset['task'];
  if (!elementId || !taskId) return;
  if (target.classList.contains('expand')) {
    send('expand', { node_id: elementId, task_id: taskId });
    return;
  }
  const gesture = event.ctrlKey
    ? labelControlClick(client.store, elementId, taskId)
    : labelClick(client.store, elementId, taskId);
  if (gesture) send(gesture.cmd, gesture.args);
});

headersHost.addEventListener('mouseover', (event) => {
  const target = event.target as HTMLElement;
  const preview = target.closest('.preview') as HTMLElement | null;
  const header = target.closest('.header') as HTMLElement | null;
  if (!preview || !header) return;
  const key = `${header.dataset['element']}:${preview.dataset['task']}`;
  hoverTracker(key).enter(nowSeconds());
});

headersHost.addEventListener('mouseout', (event) => {
  const target = event.target as HTMLElement;
  const preview = target.closest('.preview') as HTMLElement | null;
  const header = target.closest('.header') as HTMLElement | null;
  if (!preview || !header) return;
  hoverTracker(`${header.dataset['element']}:${preview.dataset['task']}`).leave();
});

boardHost.addEventListener('click', (event) => {
  const target = event.target as HTMLElement;
  const taskId = target.dataset['task'];
  if (target.id === 'add-card') {
    const hint = prompt('Name for the new microtask?') ?? undefined;
    client
      .command(startDelegation(hint).cmd, startDelegation(hint).args)
      .then((result) => {
        pendingDraft = (result as { draft: TaskDraft }).draft;
        const confirmed = confirmDelegation(pendingDraft);
        if (confirmed.command) send(confirmed.command.cmd, confirmed.command.args);
        pendingDraft = null;
      })
      .catch(() => {});
    return;
  }
  if (!taskId) return;
  if (target.classList.contains('visible')) {
    const gesture = toggleVisibility(client.store, taskId);
    if (gesture) send(gesture.cmd, gesture.args);
  } else if (target.classList.contains('initiative')) {
    const gesture = toggleInitiative(client.store, taskId);
    if (gesture) send(gesture.cmd, gesture.args);
  } else if (target.classList.contains('delete')) {
    const gesture = deleteTask(confirm('Delete this microtask?'), taskId);
    if (gesture) send(gesture.cmd, gesture.args);
  } else if (target.classList.contains('variant')) {
    const gesture = switchPromptVariant(client.store, taskId, Number(target.dataset['index']));
    if (gesture) send(gesture.cmd, gesture.args);
  }
});

boardHost.addEventListener('dblclick', (event) => {
  const target = event.target as HTMLElement;
  if (target.tagName !== 'CODE') return;
  const item = target.closest('li');
  const button = item?.querySelector('.variant') as HTMLElement | null;
  const taskId = button?.dataset['task'];
  const index = Number(button?.dataset['index']);
  if (!taskId) return;
  const template = prompt('Prompt template:', target.textContent ?? '');
  if (template === null) return;
  const label = button?.textContent ?? 'Prompt';
  const edit = editPrompt(client.store, taskId, index, label, template);
  if (edit.error) {
    client.toasts.push(edit.error);
    redraw();
  } else if (edit.command) {
    send(edit.command.cmd, edit.command.args);
  }
});

// Toolbar: drag a node kind onto the canvas to create it there.
document.querySelectorAll<HTMLElement>('#toolbar [data-kind]').forEach((button) => {
  button.draggable = true;
  button.addEventListener('dragstart', (event) => {
    event.dataTransfer?.setData('text/node-kind', button.dataset['kind'] ?? '');
  });
});

canvasHost.addEventListener('dragover', (event) => event.preventDefault());
canvasHost.addEventListener('drop', (event) => {
  event.preventDefault();
  const kind = event.dataTransfer?.getData('text/node-kind') as NodeKind | '';
  if (!kind) return;
  const rect = canvasHost.getBoundingClientRect();
  send('add_node', {
    kind,
    text: '',
    x: event.clientX - rect.left,
    y: event.clientY - rect.top,
  });
});

canvasHost.addEventListener('mousemove', (event) => {
  // Cursor previews are the one optimistic channel; throttled by redraw cadence.
  if (!client.live) return;
  const rect = canvasHost.getBoundingClientRect();
  lastCursor = { x: event.clientX - rect.left, y: event.clientY - rect.top };
});

let lastCursor: { x: number; y: number } | null = null;
setInterval(() => {
  if (lastCursor && client.live) {
    send('move_cursor', lastCursor);
    lastCursor = null;
  }
}, 1000);

client.connect();
