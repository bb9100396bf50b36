/**
 * String renderers: scene → SVG markup, header → label-strip markup.
 *
 * Pure functions of the view models, so tests can assert on markup without a
 * DOM and the shell can assign innerHTML. All text is escaped; visual
 * variation is carried by classes and a handful of inline attributes
 * (fill/stroke for task colors) rather than stylesheets baked in here.
 */

import type { HeaderView, PreviewDetail } from './headers.js';
import type { Scene, SceneEdge, SceneNode, SceneSection } from './scene.js';

export function escapeXml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;')
    .replace(/'/g, '&#39;');
}

const SOLID_FILL = '#ffffff';
const INK = '#1f2430';

function renderSection(section: SceneSection): string {
  return (
    `<g class="section" data-id="${escapeXml(section.id)}">` +
    `<rect x="${section.x}" y="${section.y}" width="${section.width}"` +
    ` height="${section.height}" class="section-rect"/>` +
    `<text x="${section.x + 8}" y="${section.y + 18}" class="section-title">` +
    `${escapeXml(section.title)}</text></g>`
  );
}

function renderEdge(edge: SceneEdge): string {
  const marker = edge.directed ? ' marker-end="url(#arrow)"' : '';
  return (
    `<line class="edge" data-id="${escapeXml(edge.id)}" x1="${edge.x1}"` +
    ` y1="${edge.y1}" x2="${edge.x2}" y2="${edge.y2}"${marker}/>`
  );
}

function nodeShapeMarkup(node: SceneNode): string {
  const fill = node.hollow ? 'none' : SOLID_FILL;
  const stroke = node.hollow && node.borderColor ? node.borderColor : INK;
  switch (node.shape) {
    case 'ellipse': {
      const cx = node.x + node.width / 2;
      const cy = node.y + node.height / 2;
      return (
        `<ellipse cx="${cx}" cy="${cy}" rx="${node.width / 2}"` +
        ` ry="${node.height / 2}" fill="${fill}" stroke="${stroke}"/>`
      );
    }
    case 'note':
      return (
        `<rect x="${node.x}" y="${node.y}" width="${node.width}"` +
        ` height="${node.height}" fill="${fill}" stroke="${stroke}"/>`
      );
    case 'label':
      return (
        `<rect x="${node.x}" y="${node.y}" width="${node.width}"` +
        ` height="${node.height}" rx="${node.height / 2}"` +
        ` fill="${fill}" stroke="${stroke}"/>`
      );
  }
}

function renderNode(node: SceneNode): string {
  const classes = ['node', `node-${node.shape}`];
  if (node.hollow) classes.push('hollow');
  const tx = node.x + node.width / 2;
  const ty = node.y + node.height / 2;
  return (
    `<g class="${classes.join(' ')}" data-id="${escapeXml(node.id)}">` +
    nodeShapeMarkup(node) +
    `<text x="${tx}" y="${ty}" text-anchor="middle">${escapeXml(node.text)}</text>` +
    `</g>`
  );
}

/** Render a scene as a standalone SVG element (sections under edges under
 * nodes, matching hit-test order in the shell). */
export function renderSvg(scene: Scene, width = 1600, height = 1000): string {
  const defs =
    '<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5"' +
    ' markerWidth="7" markerHeight="7" orient="auto-start-reverse">' +
    '<path d="M 0 0 L 10 5 L 0 10 z"/></marker></defs>';
  const body = [
    ...scene.sections.map(renderSection),
    ...scene.edges.map(renderEdge),
    ...scene.nodes.map(renderNode),
  ].join('');
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}"` +
    ` height="${height}" viewBox="0 0 ${width} ${height}">${defs}${body}</svg>`
  );
}

/** Render one element's header strip: colored labels (underline on display,
 * black once a reactive result is ready), the red unread dot, curtains with
 * their key points, and the unread preview panel. `previewDetail` selects
 * key point vs. ticker summary per the hover tracker. */
export function renderHeader(
  view: HeaderView,
  previewDetail: (taskId: string) => PreviewDetail = () => 'key_point',
): string {
  const labels = view.labels
    .map((label) => {
      const classes = ['label', `mode-${label.mode}`];
      if (label.underlined) classes.push('underlined');
      if (label.busy) classes.push('busy');
      if (label.ready) classes.push('ready');
      const color = label.mode === 'reactive' && !label.ready ? '#8a8f98' : label.color;
      return (
        `<span class="${classes.join(' ')}" data-task="${escapeXml(label.taskId)}"` +
        ` style="border-color:${escapeXml(label.color)};color:${escapeXml(color)}">` +
        `${escapeXml(label.name)}</span>`
      );
    })
    .join('');
  const dot = view.unreadDot ? '<span class="unread-dot"></span>' : '';
  const curtains = view.curtains
    .map(
      (curtain) =>
        `<div class="curtain" data-task="${escapeXml(curtain.taskId)}"` +
        ` style="border-color:${escapeXml(curtain.color)}">` +
        `<span class="key-point">${escapeXml(curtain.keyPoint)}</span>` +
        `<button class="expand" data-task="${escapeXml(curtain.taskId)}">+</button></div>`,
    )
    .join('');
  const previews = view.previews
    .map((entry) => {
      const detail = previewDetail(entry.taskId);
      const text = detail === 'summary' ? entry.summary : entry.keyPoint;
      return (
        `<div class="preview detail-${detail}" data-task="${escapeXml(entry.taskId)}"` +
        ` style="border-color:${escapeXml(entry.color)}">` +
        `<span class="preview-name">${escapeXml(entry.name)}</span>` +
        `<span class="preview-text">${escapeXml(text)}</span></div>`
      );
    })
    .join('');
  const expandAll = view.showExpandAll
    ? '<button class="expand-all">expand all</button>'
    : '';
  const closeAll = view.showCloseAll
    ? '<button class="close-all">close all</button>'
    : '';
  return (
    `<div class="header" data-element="${escapeXml(view.elementId)}">` +
    `${dot}${labels}${expandAll}${closeAll}${curtains}` +
    (previews ? `<div class="previews">${previews}</div>` : '') +
    `</div>`
  );
}
