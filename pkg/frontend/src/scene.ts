/**
 * Canvas scene projection: turns the document store into a flat draw list.
 *
 * Layout is the engine's; this module never moves anything. It decides only
 * presentation: which shape a node takes, hollow-vs-solid fill for generated
 * candidates, task-colored borders, which candidates an invisible task hides,
 * and the display height of sticky notes (which grow vertically to fit their
 * text while keywords and concepts keep fixed heights).
 */

import type { NodeKind } from './protocol.js';
import { DocumentStore } from './store.js';

export type NodeShape = 'label' | 'ellipse' | 'note';

export interface SceneNode {
  id: string;
  shape: NodeShape;
  kind: NodeKind;
  text: string;
  x: number;
  y: number;
  width: number;
  height: number;
  /** Generated and not yet accepted: unfilled, border in the task's color. */
  hollow: boolean;
  borderColor: string | null;
}

export interface SceneEdge {
  id: string;
  fromId: string;
  toId: string;
  directed: boolean;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

export interface SceneSection {
  id: string;
  title: string;
  x: number;
  y: number;
  width: number;
  height: number;
}

export interface Scene {
  sections: SceneSection[];
  nodes: SceneNode[];
  edges: SceneEdge[];
}

const SHAPES: Record<NodeKind, NodeShape> = {
  keyword: 'label',
  concept: 'ellipse',
  sticky_note: 'note',
};

// Sticky-note text metrics: a fixed-pitch estimate good enough for layout.
const NOTE_PADDING = 10;
const NOTE_CHAR_WIDTH = 7.2;
const NOTE_LINE_HEIGHT = 18;

/** Display height of a sticky note: enough lines to fit the text at the
 * note's width, never less than the stored height. Pure and deterministic. */
export function stickyNoteHeight(
  text: string,
  width: number,
  storedHeight: number,
): number {
  const columns = Math.max(1, Math.floor((width - 2 * NOTE_PADDING) / NOTE_CHAR_WIDTH));
  let lines = 0;
  for (const hardLine of text.split('\n')) {
    lines += Math.max(1, Math.ceil(hardLine.length / columns));
  }
  const needed = lines * NOTE_LINE_HEIGHT + 2 * NOTE_PADDING;
  return Math.max(storedHeight, needed);
}

/** Render the store into a draw list. Candidates of an invisible task are
 * omitted (accepted nodes always stay); edges render only between shown
 * endpoints, as center-to-center lines, arrowheads on directed ones. */
export function renderScene(store: DocumentStore): Scene {
  const sections: SceneSection[] = [...store.sections.values()].map((s) => ({
    id: s.id,
    title: s.title,
    x: s.x,
    y: s.y,
    width: s.width,
    height: s.height,
  }));

  const nodes: SceneNode[] = [];
  const shown = new Map<string, SceneNode>();
  for (const node of store.nodes.values()) {
    const origin = node.origin;
    const pending = origin.source === 'generated' && !origin.accepted;
    if (pending) {
      const task = store.tasks.get(origin.task_id);
      if (task && !task.visible) continue;
    }
    const height =
      node.kind === 'sticky_note'
        ? stickyNoteHeight(node.text, node.width, node.height)
        : node.height;
    const sceneNode: SceneNode = {
      id: node.id,
      shape: SHAPES[node.kind],
      kind: node.kind,
      text: node.text,
      x: node.x,
      y: node.y,
      width: node.width,
      height,
      hollow: pending,
      borderColor:
        pending && origin.source === 'generated'
          ? store.tasks.get(origin.task_id)?.color ?? null
          : null,
    };
    nodes.push(sceneNode);
    shown.set(node.id, sceneNode);
  }

  const center = (id: string): { x: number; y: number } | null => {
    const node = shown.get(id);
    if (node) return { x: node.x + node.width / 2, y: node.y + node.height / 2 };
    const section = store.sections.get(id);
    if (section) {
      return { x: section.x + section.width / 2, y: section.y + section.height / 2 };
    }
    return null;
  };

  const edges: SceneEdge[] = [];
  for (const edge of store.edges.values()) {
    const from = center(edge.from);
    const to = center(edge.to);
    if (!from || !to) continue;
    edges.push({
      id: edge.id,
      fromId: edge.from,
      toId: edge.to,
      directed: edge.directed,
      x1: from.x,
      y1: from.y,
      x2: to.x,
      y2: to.y,
    });
  }

  return { sections, nodes, edges };
}
