/**
 * Task headers: the strip of colored microtask labels above each diagram
 * element, plus the curtain / unread-dot / preview-panel view state and the
 * gestures those affordances fire.
 *
 * Everything here is a pure projection of the document store; the engine
 * remains the single authority. Presentation timings (the hover-to-summary
 * threshold) come from the engine config delivered at connect.
 */

import type { Initiative, InputType, NodeKind, Phase } from './protocol.js';
import { DocumentStore } from './store.js';

/** One engine command a gesture wants sent; null means the gesture is inert
 * in the current state (e.g. clicking a proactive label with nothing shown). */
export interface GestureCommand {
  cmd: string;
  args: Record<string, unknown>;
}

export type LabelMode = 'proactive' | 'reactive' | 'display' | 'unread';

export interface TaskLabel {
  taskId: string;
  name: string;
  color: string;
  /** Rendering mode: result phases win, otherwise the effective initiative. */
  mode: LabelMode;
  /** Underlined exactly while the result set is on canvas (display phase). */
  underlined: boolean;
  unread: boolean;
  /** Reactive affordance: generations are ready to show or already shown —
   * the label paints black instead of gray. */
  ready: boolean;
  /** A request is in flight for this pair (spinner-style accent). */
  busy: boolean;
  phase: Phase;
  initiative: Initiative;
}

export interface CurtainView {
  taskId: string;
  color: string;
  keyPoint: string;
  /** Engine timestamp after which the curtain folds into an unread mark. */
  deadline: number;
}

export interface PreviewEntry {
  taskId: string;
  name: string;
  color: string;
  keyPoint: string;
  summary: string;
}

export interface HeaderView {
  elementId: string;
  labels: TaskLabel[];
  /** Red dot on the header iff any task's state is unread. */
  unreadDot: boolean;
  curtains: CurtainView[];
  /** Hovering the header opens these (one per unread result). */
  previews: PreviewEntry[];
  /** Aggregate affordances surface once more than one result is involved. */
  showExpandAll: boolean;
  showCloseAll: boolean;
}

function kindMatches(
  input: InputType,
  elementKind: NodeKind | 'section',
): boolean {
  if (input === 'section') return elementKind === 'section';
  if (elementKind === 'section') return false;
  if (input === 'nodes') return true;
  return input === elementKind;
}

/** Header for one element. Tasks appear in board order when their input type
 * applies to the element's kind; visibility only hides canvas candidates, so
 * an invisible task keeps its label. */
export function headerView(store: DocumentStore, elementId: string): HeaderView {
  const node = store.nodes.get(elementId);
  const section = store.sections.get(elementId);
  const elementKind: NodeKind | 'section' | null =
    node?.kind ?? (section ? 'section' : null);
  if (elementKind === null) {
    throw new Error(`unknown element: ${elementId}`);
  }

  const labels: TaskLabel[] = [];
  const curtains: CurtainView[] = [];
  const previews: PreviewEntry[] = [];
  let expandable = 0;
  let displayed = 0;

  for (const task of store.tasks.values()) {
    if (!kindMatches(task.input_type, elementKind)) continue;
    const state = store.stateFor(elementId, task.id);
    const initiative = store.effectiveInitiative(elementId, task.id);
    const mode: LabelMode =
      state.phase === 'display'
        ? 'display'
        : state.phase === 'unread'
          ? 'unread'
          : initiative;
    labels.push({
      taskId: task.id,
      name: task.name,
      color: task.color,
      mode,
      underlined: state.phase === 'display',
      unread: state.phase === 'unread',
      ready:
        state.phase === 'display' ||
        (state.phase === 'idle' && state.cache !== null),
      busy: state.phase === 'in_flight',
      phase: state.phase,
      initiative,
    });
    if (state.phase === 'curtain' && state.result) {
      curtains.push({
        taskId: task.id,
        color: task.color,
        keyPoint: state.result.key_point,
        deadline: state.curtain_deadline ?? 0,
      });
    }
    if (state.phase === 'unread' && state.result) {
      previews.push({
        taskId: task.id,
        name: task.name,
        color: task.color,
        keyPoint: state.result.key_point,
        summary: state.result.summary,
      });
    }
    if (state.phase === 'curtain' || state.phase === 'unread') expandable += 1;
    if (state.phase === 'display') displayed += 1;
  }

  return {
    elementId,
    labels,
    unreadDot: labels.some((l) => l.unread),
    curtains,
    previews,
    showExpandAll: expandable >= 2,
    showCloseAll: displayed >= 2,
  };
}

// -- gestures ----------------------------------------------------------------

/** Plain click on a task label: expand waiting results, hide shown ones,
 * re-show a cached set, or fire a reactive request. */
export function labelClick(
  store: DocumentStore,
  elementId: string,
  taskId: string,
): GestureCommand | null {
  const state = store.stateFor(elementId, taskId);
  const args = { node_id: elementId, task_id: taskId };
  switch (state.phase) {
    case 'display':
      return { cmd: 'collapse', args };
    case 'curtain':
    case 'unread':
      return { cmd: 'expand', args };
    case 'idle':
      if (state.cache !== null) return { cmd: 'show_cached', args };
      if (store.effectiveInitiative(elementId, taskId) === 'reactive') {
        return { cmd: 'request_reactive', args };
      }
      return null;
    case 'in_flight':
      return null;
  }
}

/** Control-click flips the task's initiative on this element only. */
export function labelControlClick(
  store: DocumentStore,
  elementId: string,
  taskId: string,
): GestureCommand {
  const next: Initiative =
    store.effectiveInitiative(elementId, taskId) === 'proactive'
      ? 'reactive'
      : 'proactive';
  return {
    cmd: 'set_initiative',
    args: { task_id: taskId, mode: next, node_id: elementId },
  };
}

/** The curtain's expand icon. */
export function curtainExpandClick(
  elementId: string,
  taskId: string,
): GestureCommand {
  return { cmd: 'expand', args: { node_id: elementId, task_id: taskId } };
}

/** "Expand all": one expand per waiting result. The wire protocol has no
 * bulk operation, so this single gesture fans out to one command per pair. */
export function expandAllClick(
  store: DocumentStore,
  elementId: string,
): GestureCommand[] {
  return headerView(store, elementId)
    .labels.filter((l) => l.phase === 'curtain' || l.phase === 'unread')
    .map((l) => ({
      cmd: 'expand',
      args: { node_id: elementId, task_id: l.taskId },
    }));
}

/** "Close all": one collapse per displayed result. */
export function closeAllClick(
  store: DocumentStore,
  elementId: string,
): GestureCommand[] {
  return headerView(store, elementId)
    .labels.filter((l) => l.phase === 'display')
    .map((l) => ({
      cmd: 'collapse',
      args: { node_id: elementId, task_id: l.taskId },
    }));
}

// -- hover timing --------------------------------------------------------------

export type PreviewDetail = 'key_point' | 'summary';

/**
 * Tracks how long the pointer has rested on one preview label against a
 * virtualized clock. Short hovers show the key point; once the dwell time
 * reaches the configured threshold the ticker summary takes over.
 */
export class HoverTracker {
  private enteredAt: number | null = null;

  constructor(private readonly summaryAfterSeconds: number) {}

  enter(at: number): void {
    this.enteredAt = at;
  }

  leave(): void {
    this.enteredAt = null;
  }

  get hovering(): boolean {
    return this.enteredAt !== null;
  }

  /** What the preview shows at `now`: the summary once the pointer has
   * dwelt for at least the threshold, the key point otherwise. */
  detail(now: number): PreviewDetail {
    if (this.enteredAt === null) return 'key_point';
    return now - this.enteredAt >= this.summaryAfterSeconds
      ? 'summary'
      : 'key_point';
  }
}
