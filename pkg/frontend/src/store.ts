/**
 * Client-side document mirror.
 *
 * The UI holds no authoritative state: the store hydrates from the connect
 * snapshot and then folds every broadcast event with the same reducer
 * semantics the engine applies server-side, so a reconnect-and-resnapshot
 * always lands on exactly the scene live play produced. Events must arrive
 * in sequence order; any gap flips needsResnapshot and the client resyncs.
 */

import type {
  CacheJson,
  ConfigJson,
  DocumentJson,
  EdgeJson,
  EventJson,
  Initiative,
  NodeJson,
  ResultJson,
  SectionJson,
  SnapshotMessage,
  StateJson,
  TaskJson,
  Turn,
} from './protocol.js';

export function defaultState(): StateJson {
  return {
    phase: 'idle',
    result: null,
    pending: [],
    partner_id: null,
    reactive_request: false,
    local_initiative: null,
    curtain_deadline: null,
    cache: null,
  };
}

function isDefault(state: StateJson): boolean {
  return (
    state.phase === 'idle' &&
    state.result === null &&
    state.pending.length === 0 &&
    state.partner_id === null &&
    !state.reactive_request &&
    state.local_initiative === null &&
    state.curtain_deadline === null &&
    state.cache === null
  );
}

function stateKey(elementId: string, taskId: string): string {
  return `${elementId}:${taskId}`;
}

function elementOfKey(key: string): string {
  return key.slice(0, key.indexOf(':'));
}

function taskOfKey(key: string): string {
  return key.slice(key.indexOf(':') + 1);
}

type CounterKey = 'node' | 'edge' | 'section' | 'task';

export class DocumentStore {
  schemaVersion = 1;
  nodes = new Map<string, NodeJson>();
  edges = new Map<string, EdgeJson>();
  sections = new Map<string, SectionJson>();
  tasks = new Map<string, TaskJson>();
  states = new Map<string, StateJson>();
  cursor = { x: 0, y: 0 };
  counters: Record<CounterKey, number> = { node: 0, edge: 0, section: 0, task: 0 };
  eventLog: EventJson[] = [];

  config: ConfigJson | null = null;
  lastSeq = 0;
  needsResnapshot = false;

  applySnapshot(snapshot: SnapshotMessage): void {
    const doc = snapshot.document;
    this.schemaVersion = doc.schema_version;
    this.nodes = new Map(doc.nodes.map((n) => [n.id, structuredClone(n)]));
    this.edges = new Map(doc.edges.map((e) => [e.id, structuredClone(e)]));
    this.sections = new Map(doc.sections.map((s) => [s.id, structuredClone(s)]));
    this.tasks = new Map(doc.tasks.map((t) => [t.id, structuredClone(t)]));
    this.states = new Map(
      Object.entries(doc.states).map(([k, v]) => [k, structuredClone(v)]),
    );
    this.cursor = { ...doc.cursor };
    this.counters = { ...doc.counters };
    this.eventLog = doc.event_log.map((e) => structuredClone(e));
    this.config = snapshot.config;
    this.lastSeq = snapshot.last_seq;
    this.needsResnapshot = false;
  }

  /** Fold one broadcast event. Returns false (and flags a resnapshot) when
   * the event does not directly follow the last applied sequence number. */
  applyEvent(event: EventJson): boolean {
    if (event.seq !== this.lastSeq + 1) {
      this.needsResnapshot = true;
      return false;
    }
    if (!this.reduce(event)) {
      this.needsResnapshot = true;
      return false;
    }
    this.eventLog.push(structuredClone(event));
    this.lastSeq = event.seq;
    return true;
  }

  toDocumentJson(): DocumentJson {
    return {
      schema_version: this.schemaVersion,
      nodes: [...this.nodes.values()],
      edges: [...this.edges.values()],
      sections: [...this.sections.values()],
      tasks: [...this.tasks.values()],
      states: Object.fromEntries(this.states),
      cursor: { ...this.cursor },
      counters: { ...this.counters },
      event_log: this.eventLog,
    };
  }

  stateFor(elementId: string, taskId: string): StateJson {
    return this.states.get(stateKey(elementId, taskId)) ?? defaultState();
  }

  effectiveInitiative(elementId: string, taskId: string): Initiative {
    const state = this.states.get(stateKey(elementId, taskId));
    if (state && state.local_initiative !== null) return state.local_initiative;
    return this.tasks.get(taskId)?.initiative ?? 'proactive';
  }

  // -- reducer -------------------------------------------------------------

  private reduce(event: EventJson): boolean {
    const p = event.payload;
    switch (event.kind) {
      case 'NodeAdded': {
        const node = structuredClone(p['node'] as NodeJson);
        this.nodes.set(node.id, node);
        this.bump('node', node.id);
        return true;
      }
      case 'TextConfirmed': {
        const node = this.nodes.get(p['node_id'] as string);
        if (node) node.text = p['text'] as string;
        return true;
      }
      case 'NodeMoved': {
        const node = this.nodes.get(p['node_id'] as string);
        if (node) {
          node.x = p['x'] as number;
          node.y = p['y'] as number;
        }
        return true;
      }
      case 'NodeResized': {
        const node = this.nodes.get(p['node_id'] as string);
        if (node) {
          node.width = p['width'] as number;
          node.height = p['height'] as number;
        }
        return true;
      }
      case 'NodeDeleted': {
        this.deleteElements(new Set([p['node_id'] as string]));
        return true;
      }
      case 'EdgeAdded': {
        const edge = structuredClone(p['edge'] as EdgeJson);
        this.edges.set(edge.id, edge);
        this.bump('edge', edge.id);
        return true;
      }
      case 'EdgeDeleted': {
        this.edges.delete(p['edge_id'] as string);
        return true;
      }
      case 'SectionAdded': {
        const section = structuredClone(p['section'] as SectionJson);
        this.sections.set(section.id, section);
        this.bump('section', section.id);
        return true;
      }
      case 'SectionTitleSet': {
        const section = this.sections.get(p['section_id'] as string);
        if (section) section.title = p['title'] as string;
        return true;
      }
      case 'SectionRectSet': {
        const section = this.sections.get(p['section_id'] as string);
        if (section) {
          section.x = p['x'] as number;
          section.y = p['y'] as number;
          section.width = p['width'] as number;
          section.height = p['height'] as number;
        }
        return true;
      }
      case 'SectionDeleted': {
        this.deleteElements(new Set([p['section_id'] as string]));
        return true;
      }
      case 'CursorMoved': {
        this.cursor = { x: p['x'] as number, y: p['y'] as number };
        return true;
      }
      case 'TaskAdded': {
        const task = structuredClone(p['task'] as TaskJson);
        this.tasks.set(task.id, task);
        this.bump('task', task.id);
        return true;
      }
      case 'TaskUpdated': {
        const task = this.tasks.get(p['task_id'] as string);
        if (task) {
          const merged = {
            ...task,
            ...structuredClone(p['changes'] as Partial<TaskJson>),
            id: task.id,
          };
          this.tasks.set(task.id, merged);
        }
        return true;
      }
      case 'TaskDeleted': {
        this.applyTaskDeleted(p['task_id'] as string);
        return true;
      }
      case 'InitiativeSet': {
        const taskId = p['task_id'] as string;
        const mode = p['mode'] as Initiative;
        const nodeId = p['node_id'] as string | null;
        if (nodeId === null) {
          const task = this.tasks.get(taskId);
          if (task) task.initiative = mode;
        } else {
          this.ensureState(nodeId, taskId).local_initiative = mode;
          this.pruneState(nodeId, taskId);
        }
        return true;
      }
      case 'VisibilitySet': {
        const task = this.tasks.get(p['task_id'] as string);
        if (task) task.visible = p['visible'] as boolean;
        return true;
      }
      case 'Dispatch': {
        const state = this.ensureState(p['node_id'] as string, p['task_id'] as string);
        state.phase = 'in_flight';
        state.partner_id = (p['partner_id'] as string | null) ?? null;
        state.reactive_request = (p['reactive'] as boolean) ?? false;
        return true;
      }
      case 'CurtainShown': {
        const state = this.ensureState(p['node_id'] as string, p['task_id'] as string);
        state.phase = 'curtain';
        state.result = structuredClone(p['result'] as ResultJson);
        state.curtain_deadline = p['deadline'] as number;
        state.reactive_request = false;
        return true;
      }
      case 'UnreadMarked': {
        const state = this.ensureState(p['node_id'] as string, p['task_id'] as string);
        state.phase = 'unread';
        state.curtain_deadline = null;
        return true;
      }
      case 'Expanded': {
        const created = p['created'] as NodeJson[];
        for (const nodeDict of created) {
          const node = structuredClone(nodeDict);
          this.nodes.set(node.id, node);
          this.bump('node', node.id);
        }
        for (const edgeDict of p['edges'] as EdgeJson[]) {
          const edge = structuredClone(edgeDict);
          this.edges.set(edge.id, edge);
          this.bump('edge', edge.id);
        }
        const state = this.ensureState(p['node_id'] as string, p['task_id'] as string);
        state.phase = 'display';
        state.result = structuredClone(p['result'] as ResultJson);
        state.pending = created.map((n) => n.id);
        state.curtain_deadline = null;
        state.reactive_request = false;
        state.cache = null;
        return true;
      }
      case 'Collapsed': {
        const elementId = p['node_id'] as string;
        const taskId = p['task_id'] as string;
        const state = this.ensureState(elementId, taskId);
        const removed = p['removed'] as string[];
        for (const nid of removed) this.nodes.delete(nid);
        this.dropEdgesTouching(new Set(removed));
        this.dropStatesFor(new Set(removed));
        state.phase = 'idle';
        state.result = null;
        state.pending = [];
        state.cache = structuredClone(p['cache'] as CacheJson);
        this.pruneState(elementId, taskId);
        return true;
      }
      case 'Accepted': {
        const node = this.nodes.get(p['node_id'] as string);
        if (node && node.origin.source === 'generated') node.origin.accepted = true;
        this.resolvePending(p['node_id'] as string);
        return true;
      }
      case 'Discarded': {
        const nodeId = p['node_id'] as string;
        this.resolvePending(nodeId);
        this.nodes.delete(nodeId);
        this.dropEdgesTouching(new Set([nodeId]));
        this.dropStatesFor(new Set([nodeId]));
        return true;
      }
      case 'Regenerated': {
        const node = this.nodes.get(p['node_id'] as string);
        if (node) {
          node.text = p['text'] as string;
          if (node.origin.source === 'generated') {
            node.origin.dialogue.push(...structuredClone(p['turns'] as Turn[]));
          }
        }
        return true;
      }
      case 'Explained': {
        const node = this.nodes.get(p['node_id'] as string);
        if (node && node.origin.source === 'generated') {
          node.origin.dialogue.push(...structuredClone(p['turns'] as Turn[]));
        }
        return true;
      }
      case 'Error': {
        if (p['context'] === 'generation') {
          const elementId = p['node_id'] as string;
          const taskId = p['task_id'] as string;
          const state = this.states.get(stateKey(elementId, taskId));
          if (state && state.phase === 'in_flight') {
            state.phase = 'idle';
            state.partner_id = null;
            state.reactive_request = false;
            this.pruneState(elementId, taskId);
          }
        }
        return true;
      }
      default:
        // A kind this client predates: resync rather than guess.
        return false;
    }
  }

  // -- cascade helpers -------------------------------------------------------

  private bump(key: CounterKey, ident: string): void {
    const digits = ident.slice(1);
    if (!/^\d+$/.test(digits)) return;
    const num = Number(digits);
    if (num > this.counters[key]) this.counters[key] = num;
  }

  private ensureState(elementId: string, taskId: string): StateJson {
    const key = stateKey(elementId, taskId);
    let state = this.states.get(key);
    if (!state) {
      state = defaultState();
      this.states.set(key, state);
    }
    return state;
  }

  private pruneState(elementId: string, taskId: string): void {
    const key = stateKey(elementId, taskId);
    const state = this.states.get(key);
    if (state && isDefault(state)) this.states.delete(key);
  }

  private dropEdgesTouching(elementIds: Set<string>): void {
    for (const [eid, edge] of [...this.edges]) {
      if (elementIds.has(edge.from) || elementIds.has(edge.to)) {
        this.edges.delete(eid);
      }
    }
  }

  private dropStatesFor(elementIds: Set<string>): void {
    for (const key of [...this.states.keys()]) {
      if (elementIds.has(elementOfKey(key))) this.states.delete(key);
    }
  }

  /** Remove a resolved candidate from its owner's pending list; an emptied
   * display returns the pair to idle with nothing retained. */
  private resolvePending(candidateId: string): void {
    for (const [key, state] of [...this.states]) {
      const at = state.pending.indexOf(candidateId);
      if (at < 0) continue;
      state.pending.splice(at, 1);
      if (state.pending.length === 0 && state.phase === 'display') {
        state.phase = 'idle';
        state.result = null;
        state.partner_id = null;
        state.cache = null;
        this.pruneState(elementOfKey(key), taskOfKey(key));
      }
    }
  }

  private deleteNodesOnly(doomed: Set<string>): void {
    for (const nid of doomed) this.nodes.delete(nid);
    this.dropEdgesTouching(doomed);
    this.dropStatesFor(doomed);
    for (const [key, state] of [...this.states]) {
      let changed = false;
      for (const nid of doomed) {
        const at = state.pending.indexOf(nid);
        if (at >= 0) {
          state.pending.splice(at, 1);
          changed = true;
        }
      }
      if (changed && state.pending.length === 0 && state.phase === 'display') {
        state.phase = 'idle';
        state.result = null;
        state.partner_id = null;
        state.cache = null;
        this.pruneState(elementOfKey(key), taskOfKey(key));
      }
    }
  }

  /** Delete nodes/sections plus everything hanging off them: their edges,
   * their task states, and the hollow candidates those states own. */
  private deleteElements(elementIds: Set<string>): void {
    const doomed = new Set([...elementIds].filter((eid) => this.nodes.has(eid)));
    for (const [key, state] of this.states) {
      if (elementIds.has(elementOfKey(key))) {
        for (const nid of state.pending) doomed.add(nid);
      }
    }
    this.dropStatesFor(elementIds);
    for (const eid of elementIds) this.sections.delete(eid);
    this.deleteNodesOnly(doomed);
  }

  private applyTaskDeleted(taskId: string): void {
    const doomed = new Set<string>();
    for (const node of this.nodes.values()) {
      const origin = node.origin;
      if (origin.source === 'generated' && !origin.accepted && origin.task_id === taskId) {
        doomed.add(node.id);
      }
    }
    this.deleteNodesOnly(doomed);
    for (const key of [...this.states.keys()]) {
      if (taskOfKey(key) === taskId) this.states.delete(key);
    }
    this.tasks.delete(taskId);
  }
}
