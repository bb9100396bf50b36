/** Shared test scaffolding: document builders sized for one assertion each,
 * and a scriptable transport for driving the client without a socket. */

import type {
  ConfigJson,
  DocumentJson,
  EventJson,
  InputType,
  NodeJson,
  NodeKind,
  OutputType,
  SnapshotMessage,
  StateJson,
  TaskJson,
} from '../src/protocol.js';
import type { Transport, TransportHandlers } from '../src/client.js';
import { defaultState } from '../src/store.js';

export const CONFIG: ConfigJson = {
  schema_version: 1,
  tick_seconds: 0.3,
  curtain_timeout_seconds: 6.0,
  max_inflight_per_task: 4,
  hover_summary_seconds: 1.5,
  temperature: 0.7,
};

export function mkNode(
  id: string,
  kind: NodeKind,
  text: string,
  x: number,
  y: number,
  origin: NodeJson['origin'] = { source: 'user' },
  size?: { width: number; height: number },
): NodeJson {
  const defaults: Record<NodeKind, [number, number]> = {
    keyword: [100, 28],
    concept: [140, 70],
    sticky_note: [180, 140],
  };
  const [width, height] = defaults[kind];
  return {
    id,
    kind,
    text,
    x,
    y,
    width: size?.width ?? width,
    height: size?.height ?? height,
    origin,
  };
}

export function mkCandidate(
  id: string,
  kind: NodeKind,
  text: string,
  x: number,
  y: number,
  taskId: string,
  accepted = false,
): NodeJson {
  return mkNode(id, kind, text, x, y, {
    source: 'generated',
    task_id: taskId,
    accepted,
    dialogue: [],
  });
}

export function mkTask(
  id: string,
  name: string,
  inputType: InputType,
  outputType: OutputType,
  overrides: Partial<TaskJson> = {},
): TaskJson {
  return {
    id,
    name,
    color: '#e6194b',
    input_type: inputType,
    output_type: outputType,
    prompts: [
      {
        label: 'Prompt',
        template:
          inputType === 'nodes'
            ? 'Relate [placeholder] and [placeholder].'
            : 'About [placeholder].',
      },
    ],
    active_prompt: 0,
    initiative: 'proactive',
    visible: true,
    ...overrides,
  };
}

export function mkState(overrides: Partial<StateJson>): StateJson {
  return { ...defaultState(), ...overrides };
}

export function mkDocument(parts: Partial<DocumentJson> = {}): DocumentJson {
  return {
    schema_version: 1,
    nodes: [],
    edges: [],
    sections: [],
    tasks: [],
    states: {},
    cursor: { x: 0, y: 0 },
    counters: { node: 0, edge: 0, section: 0, task: 0 },
    event_log: [],
    ...parts,
  };
}

export function mkSnapshot(
  document: DocumentJson,
  lastSeq = document.event_log.length,
): SnapshotMessage {
  return { kind: 'snapshot', document, config: CONFIG, last_seq: lastSeq };
}

let eventClock = 0;

/** Build the next event for a store currently at `lastSeq`. */
export function mkEvent(
  seq: number,
  kind: string,
  payload: Record<string, unknown>,
): EventJson {
  eventClock += 0.1;
  return { seq, timestamp: Math.round(eventClock * 10) / 10, kind, payload };
}

// -- transport ----------------------------------------------------------------

export class FakeTransport implements Transport {
  readonly sent: string[] = [];
  closed = false;

  constructor(private readonly handlers: TransportHandlers) {}

  send(text: string): void {
    this.sent.push(text);
  }

  close(): void {
    this.closed = true;
  }

  /** Deliver one server frame to the client. */
  receive(frame: unknown): void {
    this.handlers.onMessage(JSON.stringify(frame));
  }

  /** Deliver a raw (possibly malformed) wire string. */
  receiveRaw(text: string): void {
    this.handlers.onMessage(text);
  }

  /** Simulate the server dropping the connection. */
  drop(): void {
    this.handlers.onClose();
  }
}

/** Factory that records every transport it hands out. */
export function fakeFactory(): {
  factory: (handlers: TransportHandlers) => Transport;
  transports: FakeTransport[];
} {
  const transports: FakeTransport[] = [];
  return {
    factory: (handlers) => {
      const transport = new FakeTransport(handlers);
      transports.push(transport);
      return transport;
    },
    transports,
  };
}
