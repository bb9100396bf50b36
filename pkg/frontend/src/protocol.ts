/**
 * Wire protocol and document JSON types for the polymind service.
 *
 * Clients send {cmd, args, client_seq} over the WebSocket and receive one of
 * four message kinds back: a snapshot on connect, an ack or error per
 * command, and a broadcast event per committed document change. These shapes
 * mirror the server's JSON exactly; the client never invents fields.
 */

export type NodeKind = 'keyword' | 'concept' | 'sticky_note';
export type InputType = NodeKind | 'section' | 'nodes';
export type OutputType = NodeKind;
export type Initiative = 'proactive' | 'reactive';
export type Phase = 'idle' | 'in_flight' | 'curtain' | 'unread' | 'display';

export interface Turn {
  role: 'user' | 'assistant';
  text: string;
}

export interface UserOrigin {
  source: 'user';
}

export interface GeneratedOrigin {
  source: 'generated';
  task_id: string;
  accepted: boolean;
  dialogue: Turn[];
}

export type Origin = UserOrigin | GeneratedOrigin;

export interface NodeJson {
  id: string;
  kind: NodeKind;
  text: string;
  x: number;
  y: number;
  width: number;
  height: number;
  origin: Origin;
}

export interface EdgeJson {
  id: string;
  from: string;
  to: string;
  directed: boolean;
}

export interface SectionJson {
  id: string;
  title: string;
  x: number;
  y: number;
  width: number;
  height: number;
}

export interface PromptJson {
  label: string;
  template: string;
}

export interface TaskJson {
  id: string;
  name: string;
  color: string;
  input_type: InputType;
  output_type: OutputType;
  prompts: PromptJson[];
  active_prompt: number;
  initiative: Initiative;
  visible: boolean;
}

export interface CandidateJson {
  kind: NodeKind;
  text: string;
}

export interface ResultJson {
  candidates: CandidateJson[];
  key_point: string;
  summary: string;
  dialogue: Turn[];
}

export interface CachedNodeJson {
  kind: NodeKind;
  text: string;
  dialogue: Turn[];
}

export interface CacheJson {
  nodes: CachedNodeJson[];
  key_point: string;
  summary: string;
}

/** Per (element, task) lifecycle state; absent entries mean the default. */
export interface StateJson {
  phase: Phase;
  result: ResultJson | null;
  pending: string[];
  partner_id: string | null;
  reactive_request: boolean;
  local_initiative: Initiative | null;
  curtain_deadline: number | null;
  cache: CacheJson | null;
}

export interface EventJson {
  seq: number;
  timestamp: number;
  kind: string;
  payload: Record<string, unknown>;
}

export interface DocumentJson {
  schema_version: number;
  nodes: NodeJson[];
  edges: EdgeJson[];
  sections: SectionJson[];
  tasks: TaskJson[];
  states: Record<string, StateJson>;
  cursor: { x: number; y: number };
  counters: { node: number; edge: number; section: number; task: number };
  event_log: EventJson[];
}

/** Engine configuration shared at connect; the single source of presentation
 * timings (curtain timeout, 1.5 s hover-summary threshold). */
export interface ConfigJson {
  schema_version: number;
  tick_seconds: number;
  curtain_timeout_seconds: number;
  max_inflight_per_task: number;
  hover_summary_seconds: number;
  temperature: number;
}

export interface CommandMessage {
  cmd: string;
  args: Record<string, unknown>;
  client_seq: number;
}

export interface SnapshotMessage {
  kind: 'snapshot';
  document: DocumentJson;
  config: ConfigJson;
  last_seq: number;
}

export interface AckMessage {
  kind: 'ack';
  client_seq: number;
  result: unknown;
}

export interface ErrorMessage {
  kind: 'error';
  client_seq: number | null;
  error: string;
}

export interface EventMessage {
  kind: 'event';
  event: EventJson;
}

export type ServerMessage =
  | SnapshotMessage
  | AckMessage
  | ErrorMessage
  | EventMessage;

const SERVER_KINDS = new Set(['snapshot', 'ack', 'error', 'event']);

export class ProtocolError extends Error {}

/** Parse one wire frame; unknown shapes raise rather than half-apply. */
export function parseServerMessage(text: string): ServerMessage {
  let data: unknown;
  try {
    data = JSON.parse(text);
  } catch {
    throw new ProtocolError('malformed JSON frame');
  }
  if (typeof data !== 'object' || data === null || Array.isArray(data)) {
    throw new ProtocolError('frame must be a JSON object');
  }
  const kind = (data as { kind?: unknown }).kind;
  if (typeof kind !== 'string' || !SERVER_KINDS.has(kind)) {
    throw new ProtocolError(`unknown server message kind: ${String(kind)}`);
  }
  return data as ServerMessage;
}

export function encodeCommand(message: CommandMessage): string {
  return JSON.stringify(message);
}
