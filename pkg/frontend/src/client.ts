/**
 * Connection management: one WebSocket-shaped transport, one document store.
 *
 * Every user gesture becomes exactly one command frame tagged with a
 * client-local sequence number; the matching ack (or error) resolves the
 * returned promise. Broadcast events fold into the store in engine order —
 * a sequence gap, an unknown event kind, or a dropped connection all funnel
 * into the same recovery: reconnect and take a fresh snapshot, read-only
 * until the snapshot lands.
 *
 * The transport is injected so tests drive the client with scripted frames
 * and the browser shell passes a real WebSocket adapter.
 */

import {
  encodeCommand,
  parseServerMessage,
  type EventJson,
  type ServerMessage,
} from './protocol.js';
import { DocumentStore } from './store.js';

export interface Transport {
  send(text: string): void;
  close(): void;
}

export interface TransportHandlers {
  onMessage(text: string): void;
  onClose(): void;
}

export type TransportFactory = (handlers: TransportHandlers) => Transport;

export type ClientStatus = 'connecting' | 'live' | 'reconnecting' | 'closed';

interface PendingCommand {
  resolve(result: unknown): void;
  reject(error: Error): void;
  cmd: string;
}

export class CommandRejected extends Error {}

export class PolymindClient {
  readonly store = new DocumentStore();
  status: ClientStatus = 'connecting';
  /** Engine rejections and connection troubles, oldest first; the shell
   * renders and drains these as toasts. */
  readonly toasts: string[] = [];

  private transport: Transport | null = null;
  /** Bumped whenever the current transport is abandoned, so late callbacks
   * from a closed socket cannot disturb its replacement. */
  private generation = 0;
  private nextClientSeq = 1;
  private pending = new Map<number, PendingCommand>();
  private listeners = new Set<() => void>();

  constructor(private readonly factory: TransportFactory) {}

  /** Subscribe to state changes (snapshot, event, status, toast). */
  onChange(listener: () => void): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  connect(): void {
    const generation = ++this.generation;
    if (this.status !== 'connecting') this.status = 'reconnecting';
    this.transport = this.factory({
      onMessage: (text) => {
        if (generation === this.generation) this.handleFrame(text);
      },
      onClose: () => {
        if (generation === this.generation) this.handleClose();
      },
    });
    this.notify();
  }

  close(): void {
    this.generation++;
    this.status = 'closed';
    const transport = this.transport;
    this.transport = null;
    this.failPending('connection closed');
    transport?.close();
    this.notify();
  }

  /** True while the document mirrors the engine and commands may be sent. */
  get live(): boolean {
    return this.status === 'live';
  }

  /** Send one command; resolves with the engine's ack result. Exactly one
   * frame goes out per call — never retried, never coalesced. */
  command(cmd: string, args: Record<string, unknown>): Promise<unknown> {
    if (!this.live || this.transport === null) {
      return Promise.reject(
        new CommandRejected(`cannot send ${cmd}: connection is ${this.status}`),
      );
    }
    const clientSeq = this.nextClientSeq++;
    const frame = encodeCommand({ cmd, args, client_seq: clientSeq });
    const promise = new Promise<unknown>((resolve, reject) => {
      this.pending.set(clientSeq, { resolve, reject, cmd });
    });
    this.transport.send(frame);
    return promise;
  }

  // -- frame handling -------------------------------------------------------

  private handleFrame(text: string): void {
    let message: ServerMessage;
    try {
      message = parseServerMessage(text);
    } catch (error) {
      this.toast(`protocol error: ${(error as Error).message}`);
      this.resync();
      return;
    }
    switch (message.kind) {
      case 'snapshot':
        this.store.applySnapshot(message);
        this.status = 'live';
        break;
      case 'ack': {
        const waiter = this.pending.get(message.client_seq);
        if (waiter) {
          this.pending.delete(message.client_seq);
          waiter.resolve(message.result);
        }
        break;
      }
      case 'error': {
        const seq = message.client_seq;
        const waiter = seq === null ? undefined : this.pending.get(seq);
        if (seq !== null && waiter) {
          this.pending.delete(seq);
          this.toast(`${waiter.cmd}: ${message.error}`);
          waiter.reject(new CommandRejected(message.error));
        } else {
          this.toast(message.error);
        }
        break;
      }
      case 'event':
        if (!this.applyEvent(message.event)) return;
        break;
    }
    this.notify();
  }

  private applyEvent(event: EventJson): boolean {
    if (this.store.applyEvent(event)) return true;
    this.toast('event stream out of order; resyncing');
    this.resync();
    return false;
  }

  private handleClose(): void {
    this.transport = null;
    this.status = 'reconnecting';
    this.failPending('connection lost');
    this.connect();
  }

  /** Drop the socket and reconnect; the fresh snapshot replaces the store. */
  private resync(): void {
    this.generation++;
    const transport = this.transport;
    this.transport = null;
    this.status = 'reconnecting';
    this.failPending('connection reset during resync');
    transport?.close();
    this.connect();
  }

  private failPending(reason: string): void {
    const waiters = [...this.pending.values()];
    this.pending.clear();
    for (const waiter of waiters) {
      waiter.reject(new CommandRejected(`${waiter.cmd}: ${reason}`));
    }
  }

  private toast(text: string): void {
    this.toasts.push(text);
  }
}
