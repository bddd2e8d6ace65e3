/** Session client: handshake, message dispatch, and rate-capped input emission.
 *
 *  Rendering reads the newest snapshot from a latest-wins cell; events,
 *  metrics, haptics, and errors go through callbacks. Outbound input frames
 *  are strictly monotone in t_us and capped at the engine tick rate.
 */

import { quatNorm } from "./math3d";
import {
  AckMsg, EventMsg, HapticMsg, MetricsMsg, parseServerMessage, pongMessage,
  ServerMsg, StateMsg, helloMessage, trialMessage,
} from "./protocol";
import { VirtualControllerState } from "./input";

/** The subset of the browser WebSocket API the client uses; the "ws"
 *  package is compatible, so node tests inject it. Handler parameters are
 *  `any` because the DOM and "ws" event types differ in detail. */
export interface SocketLike {
  send(data: string): void;
  close(code?: number): void;
  onopen: ((ev: any) => void) | null;
  onmessage: ((ev: any) => void) | null;
  onclose: ((ev: any) => void) | null;
  onerror: ((ev: any) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export interface ClientCallbacks {
  onAck?: (ack: AckMsg) => void;
  onSnapshot?: (snap: StateMsg) => void;
  onEvent?: (ev: EventMsg) => void;
  onMetrics?: (m: MetricsMsg) => void;
  onHaptic?: (h: HapticMsg) => void;
  onError?: (reason: string) => void;
  onClose?: (code?: number) => void;
}

export type ClientStatus = "connecting" | "awaiting-ack" | "ready" | "closed";

/** Sending faster than the engine consumes is pointless; cap at its tick rate. */
export const INPUT_MIN_INTERVAL_MS = 10;
export const STALE_AFTER_MS = 250;

export class TrainerClient {
  status: ClientStatus = "connecting";
  ack: AckMsg | null = null;
  closeCode: number | undefined;
  /** Newest snapshot and the wall time it arrived, for staleness checks. */
  snapshot: StateMsg | null = null;
  snapshotAtMs = 0;
  snapshotsSeen = 0;
  events: EventMsg[] = [];
  metricsByTrial = new Map<number, MetricsMsg>();
  lastError = "";

  private socket: SocketLike;
  private callbacks: ClientCallbacks;
  private now: () => number;
  private role: string;
  private lastInputUs = -1;
  private lastSendMs = -Infinity;
  private readonly maxEvents = 200;

  constructor(url: string, factory: SocketFactory, callbacks: ClientCallbacks = {},
              opts: { now?: () => number; role?: string } = {}) {
    this.callbacks = callbacks;
    this.now = opts.now ?? (() => Date.now());
    this.role = opts.role ?? "trainer-ui";
    this.socket = factory(url);
    this.socket.onopen = () => {
      this.socket.send(helloMessage(this.role));
      this.status = "awaiting-ack";
    };
    this.socket.onmessage = (ev) => this.handleFrame(String(ev.data));
    this.socket.onclose = (ev) => {
      this.status = "closed";
      this.closeCode = ev?.code;
      this.callbacks.onClose?.(ev?.code);
    };
    this.socket.onerror = () => {
      this.lastError = "socket error";
    };
  }

  close(): void {
    this.socket.close(1000);
    this.status = "closed";
  }

  private handleFrame(text: string): void {
    const msg = parseServerMessage(text);
    switch (msg.type) {
      case "ping":
        this.socket.send(pongMessage());
        break;
      case "ack":
        this.ack = msg;
        this.status = "ready";
        this.callbacks.onAck?.(msg);
        break;
      case "state":
        this.snapshot = msg;
        this.snapshotAtMs = this.now();
        this.snapshotsSeen += 1;
        this.callbacks.onSnapshot?.(msg);
        break;
      case "event":
        this.events.push(msg);
        if (this.events.length > this.maxEvents) this.events.shift();
        this.callbacks.onEvent?.(msg);
        break;
      case "metrics":
        this.metricsByTrial.set(msg.trial_id, msg);
        this.callbacks.onMetrics?.(msg);
        break;
      case "haptic":
        this.callbacks.onHaptic?.(msg);
        break;
      case "error":
        this.lastError = msg.reason;
        this.callbacks.onError?.(msg.reason);
        break;
      case "malformed":
        this.lastError = msg.reason;
        this.callbacks.onError?.(msg.reason);
        break;
    }
  }

  /** True once no snapshot has arrived for STALE_AFTER_MS while connected. */
  isStale(nowMs = this.now()): boolean {
    return this.status === "ready" && this.snapshotAtMs > 0 &&
      nowMs - this.snapshotAtMs > STALE_AFTER_MS;
  }

  sendTrial(cmd: "start" | "stop" | "reset"): void {
    if (this.status !== "ready") return;
    this.socket.send(trialMessage(cmd));
  }

  /** Emit the controller state if the rate cap allows it. Timestamps are
   *  strictly increasing for the whole connection; the quaternion is
   *  normalized before it goes on the wire. Returns whether a frame left. */
  sendInput(state: VirtualControllerState, nowMs = this.now()): boolean {
    if (this.status !== "ready") return false;
    if (nowMs - this.lastSendMs < INPUT_MIN_INTERVAL_MS) return false;
    const n = quatNorm(state.orientation);
    if (n === 0) return false;
    const tUs = Math.max(this.lastInputUs + 1, Math.round(nowMs * 1000));
    this.lastInputUs = tUs;
    this.lastSendMs = nowMs;
    this.socket.send(JSON.stringify({
      type: "input",
      controller: state.id,
      t_us: tUs,
      pose: {
        p: state.position,
        q: [
          state.orientation[0] / n, state.orientation[1] / n,
          state.orientation[2] / n, state.orientation[3] / n,
        ],
      },
      button: state.button,
      jaw: state.jaw,
    }));
    return true;
  }
}
