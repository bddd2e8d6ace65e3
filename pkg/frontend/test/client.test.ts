import { describe, expect, it } from "vitest";
import { INPUT_MIN_INTERVAL_MS, SocketLike, TrainerClient } from "../src/client";
import { VirtualControllerState } from "../src/input";
import { idleSnapshot, sceneDoc } from "./helpers";

class FakeSocket implements SocketLike {
  sent: string[] = [];
  closedWith: number | undefined;
  onopen: ((ev: any) => void) | null = null;
  onmessage: ((ev: any) => void) | null = null;
  onclose: ((ev: any) => void) | null = null;
  onerror: ((ev: any) => void) | null = null;

  send(data: string): void {
    this.sent.push(data);
  }

  close(code?: number): void {
    this.closedWith = code;
  }

  open(): void {
    this.onopen?.({});
  }

  receive(msg: unknown): void {
    this.onmessage?.({ data: JSON.stringify(msg) });
  }

  sentTypes(): string[] {
    return this.sent.map((s) => JSON.parse(s).type);
  }
}

function ackMsg() {
  return { type: "ack", input_mode: "pose", tick_rate_hz: 100,
           snapshot_rate_hz: 30, heartbeat_s: 5, scene: sceneDoc() };
}

function controllerState(overrides: Partial<VirtualControllerState> = {}):
    VirtualControllerState {
  return { id: 0, position: [0, 0.08, 0], orientation: [1, 0, 0, 0],
           button: false, jaw: 0, ...overrides };
}

function makeClient(nowRef: { ms: number }) {
  const socket = new FakeSocket();
  const client = new TrainerClient("ws://test/session", () => socket, {},
                                   { now: () => nowRef.ms });
  return { socket, client };
}

describe("handshake", () => {
  it("sends hello first and goes ready on the ack", () => {
    const now = { ms: 1000 };
    const { socket, client } = makeClient(now);
    expect(client.status).toBe("connecting");
    socket.open();
    expect(socket.sentTypes()).toEqual(["hello"]);
    expect(JSON.parse(socket.sent[0]).role).toBe("trainer-ui");
    expect(client.status).toBe("awaiting-ack");
    socket.receive(ackMsg());
    expect(client.status).toBe("ready");
    expect(client.ack?.tick_rate_hz).toBe(100);
    expect(client.ack?.scene.teleop.translation_scale).toBe(0.5);
  });

  it("refuses to send input or trial commands before ready", () => {
    const now = { ms: 1000 };
    const { socket, client } = makeClient(now);
    socket.open();
    client.sendTrial("start");
    expect(client.sendInput(controllerState(), now.ms)).toBe(false);
    expect(socket.sentTypes()).toEqual(["hello"]);
  });
});

describe("dispatch", () => {
  function readyClient() {
    const now = { ms: 1000 };
    const made = makeClient(now);
    made.socket.open();
    made.socket.receive(ackMsg());
    return { ...made, now };
  }

  it("answers ping with pong immediately", () => {
    const { socket } = readyClient();
    socket.receive({ type: "ping" });
    expect(socket.sentTypes()).toEqual(["hello", "pong"]);
  });

  it("keeps only the newest snapshot and counts arrivals", () => {
    const { socket, client, now } = readyClient();
    const first = idleSnapshot();
    const second = idleSnapshot();
    second.t_us = 70_000;
    now.ms = 2000;
    socket.receive(first);
    now.ms = 2040;
    socket.receive(second);
    expect(client.snapshot?.t_us).toBe(70_000);
    expect(client.snapshotsSeen).toBe(2);
    expect(client.snapshotAtMs).toBe(2040);
  });

  it("collects events in order and metrics by trial", () => {
    const { socket, client } = readyClient();
    socket.receive({ type: "event", t_us: 1, kind: "trial_start", data: { trial_id: 0 } });
    socket.receive({ type: "event", t_us: 2, kind: "grasp",
                     data: { ring_id: 0, instrument_id: 0 } });
    socket.receive({ type: "metrics", trial_id: 0, duration_s: 180, transfers: 6,
                     drops: 2, avg_transfer_time_s: 9.9, total_path_length_m: 4,
                     path_length_by_instrument: {}, truncated: false, events: [] });
    expect(client.events.map((e) => e.kind)).toEqual(["trial_start", "grasp"]);
    expect(client.metricsByTrial.get(0)?.transfers).toBe(6);
  });

  it("surfaces server errors and malformed frames via lastError", () => {
    const { socket, client } = readyClient();
    socket.receive({ type: "error", reason: "quaternion norm 1.2000 outside unit tolerance" });
    expect(client.lastError).toMatch(/quaternion norm/);
    socket.onmessage?.({ data: "{broken" });
    expect(client.lastError).toMatch(/not valid JSON/);
  });

  it("reports the close code", () => {
    const { socket, client } = readyClient();
    socket.onclose?.({ code: 1001 });
    expect(client.status).toBe("closed");
    expect(client.closeCode).toBe(1001);
  });
});

describe("input emission", () => {
  function readyClient() {
    const now = { ms: 10_000 };
    const made = makeClient(now);
    made.socket.open();
    made.socket.receive(ackMsg());
    return { ...made, now };
  }

  it("caps the send rate at the engine tick interval", () => {
    const { socket, client, now } = readyClient();
    let sentCount = 0;
    for (let i = 0; i < 50; i++) {
      now.ms += 2; // trying to emit at 500 Hz
      if (client.sendInput(controllerState(), now.ms)) sentCount += 1;
    }
    const inputs = socket.sent.filter((s) => JSON.parse(s).type === "input");
    expect(inputs.length).toBe(sentCount);
    // 100 ms elapsed at a 10 ms floor leaves room for at most 10 frames
    expect(sentCount).toBeLessThanOrEqual(100 / INPUT_MIN_INTERVAL_MS);
    expect(sentCount).toBeGreaterThanOrEqual(9);
  });

  it("stamps strictly increasing t_us even when the clock stalls", () => {
    const { socket, client, now } = readyClient();
    const stamps: number[] = [];
    for (let i = 0; i < 5; i++) {
      now.ms += INPUT_MIN_INTERVAL_MS;
      expect(client.sendInput(controllerState(), now.ms)).toBe(true);
    }
    // freeze the wall clock; timestamps must keep climbing
    for (let i = 0; i < 5; i++) {
      now.ms += INPUT_MIN_INTERVAL_MS;
      client.sendInput(controllerState(), now.ms);
    }
    for (const s of socket.sent) {
      const msg = JSON.parse(s);
      if (msg.type === "input") stamps.push(msg.t_us);
    }
    for (let i = 1; i < stamps.length; i++) {
      expect(stamps[i]).toBeGreaterThan(stamps[i - 1]);
    }
  });

  it("normalizes the outgoing quaternion", () => {
    const { socket, client, now } = readyClient();
    now.ms += INPUT_MIN_INTERVAL_MS;
    client.sendInput(controllerState({ orientation: [2, 0, 0, 0] }), now.ms);
    const input = JSON.parse(socket.sent[socket.sent.length - 1]);
    expect(input.pose.q).toEqual([1, 0, 0, 0]);
  });

  it("carries controller id, button, and jaw through verbatim", () => {
    const { socket, client, now } = readyClient();
    now.ms += INPUT_MIN_INTERVAL_MS;
    client.sendInput(controllerState({ id: 1, button: true, jaw: 0.5 }), now.ms);
    const input = JSON.parse(socket.sent[socket.sent.length - 1]);
    expect(input.controller).toBe(1);
    expect(input.button).toBe(true);
    expect(input.jaw).toBe(0.5);
  });
});

describe("staleness", () => {
  it("turns stale 250 ms after the last snapshot", () => {
    const now = { ms: 1000 };
    const { socket, client } = makeClient(now);
    socket.open();
    socket.receive(ackMsg());
    expect(client.isStale(now.ms)).toBe(false); // no snapshot yet
    socket.receive(idleSnapshot());
    expect(client.isStale(now.ms + 250)).toBe(false);
    expect(client.isStale(now.ms + 251)).toBe(true);
  });
});
