import { describe, expect, it } from "vitest";
import {
  helloMessage, parseServerMessage, posePosition, poseQuat, pongMessage,
  trialMessage,
} from "../src/protocol";
import { idleSnapshot, sceneDoc } from "./helpers";

describe("parseServerMessage", () => {
  it("accepts every server frame type", () => {
    const samples = [
      { type: "ack", input_mode: "pose", tick_rate_hz: 100, snapshot_rate_hz: 30,
        heartbeat_s: 5, scene: sceneDoc() },
      idleSnapshot(),
      { type: "event", t_us: 123, kind: "grasp", data: { ring_id: 0 } },
      { type: "metrics", trial_id: 0, duration_s: 180, transfers: 6, drops: 2,
        avg_transfer_time_s: 10.5, total_path_length_m: 4.2,
        path_length_by_instrument: { "0": 2.1, "1": 2.1 }, truncated: false,
        events: [] },
      { type: "haptic", controller: 0, amplitude: 0.8, duration_ms: 40 },
      { type: "error", reason: "nope" },
      { type: "ping" },
    ];
    for (const sample of samples) {
      const parsed = parseServerMessage(JSON.stringify(sample));
      expect(parsed.type).toBe(sample.type);
    }
  });

  it("flags broken frames instead of throwing", () => {
    expect(parseServerMessage("{nope").type).toBe("malformed");
    expect(parseServerMessage("[1,2]").type).toBe("malformed");
    expect(parseServerMessage('"hi"').type).toBe("malformed");
    expect(parseServerMessage('{"type":"mystery"}').type).toBe("malformed");
    expect(parseServerMessage('{"no_type":1}').type).toBe("malformed");
  });

  it("rejects state frames missing their scene fields", () => {
    const snap = idleSnapshot() as unknown as Record<string, unknown>;
    delete snap.rings;
    const parsed = parseServerMessage(JSON.stringify(snap));
    expect(parsed.type).toBe("malformed");
    expect((parsed as { reason: string }).reason).toMatch(/state frame/);
  });

  it("rejects an ack without a scene and an error without a reason", () => {
    expect(parseServerMessage('{"type":"ack"}').type).toBe("malformed");
    expect(parseServerMessage('{"type":"error"}').type).toBe("malformed");
  });
});

describe("pose helpers", () => {
  it("splits a wire pose into quaternion and position", () => {
    const pose = { rotation: [1, 0, 0, 0] as [number, number, number, number],
                   translation: [0.1, 0.2, 0.3] as [number, number, number] };
    expect(poseQuat(pose)).toEqual([1, 0, 0, 0]);
    expect(posePosition(pose)).toEqual([0.1, 0.2, 0.3]);
  });
});

describe("outbound frames", () => {
  it("serializes handshake and trial commands", () => {
    expect(JSON.parse(helloMessage("trainer-ui"))).toEqual(
      { type: "hello", role: "trainer-ui" });
    expect(JSON.parse(pongMessage())).toEqual({ type: "pong" });
    expect(JSON.parse(trialMessage("start"))).toEqual({ type: "trial", cmd: "start" });
  });
});
