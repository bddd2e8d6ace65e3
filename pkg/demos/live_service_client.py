"""Wire-protocol walkthrough against a live service.

Start the service first:        pegtrainer serve --port 8765
then run this client:           python3 demos/live_service_client.py

The client performs the full handshake, starts a trial, and teleoperates
instrument 0 through one scripted pick-and-release: read the scene from the
first snapshot, reach the first ring, close the jaw, carry the ring off-peg,
open the jaw, and let it fall. Every event, haptic pulse, and the final
metrics message arriving from the server is printed as it happens.
"""

import json
import sys
import threading
import time

from websockets.sync.client import connect

DEFAULT_URL = "ws://127.0.0.1:8765/session"


class Printer(threading.Thread):
    """Prints non-snapshot traffic; keeps the latest snapshot for the script."""

    def __init__(self, ws):
        super().__init__(daemon=True)
        self.ws = ws
        self.snapshot = None
        self.done = threading.Event()

    def run(self):
        while not self.done.is_set():
            try:
                msg = json.loads(self.ws.recv(timeout=1.0))
            except TimeoutError:
                continue
            except Exception:
                return
            kind = msg.get("type")
            if kind == "ping":
                self.ws.send(json.dumps({"type": "pong"}))
            elif kind == "state":
                self.snapshot = msg
            elif kind == "event":
                print(f"  event   t={msg['t_us'] / 1e6:7.3f}s  {msg['kind']}"
                      f"  {msg['data']}")
            elif kind == "haptic":
                print(f"  haptic  controller {msg['controller']}"
                      f"  amplitude {msg['amplitude']}"
                      f"  {msg['duration_ms']} ms")
            elif kind == "metrics":
                print(f"  metrics trial {msg['trial_id']}:"
                      f" {msg['transfers']} transfers, {msg['drops']} drops,"
                      f" path {msg['total_path_length_m']:.3f} m")
            elif kind == "error":
                print(f"  error   {msg['reason']}")

    def wait_snapshot(self):
        while self.snapshot is None:
            time.sleep(0.01)
        return self.snapshot


def main() -> None:
    url = sys.argv[1] if len(sys.argv) > 1 else DEFAULT_URL
    with connect(url) as ws:
        ws.send(json.dumps({"type": "hello", "role": "demo-client"}))
        ack = json.loads(ws.recv())
        assert ack["type"] == "ack", ack
        scale = ack["scene"]["teleop"]["translation_scale"]
        ring_radius = ack["scene"]["task"]["ring_circle_radius"]
        print(f"connected: {ack['tick_rate_hz']:.0f} Hz engine,"
              f" {ack['snapshot_rate_hz']:.0f} Hz snapshots,"
              f" input mode {ack['input_mode']}")

        printer = Printer(ws)
        printer.start()
        # input timestamps are monotone per controller for the whole session,
        # so a fresh client resets before starting its own timeline
        ws.send(json.dumps({"type": "trial", "cmd": "reset"}))
        # first start opens familiarization; the second skips into trial 0
        ws.send(json.dumps({"type": "trial", "cmd": "start"}))
        time.sleep(0.1)
        ws.send(json.dumps({"type": "trial", "cmd": "start"}))

        snap = printer.wait_snapshot()
        tip = snap["instruments"][0]["tip"]["translation"]
        ring = snap["rings"][0]["pose"]["translation"]
        grasp = [ring[0] + ring_radius, ring[1], ring[2]]
        carry = [0.0, 0.05, ring[2]]

        t_us = 0

        def send_pose(p, jaw):
            nonlocal t_us
            t_us += 10_000
            ws.send(json.dumps({
                "type": "input", "t_us": t_us, "controller": 0,
                "pose": {"p": p, "q": [1.0, 0.0, 0.0, 0.0]},
                "button": False, "jaw": jaw,
            }))
            time.sleep(0.01)

        def glide(start, end, jaw, steps=40):
            for k in range(1, steps + 1):
                a = k / steps
                # controller travel is tip travel divided by the motion scale
                send_pose([(s + a * (e - s)) / scale
                           for s, e in zip(start, end)], jaw)

        print("engaging and reaching the first ring")
        send_pose([0.0, 0.0, 0.0], 0.0)  # released button with a pose: engage
        offset = [g - t for g, t in zip(grasp, tip)]
        glide([0.0, 0.0, 0.0], offset, jaw=0.0)
        print("closing jaw")
        for _ in range(5):
            send_pose([o / scale for o in offset], 1.0)
        print("carrying off-peg")
        travel = [o + c - g for o, c, g in zip(offset, carry, grasp)]
        glide(offset, travel, jaw=1.0)
        print("releasing")
        for _ in range(5):
            send_pose([tr / scale for tr in travel], 0.0)
        time.sleep(0.5)  # let the ring fall and the drop event arrive

        ws.send(json.dumps({"type": "trial", "cmd": "stop"}))
        time.sleep(0.5)
        ws.send(json.dumps({"type": "trial", "cmd": "reset"}))  # leave it idle
        time.sleep(0.2)
        printer.done.set()
    print("done")


if __name__ == "__main__":
    main()
