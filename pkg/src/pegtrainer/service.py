"""Live duplex service exposing the engine over a WebSocket.

One background thread owns every piece of simulation state and paces it
against the wall clock; connection handlers only translate JSON text frames
into inbound messages and drain per-client outboxes. Snapshots go into a
depth-one latest-wins slot per client, so a stalled consumer can never slow
the tick loop, while events, metrics, haptic pulses, and replies queue in
order. A session-protocol state machine (idle, familiarization, timed
trials, breaks, done) advances on trial commands and phase timers.

Wire format: one JSON object per text frame, tagged by "type"; the schema
ships in schemas/service_messages.json. Clients answer the periodic ping
with a pong or are disconnected after three unanswered pings.
"""

from __future__ import annotations

import heapq
import json
import queue
import threading
import time
import traceback
from collections import deque
from dataclasses import dataclass

import numpy as np

from .calib import Calibration, pose_to_json
from .engine import Engine
from .packets import decode_packet
from .pegtask import Event
from .replay import BlobsRecord, ImuRecord, ReplayRecord
from .reports import canonical_json, trial_report_to_doc
from .sceneconfig import SceneConfig, scene_config_to_json
from .teleop import ControllerPose
from .trial import TrialReport, compute_metrics, improvement_series

SNAPSHOT_RATE_HZ = 30.0
HEARTBEAT_S = 5.0
HEARTBEAT_MISS_LIMIT = 3
QUAT_TOLERANCE = 1e-3
SENDER_POLL_S = 0.002

INPUT_POSE = "pose"
INPUT_RAW = "raw"

PHASE_IDLE = "idle"
PHASE_FAMILIARIZATION = "familiarization"
PHASE_TRIAL = "trial"
PHASE_BREAK = "break"
PHASE_DONE = "done"

# pulse shapes for the two tactile cues; clients scale to their actuator
GRASP_PULSE = {"amplitude": 0.8, "duration_ms": 40}
DROP_PULSE = {"amplitude": 1.0, "duration_ms": 120}

CLOSE_PROTOCOL_ERROR = 1002
CLOSE_GOING_AWAY = 1001
CLOSE_INTERNAL_ERROR = 1011


def _error(reason: str) -> dict:
    return {"type": "error", "reason": reason}


class ClientBox:
    """Per-client outbox: FIFO for ordered messages, one latest-wins slot
    for snapshots. Written by the engine thread and the receiver, drained
    by the sender; every access is under the box lock."""

    def __init__(self):
        self.lock = threading.Lock()
        self.fifo: deque[dict] = deque()
        self.snapshot: dict | None = None
        self.hello = False
        self.closing = False
        self.close_code = 1000
        self.pings_unanswered = 0

    def put(self, msg: dict) -> None:
        with self.lock:
            self.fifo.append(msg)

    def put_snapshot(self, msg: dict) -> None:
        with self.lock:
            self.snapshot = msg

    def drain(self) -> tuple[list[dict], dict | None, bool, int]:
        with self.lock:
            msgs = list(self.fifo)
            self.fifo.clear()
            snap, self.snapshot = self.snapshot, None
            return msgs, snap, self.closing, self.close_code

    def request_close(self, code: int) -> None:
        with self.lock:
            self.closing = True
            self.close_code = code

    def note_pong(self) -> None:
        with self.lock:
            self.pings_unanswered = 0

    def bump_ping(self) -> int:
        with self.lock:
            self.pings_unanswered += 1
            return self.pings_unanswered


@dataclass(frozen=True)
class _InputUpdate:
    client: int
    pose: ControllerPose
    button: bool
    jaw: float


@dataclass(frozen=True)
class _TrialCommand:
    client: int
    cmd: str


@dataclass(frozen=True)
class _RawRecord:
    client: int
    record: ReplayRecord


class ServiceEngine:
    """Owns the simulation, the session state machine, and all client boxes.

    `time_scale` multiplies the wall pacing only (sim seconds per wall
    second); the simulated timeline is identical at any scale, which keeps
    tests fast without changing behavior.
    """

    def __init__(self, scene: SceneConfig = SceneConfig(),
                 calib: Calibration | None = None,
                 input_mode: str = INPUT_POSE,
                 time_scale: float = 1.0,
                 heartbeat_s: float = HEARTBEAT_S):
        if input_mode not in (INPUT_POSE, INPUT_RAW):
            raise ValueError(f"input_mode must be {INPUT_POSE!r} or {INPUT_RAW!r}")
        if time_scale <= 0:
            raise ValueError("time_scale must be positive")
        self.scene = scene
        self.calib = calib
        self.input_mode = input_mode
        self.time_scale = float(time_scale)
        self.heartbeat_s = float(heartbeat_s)

        self.tick_dt = scene.task.tick_dt
        self.tick_us = int(round(self.tick_dt * 1e6))
        proto = scene.protocol
        self.fam_ticks = int(round(proto.familiarization_s / self.tick_dt))
        self.trial_ticks = int(round(proto.trial_s / self.tick_dt))
        self.break_ticks = int(round(proto.break_s / self.tick_dt))

        self.engine = Engine(scene, calib)
        self.phase = PHASE_IDLE
        self.trial_index = -1
        self.ticks_done = 0
        self.clock_us = 0
        self.phase_start_us = 0
        self.reports: list[TrialReport] = []
        self.trial_records: dict[int, list[ReplayRecord]] = {}
        self.crashed: str | None = None

        self._poses: dict[int, ControllerPose | None] = {0: None, 1: None}
        self._buttons = {0: False, 1: False}
        self._jaws = {0: 0.0, 1: 0.0}
        self._last_input_us: dict[int, int | None] = {0: None, 1: None}
        self._pending: list[tuple[int, int, ReplayRecord]] = []
        self._pending_seq = 0
        self._trial_events: list[Event] = []
        self._trial_log: list[ReplayRecord] = []
        self._positions: dict[int, list[np.ndarray]] = {}
        self._last_releaser: dict[int, int] = {}
        self._snap_idx = 0

        self._inbound: queue.Queue = queue.Queue()
        self._clients: dict[int, ClientBox] = {}
        self._clients_lock = threading.Lock()
        self._next_client = 0
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None

    # -- client plumbing (called from connection handlers) -------------------

    def register(self) -> tuple[int, ClientBox]:
        box = ClientBox()
        with self._clients_lock:
            cid = self._next_client
            self._next_client += 1
            self._clients[cid] = box
        return cid, box

    def unregister(self, client_id: int) -> None:
        with self._clients_lock:
            self._clients.pop(client_id, None)

    def mark_hello(self, client_id: int) -> None:
        with self._clients_lock:
            box = self._clients.get(client_id)
        if box is not None:
            box.hello = True

    def submit(self, item) -> None:
        self._inbound.put(item)

    def hello_ack(self) -> dict:
        return {
            "type": "ack",
            "input_mode": self.input_mode,
            "tick_rate_hz": 1.0 / self.tick_dt,
            "snapshot_rate_hz": SNAPSHOT_RATE_HZ,
            "heartbeat_s": self.heartbeat_s,
            "scene": scene_config_to_json(self.scene),
        }

    # -- lifecycle ------------------------------------------------------------

    def start(self) -> None:
        if self._thread is not None:
            return
        self._stop.clear()
        self._thread = threading.Thread(target=self._loop, daemon=True,
                                        name="sim-engine")
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=5.0)
            self._thread = None

    def run_ticks(self, n: int) -> None:
        """Step the engine synchronously; only valid while no thread runs.

        This is the deterministic harness used by tests and offline
        diagnostics: identical to the threaded loop minus wall pacing.
        """
        if self._thread is not None:
            raise RuntimeError("engine thread is running")
        for _ in range(n):
            self._tick()

    # -- engine thread ---------------------------------------------------------

    def _loop(self) -> None:
        wall_dt = self.tick_dt / self.time_scale
        deadline = time.monotonic()
        while not self._stop.is_set():
            try:
                self._tick()
            except Exception:
                self.crashed = traceback.format_exc()
                self._broadcast(_error("internal engine failure"))
                with self._clients_lock:
                    for box in self._clients.values():
                        box.request_close(CLOSE_INTERNAL_ERROR)
                return
            deadline += wall_dt
            now = time.monotonic()
            if deadline > now:
                time.sleep(deadline - now)
            elif now - deadline > 0.25:
                deadline = now  # fell far behind; resync instead of bursting

    def _tick(self) -> None:
        self._drain_inbound()
        self._advance_phase_timers()
        self._step_phase()
        self.clock_us += self.tick_us
        self._maybe_snapshot()

    def _drain_inbound(self) -> None:
        while True:
            try:
                item = self._inbound.get_nowait()
            except queue.Empty:
                return
            if isinstance(item, _InputUpdate):
                self._apply_input(item)
            elif isinstance(item, _TrialCommand):
                self._apply_trial_command(item)
            elif isinstance(item, _RawRecord):
                heapq.heappush(
                    self._pending,
                    (item.record.t_us, self._pending_seq, item.record),
                )
                self._pending_seq += 1

    def _apply_input(self, item: _InputUpdate) -> None:
        cid = item.pose.controller_id
        last = self._last_input_us[cid]
        if last is not None and item.pose.t_us <= last:
            self._reply(item.client, _error(
                f"input t_us {item.pose.t_us} not increasing for controller {cid}"
            ))
            return
        self._last_input_us[cid] = item.pose.t_us
        self._poses[cid] = item.pose
        self._buttons[cid] = item.button
        self._jaws[cid] = item.jaw

    def _apply_trial_command(self, item: _TrialCommand) -> None:
        if item.cmd == "start":
            if self.phase == PHASE_IDLE:
                self._start_familiarization()
            elif self.phase == PHASE_FAMILIARIZATION:
                self._start_trial(0)
            elif self.phase == PHASE_BREAK:
                self._start_trial(self.trial_index + 1)
            elif self.phase == PHASE_TRIAL:
                self._reply(item.client, _error("trial already running"))
            else:
                self._reply(item.client, _error("session complete; send reset"))
        elif item.cmd == "stop":
            if self.phase == PHASE_TRIAL:
                self._finish_trial(stopped=True)
            elif self.phase == PHASE_FAMILIARIZATION:
                self.phase = PHASE_IDLE
                self.engine = Engine(self.scene, self.calib)
                self._emit_event("familiarization_end", {})
            else:
                self._reply(item.client, _error("no active trial"))
        elif item.cmd == "reset":
            self._reset()

    def _advance_phase_timers(self) -> None:
        while True:
            if (self.phase == PHASE_FAMILIARIZATION
                    and self.ticks_done >= self.fam_ticks):
                self._start_trial(0)
            elif self.phase == PHASE_TRIAL and self.ticks_done >= self.trial_ticks:
                self._finish_trial(stopped=False)
            elif self.phase == PHASE_BREAK and self.ticks_done >= self.break_ticks:
                self._start_trial(self.trial_index + 1)
            else:
                return

    def _step_phase(self) -> None:
        if self.phase in (PHASE_FAMILIARIZATION, PHASE_TRIAL):
            if self.input_mode == INPUT_RAW:
                self._consume_due_records()
                mode_events, events = self.engine.tick_from_frontend()
            else:
                mode_events, events = self.engine.tick_with_poses(
                    dict(self._poses),
                    (self._buttons[0], self._buttons[1]),
                    (self._jaws[0], self._jaws[1]),
                )
            for name in mode_events:
                self._emit_event(name, {})
            for ev in events:
                self._emit_task_event(ev)
            if self.phase == PHASE_TRIAL:
                self._trial_events.extend(events)
                for iid, inst in self.engine.task.instruments.items():
                    self._positions[iid].append(inst.tip_pose.translation.copy())
            self.ticks_done += 1
        elif self.phase == PHASE_BREAK:
            self.ticks_done += 1

    def _consume_due_records(self) -> None:
        now = self.engine.task.t_us
        while self._pending and self._pending[0][0] <= now:
            _, _, record = heapq.heappop(self._pending)
            self.engine.frontend.process(record)
            if self.phase == PHASE_TRIAL:
                self._trial_log.append(record)

    # -- session state machine ---------------------------------------------------

    def _start_familiarization(self) -> None:
        self.engine = Engine(self.scene, self.calib)
        self.phase = PHASE_FAMILIARIZATION
        self.ticks_done = 0
        self.phase_start_us = self.clock_us
        self._emit_event("familiarization_start", {})

    def _start_trial(self, index: int) -> None:
        self.engine = Engine(self.scene, self.calib)
        self.phase = PHASE_TRIAL
        self.trial_index = index
        self.ticks_done = 0
        self.phase_start_us = self.clock_us
        self._trial_events = []
        self._trial_log = []
        self._positions = {
            iid: [inst.tip_pose.translation.copy()]
            for iid, inst in self.engine.task.instruments.items()
        }
        self._emit_event("trial_start", {"trial_id": index})

    def _finish_trial(self, stopped: bool) -> None:
        duration = (self.ticks_done * self.tick_dt if stopped
                    else self.scene.protocol.trial_s)
        report = compute_metrics(
            self._trial_events, self._positions, trial_id=self.trial_index,
            duration_s=duration, truncated=stopped,
        )
        self.reports.append(report)
        if self.input_mode == INPUT_RAW:
            self.trial_records[self.trial_index] = list(self._trial_log)
        self._emit_event("trial_end", {"trial_id": self.trial_index})
        doc = trial_report_to_doc(report)
        doc.pop("kind")
        self._broadcast({"type": "metrics", **doc})
        if self.trial_index + 1 >= self.scene.protocol.trials:
            self.phase = PHASE_DONE
            self._emit_event("session_done", {
                "transfer_improvement_pct": list(improvement_series(
                    [r.transfers for r in self.reports], lower_is_better=False
                )),
                "drop_improvement_pct": list(improvement_series(
                    [r.drops for r in self.reports], lower_is_better=True
                )),
            })
        else:
            self.phase = PHASE_BREAK
            self.ticks_done = 0
            self.phase_start_us = self.clock_us
            self._emit_event("break_start", {})

    def _reset(self) -> None:
        self.engine = Engine(self.scene, self.calib)
        self.phase = PHASE_IDLE
        self.trial_index = -1
        self.ticks_done = 0
        self.phase_start_us = self.clock_us
        self.reports.clear()
        self.trial_records.clear()
        self._pending.clear()
        self._poses = {0: None, 1: None}
        self._buttons = {0: False, 1: False}
        self._jaws = {0: 0.0, 1: 0.0}
        self._last_input_us = {0: None, 1: None}
        self._last_releaser.clear()
        self._emit_event("session_reset", {})

    # -- outbound ------------------------------------------------------------------

    def _reply(self, client_id: int, msg: dict) -> None:
        with self._clients_lock:
            box = self._clients.get(client_id)
        if box is not None:
            box.put(msg)

    def _broadcast(self, msg: dict) -> None:
        with self._clients_lock:
            boxes = [b for b in self._clients.values() if b.hello]
        for box in boxes:
            box.put(msg)

    def _broadcast_snapshot(self, msg: dict) -> None:
        with self._clients_lock:
            boxes = [b for b in self._clients.values() if b.hello]
        for box in boxes:
            box.put_snapshot(msg)

    def _emit_event(self, kind: str, data: dict) -> None:
        self._broadcast({"type": "event", "t_us": self.clock_us,
                         "kind": kind, "data": data})

    def _emit_task_event(self, ev: Event) -> None:
        wire_t = self.phase_start_us + ev.t_us
        self._broadcast({"type": "event", "t_us": wire_t,
                         "kind": ev.kind, "data": dict(ev.data)})
        if ev.kind == "grasp":
            self._haptic(ev.data["instrument_id"], GRASP_PULSE)
        elif ev.kind == "released_free":
            self._last_releaser[ev.data["ring_id"]] = ev.data["instrument_id"]
        elif ev.kind == "drop":
            controller = self._last_releaser.get(ev.data["ring_id"], 0)
            self._haptic(controller, DROP_PULSE)

    def _haptic(self, controller: int, pulse: dict) -> None:
        self._broadcast({"type": "haptic", "controller": controller, **pulse})

    def _maybe_snapshot(self) -> None:
        idx = self.clock_us * int(SNAPSHOT_RATE_HZ) // 1_000_000
        if idx == self._snap_idx:
            return
        self._snap_idx = idx
        self._broadcast_snapshot(self.snapshot_doc())

    def snapshot_doc(self) -> dict:
        """Full observable scene, canonically ordered."""
        task = self.engine.task
        if self.phase == PHASE_FAMILIARIZATION:
            duration = self.fam_ticks * self.tick_dt
        elif self.phase == PHASE_TRIAL:
            duration = self.trial_ticks * self.tick_dt
        elif self.phase == PHASE_BREAK:
            duration = self.break_ticks * self.tick_dt
        else:
            duration = None
        return {
            "type": "state",
            "t_us": self.clock_us,
            "mode": self.engine.teleop.global_mode,
            "phase": {
                "name": self.phase,
                "trial_index": self.trial_index if self.trial_index >= 0 else None,
                "elapsed_s": self.ticks_done * self.tick_dt,
                "duration_s": duration,
            },
            "instruments": [
                {
                    "id": iid,
                    "joints": [float(v) for v in inst.q],
                    "tip": pose_to_json(inst.tip_pose),
                    "jaw": float(inst.jaw),
                }
                for iid, inst in sorted(task.instruments.items())
            ],
            "rings": [
                {
                    "id": ring.ring_id,
                    "state": ring.kind.value,
                    "pose": pose_to_json(ring.pose),
                    "peg": ring.peg_id,
                }
                for ring in task.rings
            ],
            "camera": pose_to_json(task.camera_pose),
        }


# -- message parsing (handler side) ---------------------------------------------


def _require(condition: bool, reason: str) -> None:
    if not condition:
        raise ValueError(reason)


def _finite_floats(values, n: int, label: str) -> list[float]:
    _require(isinstance(values, (list, tuple)) and len(values) == n,
             f"{label} must have {n} components")
    out = [float(v) for v in values]
    _require(all(np.isfinite(v) for v in out), f"{label} must be finite")
    return out


def parse_input_message(msg: dict) -> tuple[ControllerPose, bool, float]:
    """Validate an input message; non-unit quaternions within tolerance are
    renormalized, anything worse is rejected."""
    controller = msg.get("controller")
    _require(controller in (0, 1), "controller must be 0 or 1")
    _require("t_us" in msg, "input needs t_us")
    t_us = int(msg["t_us"])
    _require(t_us >= 0, "t_us must be non-negative")
    pose = msg.get("pose")
    _require(isinstance(pose, dict), "input needs a pose object")
    p = _finite_floats(pose.get("p"), 3, "pose.p")
    q = _finite_floats(pose.get("q"), 4, "pose.q")
    norm = float(np.linalg.norm(q))
    _require(abs(norm - 1.0) <= QUAT_TOLERANCE,
             f"quaternion norm {norm:.4f} outside unit tolerance")
    jaw = float(msg.get("jaw", 0.0))
    _require(np.isfinite(jaw), "jaw must be finite")
    controller_pose = ControllerPose(
        controller_id=controller,
        position=np.array(p, dtype=float),
        orientation=np.array(q, dtype=float) / norm,
        t_us=t_us,
    )
    return controller_pose, bool(msg.get("button", False)), min(1.0, max(0.0, jaw))


def parse_raw_message(msg: dict) -> ReplayRecord:
    """Decode a raw-input message (wire packet or blob centroids)."""
    if msg.get("type") == "packet":
        data = msg.get("data")
        _require(isinstance(data, str), "packet needs hex data")
        try:
            raw = bytes.fromhex(data)
        except ValueError:
            raise ValueError("packet data is not valid hex") from None
        pkt = decode_packet(raw)
        return ImuRecord(
            t_us=pkt.t_us, controller=pkt.controller_id,
            gyro=pkt.gyro, accel=pkt.accel,
            button=pkt.button_pressed, jaw=pkt.jaw,
        )
    _require("t_us" in msg, "blobs need t_us")
    t_us = int(msg["t_us"])
    _require(t_us >= 0, "t_us must be non-negative")
    sides = {}
    for side in ("left", "right"):
        pts = msg.get(side)
        _require(isinstance(pts, list), f"blobs need a {side} list")
        sides[side] = tuple(
            tuple(_finite_floats(pt, 2, f"{side} centroid")) for pt in pts
        )
    return BlobsRecord(t_us=t_us, left=sides["left"], right=sides["right"])


def handle_client_message(service: ServiceEngine, client_id: int,
                          box: ClientBox, text: str) -> None:
    """Post-handshake dispatch: validate, then reply or hand to the engine."""
    try:
        msg = json.loads(text)
    except json.JSONDecodeError:
        box.put(_error("frame is not valid JSON"))
        return
    if not isinstance(msg, dict):
        box.put(_error("frame must be a JSON object"))
        return
    mtype = msg.get("type")
    if mtype == "pong":
        box.note_pong()
    elif mtype == "hello":
        box.put(_error("duplicate hello"))
    elif mtype == "input":
        if service.input_mode != INPUT_POSE:
            box.put(_error("pose input disabled; service runs in raw mode"))
            return
        try:
            pose, button, jaw = parse_input_message(msg)
        except (ValueError, TypeError) as exc:
            box.put(_error(str(exc)))
            return
        service.submit(_InputUpdate(client=client_id, pose=pose,
                                    button=button, jaw=jaw))
    elif mtype in ("packet", "blobs"):
        if service.input_mode != INPUT_RAW:
            box.put(_error("raw input disabled; service runs in pose mode"))
            return
        try:
            record = parse_raw_message(msg)
        except (ValueError, TypeError) as exc:
            box.put(_error(str(exc)))
            return
        service.submit(_RawRecord(client=client_id, record=record))
    elif mtype == "trial":
        cmd = msg.get("cmd")
        if cmd not in ("start", "stop", "reset"):
            box.put(_error(f"unknown trial cmd {cmd!r}"))
            return
        service.submit(_TrialCommand(client=client_id, cmd=cmd))
    else:
        box.put(_error(f"unknown message type {mtype!r}"))


def _is_hello(text: str) -> bool:
    try:
        msg = json.loads(text)
    except json.JSONDecodeError:
        return False
    return isinstance(msg, dict) and msg.get("type") == "hello" and "role" in msg


# -- transport -------------------------------------------------------------------


def build_app(service: ServiceEngine, ui_dir: str | None = None):
    """Starlette app with the /session endpoint; the service engine starts
    with the app lifespan. With ui_dir, static client assets are served
    from that directory at the web root."""
    import asyncio
    from contextlib import asynccontextmanager

    from starlette.applications import Starlette
    from starlette.routing import WebSocketRoute
    from starlette.websockets import WebSocketDisconnect

    async def sender(websocket, box: ClientBox) -> None:
        next_ping = time.monotonic() + service.heartbeat_s
        try:
            while True:
                msgs, snap, closing, close_code = box.drain()
                for msg in msgs:
                    await websocket.send_text(canonical_json(msg))
                if snap is not None:
                    await websocket.send_text(canonical_json(snap))
                if closing:
                    await websocket.close(code=close_code)
                    return
                now = time.monotonic()
                if now >= next_ping:
                    if box.bump_ping() > HEARTBEAT_MISS_LIMIT:
                        await websocket.close(code=CLOSE_GOING_AWAY)
                        return
                    await websocket.send_text(canonical_json({"type": "ping"}))
                    next_ping = now + service.heartbeat_s
                await asyncio.sleep(SENDER_POLL_S)
        except (WebSocketDisconnect, RuntimeError):
            return  # peer vanished mid-send; receiver side cleans up

    async def session_endpoint(websocket) -> None:
        await websocket.accept()
        client_id, box = service.register()
        send_task = asyncio.ensure_future(sender(websocket, box))
        hello_done = False
        try:
            while not send_task.done():
                try:
                    text = await websocket.receive_text()
                except (WebSocketDisconnect, RuntimeError):
                    break
                if not hello_done:
                    if not _is_hello(text):
                        box.put(_error("hello must be the first message"))
                        box.request_close(CLOSE_PROTOCOL_ERROR)
                        break
                    box.put(service.hello_ack())
                    service.mark_hello(client_id)
                    hello_done = True
                    continue
                handle_client_message(service, client_id, box, text)
            await asyncio.wait({send_task}, timeout=2.0)
        finally:
            send_task.cancel()
            service.unregister(client_id)

    @asynccontextmanager
    async def lifespan(app):
        service.start()
        try:
            yield
        finally:
            service.stop()

    routes = [WebSocketRoute("/session", session_endpoint)]
    if ui_dir is not None:
        from starlette.routing import Mount
        from starlette.staticfiles import StaticFiles

        routes.append(Mount("/", app=StaticFiles(directory=ui_dir, html=True)))
    app = Starlette(routes=routes, lifespan=lifespan)
    app.state.service = service
    return app


def serve(port: int = 8765, scene: SceneConfig = SceneConfig(),
          calib: Calibration | None = None, host: str = "127.0.0.1",
          input_mode: str = INPUT_POSE, time_scale: float = 1.0,
          ui_dir: str | None = None) -> None:
    """Run the live service until interrupted."""
    import uvicorn

    service = ServiceEngine(scene, calib, input_mode=input_mode,
                            time_scale=time_scale)
    uvicorn.run(build_app(service, ui_dir=ui_dir), host=host, port=port,
                log_level="warning")
