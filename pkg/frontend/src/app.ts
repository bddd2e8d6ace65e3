/** Browser entry point: wires the socket client, input mapping, three.js
 *  rendering (mono or red/cyan anaglyph), and the DOM HUD together.
 */

import * as THREE from "three";
import { TrainerClient } from "./client";
import {
  applyHaptic, applySnapshot, emptyHud, HudModel, metricsFromMessage,
  metricsSummary, pushEvent,
} from "./hud";
import { GamepadSample, InputMapper } from "./input";
import { SceneView } from "./scene";
import {
  cameraBasis, cameraPoseFromSnapshot, CameraPose, DEFAULT_EYE_SEPARATION_M,
  eyePoses,
} from "./view";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function wsUrl(): string {
  const override = new URLSearchParams(location.search).get("ws");
  if (override) return override;
  const scheme = location.protocol === "https:" ? "wss" : "ws";
  return `${scheme}://${location.host}/session`;
}

function main(): void {
  const canvas = el<HTMLCanvasElement>("view");
  const hud = emptyHud();
  let sceneView: SceneView | null = null;
  let camPose: CameraPose | null = null;
  let anaglyph = false;
  let totalTrials = 0;

  const renderer = new THREE.WebGLRenderer({ canvas, antialias: true });
  renderer.setPixelRatio(window.devicePixelRatio);
  const camera = new THREE.PerspectiveCamera(55, 1, 0.01, 5);
  const mapper = new InputMapper(
    { right: [1, 0, 0], up: [0, 1, 0], forward: [0, 0, -1] },
    undefined,
    // start controllers above the board, near where the instruments park
    [[-0.05, 0.08, 0], [0.05, 0.08, 0]],
  );

  const client = new TrainerClient(wsUrl(), (url) => new WebSocket(url), {
    onAck: (ack) => {
      sceneView = new SceneView(ack.scene);
      totalTrials = ack.scene.protocol.trials;
      hud.connection = "live";
      render();
    },
    onSnapshot: (snap) => {
      camPose = cameraPoseFromSnapshot(snap.camera);
      mapper.setCameraBasis(cameraBasis(camPose));
      sceneView?.update(snap);
      applySnapshot(hud, snap, totalTrials, client.isStale());
    },
    onEvent: (ev) => pushEvent(hud, ev),
    onMetrics: (m) => {
      hud.metrics = metricsFromMessage(m);
    },
    onHaptic: (h) => applyHaptic(hud, h.duration_ms, performance.now()),
    onError: (reason) => {
      hud.eventLines.push(`server: ${reason}`);
      if (hud.eventLines.length > 6) hud.eventLines.shift();
    },
    onClose: () => {
      hud.connection = "closed";
    },
  });

  // -- input wiring ----------------------------------------------------------

  let rotateHeld = false;
  canvas.addEventListener("click", () => canvas.requestPointerLock());
  window.addEventListener("mousemove", (e) => {
    if (document.pointerLockElement === canvas) {
      mapper.pointerDelta(e.movementX, e.movementY, rotateHeld);
    }
  });
  window.addEventListener("wheel", (e) => {
    if (document.pointerLockElement === canvas) mapper.wheel(e.deltaY);
  }, { passive: true });
  window.addEventListener("keydown", (e) => {
    if (e.repeat) return;
    switch (e.code) {
      case "ShiftLeft": case "ShiftRight": rotateHeld = true; break;
      case "Tab": e.preventDefault(); mapper.toggleActive(); break;
      case "Space": e.preventDefault(); mapper.toggleButton(); break;
      case "KeyC": mapper.setJawHeld(true); break;
      case "KeyA": anaglyph = !anaglyph; break;
      case "Enter": client.sendTrial("start"); break;
      case "Backspace": client.sendTrial("stop"); break;
      case "Delete": client.sendTrial("reset"); break;
    }
  });
  window.addEventListener("keyup", (e) => {
    switch (e.code) {
      case "ShiftLeft": case "ShiftRight": rotateHeld = false; break;
      case "KeyC": mapper.setJawHeld(false); break;
    }
  });
  el<HTMLButtonElement>("btn-start").onclick = () => client.sendTrial("start");
  el<HTMLButtonElement>("btn-stop").onclick = () => client.sendTrial("stop");
  el<HTMLButtonElement>("btn-reset").onclick = () => client.sendTrial("reset");
  el<HTMLButtonElement>("btn-anaglyph").onclick = () => { anaglyph = !anaglyph; };

  let padClutchWasDown = false;
  function readGamepad(): GamepadSample | undefined {
    const pad = navigator.getGamepads?.()[0];
    if (!pad) return undefined;
    const dead = (v: number) => (Math.abs(v) < 0.15 ? 0 : v);
    const clutchDown = pad.buttons[1]?.pressed ?? false;
    if (clutchDown && !padClutchWasDown) mapper.toggleButton();
    padClutchWasDown = clutchDown;
    return {
      planar: [dead(pad.axes[0] ?? 0), -dead(pad.axes[1] ?? 0)],
      depth: -dead(pad.axes[3] ?? 0),
      jawHeld: pad.buttons[0]?.pressed ?? false,
    };
  }

  // -- render loop -----------------------------------------------------------

  function resize(): void {
    const w = canvas.clientWidth;
    const h = canvas.clientHeight;
    if (canvas.width !== w || canvas.height !== h) {
      renderer.setSize(w, h, false);
      camera.aspect = w / Math.max(1, h);
      camera.updateProjectionMatrix();
    }
  }

  function setCamera(pose: CameraPose): void {
    camera.position.set(pose.position[0], pose.position[1], pose.position[2]);
    camera.quaternion.set(pose.rotation[1], pose.rotation[2], pose.rotation[3],
                          pose.rotation[0]);
  }

  function render(): void {
    if (!sceneView || !camPose) return;
    resize();
    const gl = renderer.getContext();
    if (!anaglyph) {
      gl.colorMask(true, true, true, true);
      renderer.autoClear = true;
      setCamera(camPose);
      renderer.render(sceneView.scene, camera);
      return;
    }
    const eyes = eyePoses(camPose, DEFAULT_EYE_SEPARATION_M);
    renderer.autoClear = false;
    renderer.clear(true, true, true);
    setCamera(eyes.left);
    gl.colorMask(true, false, false, true);
    renderer.render(sceneView.scene, camera);
    renderer.clearDepth();
    setCamera(eyes.right);
    gl.colorMask(false, true, true, true);
    renderer.render(sceneView.scene, camera);
    gl.colorMask(true, true, true, true);
  }

  function updateHudDom(nowMs: number): void {
    if (client.isStale()) hud.connection = "degraded";
    el("conn").textContent = hud.connection;
    el("conn").dataset.state = hud.connection;
    el("phase").textContent = hud.trialLabel ? `${hud.phase} ${hud.trialLabel}` : hud.phase;
    el("timer").textContent = hud.countdown;
    el("mode").textContent = hud.mode === "camera_adjust" ? "camera" : "";
    el("controller").textContent =
      `controller ${mapper.active}${mapper.state().button ? " (clutched)" : ""}` +
      `  jaw ${(mapper.state().jaw * 100).toFixed(0)}%`;
    el("metrics").textContent = hud.metrics
      ? `trial ${hud.metrics.trialId + 1}: ${metricsSummary(hud.metrics)}`
      : "no completed trials yet";
    el("events").textContent = hud.eventLines.join("\n");
    el("flash").style.opacity = nowMs < hud.flashUntilMs ? "1" : "0";
    el("btn-anaglyph").textContent = anaglyph ? "anaglyph: on" : "anaglyph: off";
  }

  let lastMs = performance.now();
  function frame(nowMs: number): void {
    const dt = Math.min(100, nowMs - lastMs);
    lastMs = nowMs;
    mapper.tick(dt, readGamepad());
    if (mapper.dirty && client.sendInput(mapper.state(), Date.now())) {
      mapper.dirty = false;
    }
    render();
    updateHudDom(nowMs);
    requestAnimationFrame(frame);
  }
  requestAnimationFrame(frame);
}

main();
