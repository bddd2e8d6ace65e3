/** HUD model: everything shown is lifted verbatim from server messages.
 *
 *  The four metric numbers (transfers, drops, mean transfer time, path
 *  length) come from the newest metrics message; the timer and phase come
 *  from the newest snapshot. The client computes nothing itself.
 */

import { EventMsg, MetricsMsg, PhaseInfo, StateMsg } from "./protocol";

export interface HudMetrics {
  trialId: number;
  transfers: number;
  drops: number;
  avgTransferS: number | null;
  pathLengthM: number;
  truncated: boolean;
}

export interface HudModel {
  connection: "connecting" | "live" | "degraded" | "closed";
  phase: string;
  trialLabel: string;
  countdown: string;
  mode: string;
  metrics: HudMetrics | null;
  eventLines: string[];
  /** Wall-clock ms until which the haptic flash stays visible. */
  flashUntilMs: number;
}

export function emptyHud(): HudModel {
  return {
    connection: "connecting",
    phase: "idle",
    trialLabel: "",
    countdown: "--:--",
    mode: "normal",
    metrics: null,
    eventLines: [],
    flashUntilMs: 0,
  };
}

export function metricsFromMessage(m: MetricsMsg): HudMetrics {
  return {
    trialId: m.trial_id,
    transfers: m.transfers,
    drops: m.drops,
    avgTransferS: m.avg_transfer_time_s,
    pathLengthM: m.total_path_length_m,
    truncated: m.truncated,
  };
}

/** Remaining time in the phase as m:ss; open-ended phases show --:--. */
export function formatCountdown(phase: PhaseInfo): string {
  if (phase.duration_s === null || phase.duration_s === undefined) return "--:--";
  const left = Math.max(0, phase.duration_s - phase.elapsed_s);
  const wholeSeconds = Math.ceil(left);
  const m = Math.floor(wholeSeconds / 60);
  const s = wholeSeconds % 60;
  return `${m}:${String(s).padStart(2, "0")}`;
}

export function trialLabel(phase: PhaseInfo, totalTrials: number): string {
  if (phase.trial_index === null) return "";
  return `trial ${phase.trial_index + 1}/${totalTrials}`;
}

/** "transfers 6 / drops 2" plus the time and distance pair. */
export function metricsSummary(m: HudMetrics): string {
  const avg = m.avgTransferS === null ? "-" : `${m.avgTransferS.toFixed(2)} s`;
  return `transfers ${m.transfers} / drops ${m.drops}  ·  ${avg} per transfer  ·  ` +
    `${m.pathLengthM.toFixed(3)} m${m.truncated ? "  (truncated)" : ""}`;
}

export function eventLine(ev: EventMsg): string {
  const t = (ev.t_us / 1e6).toFixed(2);
  const extras = Object.entries(ev.data)
    .map(([k, v]) => `${k}=${String(v)}`)
    .join(" ");
  return extras ? `${t}s ${ev.kind} (${extras})` : `${t}s ${ev.kind}`;
}

export function applySnapshot(hud: HudModel, snap: StateMsg, totalTrials: number,
                              stale: boolean): void {
  hud.connection = stale ? "degraded" : "live";
  hud.phase = snap.phase.name;
  hud.trialLabel = trialLabel(snap.phase, totalTrials);
  hud.countdown = formatCountdown(snap.phase);
  hud.mode = snap.mode;
}

export function pushEvent(hud: HudModel, ev: EventMsg, keep = 6): void {
  hud.eventLines.push(eventLine(ev));
  if (hud.eventLines.length > keep) hud.eventLines.shift();
}

/** Haptic pulses become a screen flash lasting the pulse duration. */
export function applyHaptic(hud: HudModel, durationMs: number, nowMs: number): void {
  hud.flashUntilMs = Math.max(hud.flashUntilMs, nowMs + durationMs);
}
