// Console session state and its reducer.  Every rendered value traces to
// a received message: the reducer is the only writer, the DOM layer only
// reads.  Keeping it pure (state + message -> state) lets the tests
// drive it without a browser.

import type {
  CampaignStatsRow,
  FunctionName,
  GatewayMessage,
} from "./protocol.js";
import { FUNCTIONS } from "./protocol.js";

export interface LampState {
  pickup: boolean;
  trip: boolean;
  latched: boolean; // trip stays lit until acknowledged
  lastChangeMs: number;
}

export interface EventRow {
  t_s: number;
  function: string;
  transition: string;
  loop: string | null;
  receivedMs: number;
}

export interface CampaignView {
  running: boolean;
  done: number;
  total: number;
  scenario: string;
  stats: CampaignStatsRow[] | null;
  ok: boolean | null;
  cancelled: boolean;
}

export interface ConsoleState {
  connected: boolean;
  identity: string;
  frequencyHz: number | null;
  rms: Record<string, number>;
  lamps: Record<FunctionName, LampState>;
  trip: boolean;
  events: EventRow[];
  settings: Record<string, unknown> | null;
  lastError: string;
  campaign: CampaignView;
}

export const MAX_EVENTS = 200;

export function initialState(): ConsoleState {
  const lamps = {} as Record<FunctionName, LampState>;
  for (const fn of FUNCTIONS) {
    lamps[fn] = { pickup: false, trip: false, latched: false, lastChangeMs: 0 };
  }
  return {
    connected: false,
    identity: "",
    frequencyHz: null,
    rms: {},
    lamps,
    trip: false,
    events: [],
    settings: null,
    lastError: "",
    campaign: {
      running: false,
      done: 0,
      total: 0,
      scenario: "",
      stats: null,
      ok: null,
      cancelled: false,
    },
  };
}

export function reduce(
  state: ConsoleState,
  msg: GatewayMessage,
  nowMs: number,
): ConsoleState {
  if ("stream" in msg && msg.stream === "events" && "event" in msg) {
    const ev = msg.event;
    state.events.unshift({
      t_s: ev.t_ns / 1e9,
      function: ev.function,
      transition: ev.transition,
      loop: ev.loop_id,
      receivedMs: nowMs,
    });
    if (state.events.length > MAX_EVENTS) state.events.length = MAX_EVENTS;
    const lamp = state.lamps[ev.function as FunctionName];
    if (lamp) {
      if (ev.transition === "pickup-rise") lamp.pickup = true;
      if (ev.transition === "pickup-fall") lamp.pickup = false;
      if (ev.transition === "trip-rise") {
        lamp.trip = true;
        lamp.latched = true;
      }
      if (ev.transition === "trip-fall") lamp.trip = false;
      lamp.lastChangeMs = nowMs;
    }
    return state;
  }
  if ("stream" in msg && msg.stream === "measurements" && "data" in msg) {
    const d = msg.data;
    state.frequencyHz = d.frequency_hz;
    state.rms = d.rms;
    state.trip = d.trip;
    for (const fn of FUNCTIONS) {
      const live = d.functions[fn];
      if (!live) continue;
      const lamp = state.lamps[fn];
      lamp.pickup = live.pickup;
      lamp.trip = live.trip;
      if (live.trip) lamp.latched = true;
    }
    return state;
  }
  if ("campaign" in msg) {
    if (msg.campaign === "progress") {
      state.campaign.running = true;
      state.campaign.done = msg.done;
      state.campaign.total = msg.total;
      state.campaign.scenario = msg.scenario ?? "";
    } else if (msg.campaign === "done") {
      state.campaign.running = false;
      state.campaign.stats = msg.stats;
      state.campaign.ok = msg.ok;
      state.campaign.cancelled = Boolean(msg.cancelled);
    }
    return state;
  }
  // request replies
  if ("applied" in msg && msg.applied) {
    state.settings = msg.applied as Record<string, unknown>;
  }
  if ("config" in msg && msg.config) {
    const cfg = msg.config as Record<string, unknown>;
    if (cfg.settings) state.settings = cfg.settings as Record<string, unknown>;
  }
  if ("uptime_s" in msg && msg.uptime_s !== undefined) {
    state.identity = `relay up ${msg.uptime_s}s, ${msg.samples ?? 0} samples`;
  }
  if ("ok" in msg && msg.ok === false) {
    const detail = "detail" in msg && msg.detail ? ": " + msg.detail : "";
    state.lastError = `${msg.error ?? "error"}${detail}`;
  }
  return state;
}

export function acknowledgeTrips(state: ConsoleState): void {
  for (const fn of FUNCTIONS) {
    state.lamps[fn].latched = false;
  }
}

// client-side mirror of the relay's settings invariants, checked before
// a set-settings is ever sent
export function validateSettingsPatch(patch: Record<string, any>): string[] {
  const problems: string[] = [];
  const positive = (path: string, v: unknown) => {
    if (typeof v !== "number" || !isFinite(v) || v <= 0) {
      problems.push(`${path} must be a positive number`);
    }
  };
  const nonNegative = (path: string, v: unknown) => {
    if (typeof v !== "number" || !isFinite(v) || v < 0) {
      problems.push(`${path} must be a non-negative number`);
    }
  };
  for (const fn of ["pioc", "ptoc", "pdir"]) {
    const body = patch[fn];
    if (!body) continue;
    if ("pickup_a" in body) positive(`${fn}.pickup_a`, body.pickup_a);
    if ("delay_s" in body) nonNegative(`${fn}.delay_s`, body.delay_s);
    if ("time_dial" in body) positive(`${fn}.time_dial`, body.time_dial);
  }
  for (const fn of ["ptov", "ptuv"]) {
    const body = patch[fn];
    if (!body) continue;
    if ("pickup_pu" in body) positive(`${fn}.pickup_pu`, body.pickup_pu);
    if ("delay_s" in body) nonNegative(`${fn}.delay_s`, body.delay_s);
  }
  const pdis = patch.pdis;
  if (pdis) {
    if ("reach_fraction" in pdis) {
      const v = pdis.reach_fraction;
      if (typeof v !== "number" || !(v > 0 && v <= 2)) {
        problems.push("pdis.reach_fraction must be in (0, 2]");
      }
    }
    if ("delay_s" in pdis) nonNegative("pdis.delay_s", pdis.delay_s);
  }
  return problems;
}
