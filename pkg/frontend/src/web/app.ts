// DOM layer: wires the gateway socket to the state reducer and renders.
// All state changes go through reduce(); the render pass only reads.

import { FUNCTIONS } from "../shared/protocol.js";
import {
  acknowledgeTrips,
  initialState,
  reduce,
  validateSettingsPatch,
  type ConsoleState,
} from "../shared/state.js";

const state: ConsoleState = initialState();
let socket: WebSocket | null = null;
let nextId = 1;
const pending = new Map<number, (reply: any) => void>();

const $ = <T extends HTMLElement = HTMLElement>(sel: string) =>
  document.querySelector(sel) as T;

function send(op: string, fields: Record<string, unknown> = {}): Promise<any> {
  return new Promise((resolve, reject) => {
    if (!socket || socket.readyState !== WebSocket.OPEN) {
      reject(new Error("not connected"));
      return;
    }
    const id = nextId++;
    pending.set(id, resolve);
    socket.send(JSON.stringify({ id, op, ...fields }));
    setTimeout(() => {
      if (pending.delete(id)) reject(new Error(`request ${op} timed out`));
    }, 5000);
  });
}

function connect(): void {
  const url = `${location.protocol === "https:" ? "wss" : "ws"}://${location.host}/ws`;
  socket = new WebSocket(url);
  socket.onopen = async () => {
    state.connected = true;
    render();
    try {
      const hello = await send("ping");
      reduce(state, hello, performance.now());
      reduce(state, await send("get-config"), performance.now());
      await send("subscribe", { stream: "measurements" });
      await send("subscribe", { stream: "events" });
      fillSettingsForm();
    } catch (err) {
      showBanner(String(err));
    }
    render();
  };
  socket.onmessage = (evt) => {
    const msg = JSON.parse(evt.data as string);
    if (msg.id !== undefined && msg.id !== null && pending.has(msg.id)) {
      pending.get(msg.id)!(msg);
      pending.delete(msg.id);
    }
    reduce(state, msg, performance.now());
    render();
  };
  socket.onclose = () => {
    state.connected = false;
    render();
    setTimeout(() => {
      if (!state.connected) connect(); // retry with backoff-ish delay
    }, 2000);
  };
}

function showBanner(text: string): void {
  const el = $("#banner");
  el.textContent = text;
  el.classList.toggle("hidden", !text);
}

// -- rendering ----------------------------------------------------------------

function render(): void {
  const badge = $("#conn-state");
  badge.textContent = state.connected ? "connected" : "disconnected";
  badge.className = `badge ${state.connected ? "on" : "off"}`;
  $("#identity").textContent = state.identity;
  showBanner(state.lastError);

  $("#freq").textContent =
    state.frequencyHz === null ? "—" : state.frequencyHz.toFixed(3);
  if (state.frequencyHz !== null) {
    // display axis is pinned to the tracker's 40-70 Hz clamp band
    const frac = Math.min(1, Math.max(0, (state.frequencyHz - 40) / 30));
    $("#freq-marker").style.left = `${(frac * 100).toFixed(2)}%`;
  }

  const rms = $("#rms-grid");
  rms.innerHTML = "";
  for (const name of ["IA", "IB", "IC", "IN", "VA", "VB", "VC", "VN"]) {
    const value = state.rms[name];
    const div = document.createElement("div");
    const unit = name.startsWith("I") ? "A" : "V";
    div.textContent = `${name}: ${value === undefined ? "—" : fmtMag(value)} ${unit}`;
    rms.appendChild(div);
  }

  const lamps = $("#lamps");
  lamps.innerHTML = "";
  for (const fn of FUNCTIONS) {
    const lamp = state.lamps[fn];
    const div = document.createElement("div");
    div.className = "lamp";
    div.innerHTML =
      `${fn}<span class="dot ${lamp.pickup ? "pickup" : ""}" title="pickup"></span>` +
      `<span class="dot ${lamp.trip || lamp.latched ? "trip" : ""}" title="trip"></span>`;
    lamps.appendChild(div);
  }

  const tbody = $("#events tbody");
  tbody.innerHTML = "";
  for (const ev of state.events.slice(0, 30)) {
    const tr = document.createElement("tr");
    tr.innerHTML = `<td>${ev.t_s.toFixed(6)}</td><td>${ev.function}</td>` +
      `<td>${ev.transition}</td><td>${ev.loop ?? ""}</td>`;
    tbody.appendChild(tr);
  }

  const c = state.campaign;
  ($("#btn-cancel") as HTMLButtonElement).disabled = !c.running;
  ($("#btn-run") as HTMLButtonElement).disabled = c.running || !state.connected;
  $("#progress-bar").style.width = c.total
    ? `${((100 * c.done) / c.total).toFixed(1)}%`
    : "0";
  $("#progress-text").textContent = c.running
    ? `running ${c.done}/${c.total} ${c.scenario}`
    : c.stats
      ? `done (${c.cancelled ? "cancelled, partial results" : c.ok ? "all checks passed" : "finished with failed checks"})`
      : "";
  const stats = $("#stats tbody");
  stats.innerHTML = "";
  for (const row of c.stats ?? []) {
    const tr = document.createElement("tr");
    tr.innerHTML =
      `<td>${row.function}</td><td>${row.resistance_ohm}</td><td>${row.n}</td>` +
      `<td>${row.min_ms.toFixed(3)}</td><td>${row.mean_ms.toFixed(3)}</td>` +
      `<td>${row.max_ms.toFixed(3)}</td><td>${row.std_ms.toFixed(3)}</td>`;
    stats.appendChild(tr);
  }
  $("#applied").textContent = state.settings
    ? JSON.stringify(state.settings, null, 1)
    : "";
}

function fmtMag(v: number): string {
  if (v >= 100000) return (v / 1000).toFixed(1) + "k";
  return v.toFixed(1);
}

// -- settings form --------------------------------------------------------------

function fillSettingsForm(): void {
  if (!state.settings) return;
  const form = $("#settings-form") as HTMLFormElement;
  for (const input of Array.from(form.querySelectorAll("input"))) {
    const [fn, field] = input.name.split(".");
    const body = (state.settings as any)[fn];
    if (body && field in body) input.value = String(body[field]);
  }
}

function collectPatch(): Record<string, any> {
  const form = $("#settings-form") as HTMLFormElement;
  const patch: Record<string, any> = {};
  for (const input of Array.from(form.querySelectorAll("input"))) {
    if (input.value === "") continue;
    const [fn, field] = input.name.split(".");
    patch[fn] = patch[fn] ?? {};
    patch[fn][field] = Number(input.value);
  }
  return patch;
}

// -- wiring ----------------------------------------------------------------------

$("#btn-connect").addEventListener("click", () => connect());
$("#btn-ack").addEventListener("click", () => {
  acknowledgeTrips(state);
  render();
});
$("#btn-refresh").addEventListener("click", async () => {
  reduce(state, await send("get-config"), performance.now());
  fillSettingsForm();
  render();
});
($("#settings-form") as HTMLFormElement).addEventListener("submit", async (evt) => {
  evt.preventDefault();
  const patch = collectPatch();
  const problems = validateSettingsPatch(patch);
  $("#settings-problems").textContent = problems.join("; ");
  if (problems.length) return;
  const reply = await send("set-settings", patch);
  reduce(state, reply, performance.now());
  if (reply.ok) fillSettingsForm(); // rendered values are the echoed ones
  render();
});
$("#btn-run").addEventListener("click", async () => {
  const select = $("#scenario-select") as HTMLSelectElement;
  const chosen = Array.from(select.selectedOptions).map((o) => o.value);
  const repeats = Number(($("#repeats") as HTMLInputElement).value || "5");
  state.campaign = {
    running: true, done: 0, total: chosen.length || 48, scenario: "",
    stats: null, ok: null, cancelled: false,
  };
  render();
  await send("run-campaign", { scenarios: chosen, repeats });
});
$("#btn-cancel").addEventListener("click", () => send("cancel-campaign"));

// scenario list mirrors the campaign matrix
const select = $("#scenario-select") as HTMLSelectElement;
for (const ftype of ["AG", "BC", "BCG", "ABC"]) {
  for (const rf of [0, 15, 30, 50]) {
    for (const angle of [0, 45, 90]) {
      const option = document.createElement("option");
      option.value = `${ftype}_R${rf}_A${angle}`;
      option.textContent = option.value;
      select.appendChild(option);
    }
  }
}

connect();
