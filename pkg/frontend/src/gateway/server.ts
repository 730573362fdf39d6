// Thin bridge between the relay's station-bus TCP protocol and a
// browser-friendly socket.  Station traffic maps 1:1 (one TCP line, one
// socket frame) so the browser speaks the relay's own protocol; the only
// gateway-level operations are run-campaign / cancel-campaign, which
// drive the test-set CLI and stream its progress back.

import { spawn, type ChildProcess } from "node:child_process";
import { readFileSync, mkdtempSync, writeFileSync, existsSync } from "node:fs";
import { createServer, type Server } from "node:http";
import * as net from "node:net";
import { tmpdir } from "node:os";
import * as path from "node:path";
import { WebSocketServer, WebSocket } from "ws";

export interface GatewayOptions {
  relayHost: string;
  relayPort: number;
  listenPort: number;
  staticDir?: string;
  testsetCommand?: string[]; // e.g. ["testset"] or ["python3", "-m", "vied.testkit.cli"]
}

interface CampaignRun {
  child: ChildProcess;
  outDir: string;
  id: number | null;
  cancelled: boolean;
}

export class Gateway {
  private http: Server;
  private wss: WebSocketServer;
  readonly options: GatewayOptions;

  constructor(options: GatewayOptions) {
    this.options = options;
    this.http = createServer((req, res) => this.serveStatic(req.url ?? "/", res));
    this.wss = new WebSocketServer({ server: this.http, path: "/ws" });
    this.wss.on("connection", (socket) => this.bridge(socket));
  }

  listen(): Promise<number> {
    return new Promise((resolve) => {
      this.http.listen(this.options.listenPort, () => {
        const addr = this.http.address();
        resolve(typeof addr === "object" && addr ? addr.port : this.options.listenPort);
      });
    });
  }

  close(): void {
    this.wss.close();
    this.http.close();
  }

  private serveStatic(url: string, res: import("node:http").ServerResponse): void {
    const dir = this.options.staticDir;
    if (!dir) {
      res.writeHead(404).end();
      return;
    }
    const name = url === "/" ? "index.html" : url.slice(1);
    if (name.includes("..")) {
      res.writeHead(400).end();
      return;
    }
    const file = path.join(dir, name);
    if (!existsSync(file)) {
      res.writeHead(404).end("not found");
      return;
    }
    const types: Record<string, string> = {
      ".html": "text/html",
      ".js": "text/javascript",
      ".css": "text/css",
    };
    res.writeHead(200, {
      "content-type": types[path.extname(file)] ?? "application/octet-stream",
    });
    res.end(readFileSync(file));
  }

  // one relay TCP connection per browser session, lines <-> frames
  private bridge(socket: WebSocket): void {
    const tcp = net.createConnection({
      host: this.options.relayHost,
      port: this.options.relayPort,
    });
    let campaign: CampaignRun | null = null;
    let buffer = "";

    tcp.on("data", (chunk) => {
      buffer += chunk.toString("utf-8");
      let idx;
      while ((idx = buffer.indexOf("\n")) >= 0) {
        const line = buffer.slice(0, idx);
        buffer = buffer.slice(idx + 1);
        if (line.trim() && socket.readyState === WebSocket.OPEN) {
          socket.send(line);
        }
      }
    });
    tcp.on("error", (err) => {
      if (socket.readyState === WebSocket.OPEN) {
        socket.send(JSON.stringify({ ok: false, error: "relay-unreachable", detail: String(err) }));
      }
      socket.close();
    });
    tcp.on("close", () => socket.close());

    socket.on("message", (data) => {
      const text = data.toString();
      let parsed: any = null;
      try {
        parsed = JSON.parse(text);
      } catch {
        // let the relay produce its malformed-message reply
      }
      if (parsed && parsed.op === "run-campaign") {
        campaign = this.runCampaign(socket, parsed, campaign);
        return;
      }
      if (parsed && parsed.op === "cancel-campaign") {
        if (campaign && !campaign.child.killed) {
          campaign.cancelled = true;
          campaign.child.kill("SIGINT");
          socket.send(JSON.stringify({ id: parsed.id ?? null, ok: true, cancelling: true }));
        } else {
          socket.send(JSON.stringify({ id: parsed.id ?? null, ok: false, error: "no-campaign" }));
        }
        return;
      }
      tcp.write(text + "\n");
    });
    socket.on("close", () => {
      tcp.destroy();
      if (campaign && !campaign.child.killed) campaign.child.kill("SIGINT");
    });
  }

  private runCampaign(socket: WebSocket, request: any, previous: CampaignRun | null): CampaignRun | null {
    if (previous && !previous.child.killed && previous.child.exitCode === null) {
      socket.send(JSON.stringify({ id: request.id ?? null, ok: false, error: "campaign-running" }));
      return previous;
    }
    const outDir = mkdtempSync(path.join(tmpdir(), "console-campaign-"));
    const repeats = Number(request.repeats ?? 5);
    const seed = Number(request.seed ?? 1);
    const args: string[] = [
      "run",
      "--out", outDir,
      "--repeats", String(Math.max(1, repeats)),
      "--seed", String(seed),
    ];
    const scenarios: string[] = Array.isArray(request.scenarios) ? request.scenarios : [];
    let total = 48;
    if (scenarios.length) {
      const file = path.join(outDir, "scenarios.json");
      writeFileSync(
        file,
        JSON.stringify(scenarios.map((sid) => scenarioFromId(sid))),
      );
      args.push("--scenarios", file);
      total = scenarios.length;
    }
    const cmd = this.options.testsetCommand ?? ["testset"];
    const child = spawn(cmd[0], [...cmd.slice(1), ...args], { stdio: ["ignore", "pipe", "pipe"] });
    const run: CampaignRun = { child, outDir, id: request.id ?? null, cancelled: false };
    socket.send(JSON.stringify({ id: run.id, ok: true, campaign: "started", total }));

    let done = 0;
    let lineBuf = "";
    child.stdout!.on("data", (chunk) => {
      lineBuf += chunk.toString();
      let idx;
      while ((idx = lineBuf.indexOf("\n")) >= 0) {
        const line = lineBuf.slice(0, idx);
        lineBuf = lineBuf.slice(idx + 1);
        const m = /^\[(\d+)\/(\d+)\]\s+(\S+):/.exec(line);
        if (m && socket.readyState === WebSocket.OPEN) {
          done = Number(m[1]);
          socket.send(
            JSON.stringify({
              campaign: "progress",
              id: run.id,
              done,
              total: Number(m[2]),
              scenario: m[3],
            }),
          );
        }
      }
    });
    child.stderr!.resume();
    child.on("exit", (code) => {
      const stats = readStats(path.join(outDir, "stats.csv"));
      const summary = readJson(path.join(outDir, "summary.json"));
      if (socket.readyState === WebSocket.OPEN) {
        socket.send(
          JSON.stringify({
            campaign: "done",
            id: run.id,
            ok: code === 0,
            exit_code: code,
            cancelled: run.cancelled,
            stats,
            summary,
          }),
        );
      }
    });
    return run;
  }
}

export function scenarioFromId(sid: string): Record<string, unknown> {
  const m = /^(AG|BC|BCG|ABC)_R([\d.]+)_A([\d.]+)$/.exec(sid);
  if (!m) throw new Error(`bad scenario id ${sid}`);
  return {
    fault_type: m[1],
    resistance_ohm: Number(m[2]),
    inception_angle_deg: Number(m[3]),
  };
}

function readStats(file: string) {
  if (!existsSync(file)) return [];
  const lines = readFileSync(file, "utf-8").trim().split("\n");
  const rows = [];
  for (const line of lines.slice(1)) {
    const [fn, rf, n, min, mean, max, std] = line.split(",");
    rows.push({
      function: fn,
      resistance_ohm: Number(rf),
      n: Number(n),
      min_ms: Number(min),
      mean_ms: Number(mean),
      max_ms: Number(max),
      std_ms: Number(std),
    });
  }
  return rows;
}

function readJson(file: string) {
  if (!existsSync(file)) return undefined;
  try {
    return JSON.parse(readFileSync(file, "utf-8"));
  } catch {
    return undefined;
  }
}
