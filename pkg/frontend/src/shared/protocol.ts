// Station-bus message shapes as seen through the gateway socket.
// The gateway maps TCP lines to socket frames 1:1, so these mirror the
// relay's protocol; campaign messages are produced by the gateway itself.

export interface StationReply {
  id?: number | null;
  ok?: boolean;
  error?: string;
  detail?: string;
  uptime_s?: number;
  samples?: number;
  config?: Record<string, unknown>;
  applied?: Record<string, unknown>;
  stream?: string;
}

export interface EventMessage {
  stream: "events";
  event: {
    t_ns: number;
    sample_index: number;
    function: string;
    transition: string;
    loop_id: string | null;
    magnitudes: Record<string, number>;
  };
}

export interface MeasurementMessage {
  stream: "measurements";
  data: {
    sample_index: number;
    t_s: number;
    frequency_hz: number;
    rms: Record<string, number>;
    functions: Record<string, { pickup: boolean; trip: boolean }>;
    trip: boolean;
  };
}

export interface CampaignProgress {
  campaign: "progress";
  id?: number;
  done: number;
  total: number;
  scenario?: string;
  line?: string;
}

export interface CampaignDone {
  campaign: "done";
  id?: number;
  ok: boolean;
  exit_code: number | null;
  cancelled?: boolean;
  stats: CampaignStatsRow[];
  summary?: Record<string, unknown>;
}

export interface CampaignStatsRow {
  function: string;
  resistance_ohm: number;
  n: number;
  min_ms: number;
  mean_ms: number;
  max_ms: number;
  std_ms: number;
}

export type GatewayMessage =
  | StationReply
  | EventMessage
  | MeasurementMessage
  | CampaignProgress
  | CampaignDone;

export const FUNCTIONS = ["PIOC", "PTOC", "PDIS", "PDIR", "PTOV", "PTUV"] as const;
export type FunctionName = (typeof FUNCTIONS)[number];
