export const STATES = [
  "Cruise",
  "AWS",
  "Engine_Check",
  "Brake_Change",
  "Speed_Change",
] as const;

export const CHANNELS = ["T", "S", "SL", "SLS", "RoA", "ES", "PI"] as const;

export type StateName = (typeof STATES)[number];
export type ChannelName = (typeof CHANNELS)[number];

export type WeightMapping = Record<StateName, Record<ChannelName, number>>;

export type Variant = "nb" | "owo" | "owo_pi";
export const VARIANTS: Variant[] = ["nb", "owo", "owo_pi"];

export interface StateAccuracy {
  support: number;
  accuracy: Record<Variant, number>;
}

export interface EvalReport {
  variants: Variant[];
  states: Partial<Record<StateName, StateAccuracy>>;
  overall: Record<Variant, number>;
  total_rows: number;
  metadata: {
    weight_hash: string;
    route_hash?: string;
    split?: { train_runs: number[]; test_runs: number[] };
    [key: string]: unknown;
  };
}

export interface JobRecord {
  job_id: string;
  kind: string;
  status: "queued" | "running" | "done" | "failed";
  result_path: string | null;
  error: string | null;
}

export interface Timeline {
  run_id: string;
  seed: number;
  rows: number;
  stride: number;
  t: number[];
  S: number[];
  SL: number[];
  SLS: number[];
  state: string[];
  power: number[];
  brake: number[];
}

export interface RunInfo {
  id: string;
  seed: number;
  rows: number;
}
