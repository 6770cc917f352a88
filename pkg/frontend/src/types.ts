// Payload shapes of the workbench v1 API. The UI renders these values
// verbatim; it never recomputes a KPI client-side.

export interface ScenarioInfo {
  domain: string;
  key: string;
  name: string;
  cycles: number;
  subtasks_per_cycle: number;
}

export interface SubtaskInfo {
  id: string;
  name: string;
  domain: string;
  task_type: string;
  constraint: string;
}

export interface Resources {
  scenarios: ScenarioInfo[];
  strategies: string[];
  levels: string[];
  reward_profiles: string[];
  subtasks: SubtaskInfo[];
}

export interface RunRequest {
  domain: string;
  scenario: string;
  strategy: string;
  policies: boolean;
  governance_level?: string | null;
  seed: number;
  cycles?: number | null;
  reward_profile: string;
}

export interface RunHandle {
  id: string;
  status: "queued" | "running" | "done" | "failed";
  config: Record<string, unknown>;
  submitted_at?: number;
  finished_at?: number | null;
  error?: string | null;
}

export type SprintRow = Record<string, number>;
export type Aggregate = Record<string, number>;

export interface ModeHistoryEntry {
  index: number;
  cycle: number;
  mode: string;
  sigma_h: number;
  task_type: string;
  fired_rule_id: string | null;
  reward: number;
}

export interface RunKpis {
  handle: RunHandle;
  per_sprint?: SprintRow[];
  aggregate?: Aggregate;
  screens?: Record<string, boolean>;
  mode_history?: ModeHistoryEntry[];
}

export interface WhatIfModeRow {
  mode: string;
  sigma_h: number;
  sigma_ai: number;
  lead: string;
  expected_quality: number;
  expected_time: number;
  expected_cost: number;
  expected_reward: number;
}

export interface WhatIfPreview {
  subtask_id: string;
  level: string;
  directive: {
    kind: string;
    agent: string | null;
    mode: string | null;
    fired_rule_id: string | null;
    warnings: string[];
  };
  feasible_modes: string[];
  modes: WhatIfModeRow[];
}

export const MODE_ORDER = ["HumanOnly", "Copilot", "Peer", "Supervised", "Autonomous"] as const;

export const MODE_SHARE_COLUMNS = [
  "human_only_share_pct",
  "copilot_share_pct",
  "peer_share_pct",
  "supervised_share_pct",
  "autonomous_share_pct",
] as const;

// stable export column order for the comparison table
export const COMPARISON_COLUMNS = [
  "objective", "lead_time", "quality", "cost", "fatigue", "cum_regret",
  "human_participation_pct", "hybrid_pct", "supervised_share_pct",
  "autonomous_share_pct",
] as const;
