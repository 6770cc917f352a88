// Payload shapes of the workbench v1 API. The UI renders these values
// verbatim; it never recomputes a KPI client-side.
export const MODE_ORDER = ["HumanOnly", "Copilot", "Peer", "Supervised", "Autonomous"];
export const MODE_SHARE_COLUMNS = [
    "human_only_share_pct",
    "copilot_share_pct",
    "peer_share_pct",
    "supervised_share_pct",
    "autonomous_share_pct",
];
// stable export column order for the comparison table
export const COMPARISON_COLUMNS = [
    "objective", "lead_time", "quality", "cost", "fatigue", "cum_regret",
    "human_participation_pct", "hybrid_pct", "supervised_share_pct",
    "autonomous_share_pct",
];
