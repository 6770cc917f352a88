import { describe, expect, it } from "vitest";

import { renderComparison, renderHistory, renderKpiSummary,
         renderWhatIf } from "../src/views.js";
import type { Resources, RunKpis, WhatIfPreview } from "../src/types.js";

const RESOURCES: Resources = {
  scenarios: [],
  strategies: [],
  levels: ["L0", "L1", "L2", "L3", "L4"],
  reward_profiles: ["four_outcome"],
  subtasks: [
    { id: "mf-qi-01", name: "Defect Analysis", domain: "manufacturing",
      task_type: "Quality Inspection", constraint: "none" },
  ],
};

function preview(overrides: Partial<WhatIfPreview> = {}): WhatIfPreview {
  return {
    subtask_id: "mf-qi-01",
    level: "L0",
    directive: { kind: "none", agent: null, mode: null, fired_rule_id: null,
                 warnings: [] },
    feasible_modes: ["HumanOnly", "Copilot", "Peer", "Supervised", "Autonomous"],
    modes: [
      { mode: "Copilot", sigma_h: 0.62, sigma_ai: 0.38, lead: "human",
        expected_quality: 0.55, expected_time: 3.1, expected_cost: 88.2,
        expected_reward: 0.61 },
    ],
    ...overrides,
  };
}

describe("what-if panel", () => {
  it("shows all five feasible modes at L0", () => {
    const html = renderWhatIf(RESOURCES, "manufacturing", "mf-qi-01", "L0", 0.0,
                              preview());
    for (const mode of ["HumanOnly", "Copilot", "Peer", "Supervised", "Autonomous"]) {
      expect(html).toContain(`mode-${mode}`);
    }
  });

  it("flips to a forced Supervised directive at L3", () => {
    const forced = preview({
      level: "L3",
      directive: { kind: "forced_mode", agent: null, mode: "Supervised",
                   fired_rule_id: "mfg_high_impact_sup", warnings: [] },
      feasible_modes: ["Supervised"],
    });
    const html = renderWhatIf(RESOURCES, "manufacturing", "mf-qi-01", "L3", 0.0,
                              forced);
    expect(html).toContain("forced_mode");
    expect(html).toContain("mfg_high_impact_sup");
    expect((html.match(/class="mode mode-/g) ?? []).length).toBe(1);
  });

  it("renders the copilot AI share byte-for-byte from the payload", () => {
    const payload = JSON.parse('{"sigma_ai": 0.38, "sigma_h": 0.62}');
    const p = preview();
    p.modes[0].sigma_ai = payload.sigma_ai;
    p.modes[0].sigma_h = payload.sigma_h;
    const html = renderWhatIf(RESOURCES, "manufacturing", "mf-qi-01", "L0", 0.8, p);
    expect(html).toContain('<td data-col="sigma_ai">0.38</td>');
    expect(html).toContain('<td data-col="sigma_h">0.62</td>');
  });

  it("shows the safety-rule badge on critical fatigue", () => {
    const forced = preview({
      directive: { kind: "forced_mode", agent: null, mode: "Autonomous",
                   fired_rule_id: "critical_fatigue_autonomous", warnings: [] },
      feasible_modes: ["Autonomous"],
    });
    const html = renderWhatIf(RESOURCES, "manufacturing", "mf-qi-01", "L2", 0.95,
                              forced);
    expect(html).toContain("critical_fatigue_autonomous");
    expect(html).toContain("rule-badge");
  });
});

function doneKpis(): RunKpis {
  return JSON.parse(JSON.stringify({
    handle: { id: "r1", status: "done",
              config: { strategy: "linucb", policies: false,
                        effective_level: "L0", seed: 11 } },
    per_sprint: [
      { sprint: 0, lead_time: 0.30000000000000004, cost_per_feature: 52.11,
        fatigue: 0.41, trust: 0.82, hybrid_pct: 50.0 },
      { sprint: 1, lead_time: 8.1, cost_per_feature: 49.75, fatigue: 0.39,
        trust: 0.83, hybrid_pct: 25.0 },
    ],
    aggregate: {
      objective: 50.93, lead_time: 7.9625, quality: 0.512, cost: 203.72,
      fatigue: 0.39, cum_regret: 2.0041, human_participation_pct: 38.8,
      hybrid_pct: 37.5, human_only_share_pct: 0.0, copilot_share_pct: 12.5,
      peer_share_pct: 25.0, supervised_share_pct: 43.75,
      autonomous_share_pct: 18.75,
    },
    screens: { acceptable: true, reasonable: false, responsible: false },
    mode_history: [
      { index: 0, cycle: 0, mode: "Peer", sigma_h: 0.5,
        task_type: "Quality Inspection", fired_rule_id: null, reward: 0.64 },
    ],
  }));
}

describe("KPI summary", () => {
  it("renders every aggregate value byte-for-byte", () => {
    const kpis = doneKpis();
    const html = renderKpiSummary(kpis);
    for (const [key, value] of Object.entries(kpis.aggregate!)) {
      expect(html).toContain(`data-kpi="${key}">${String(value)}<`);
    }
  });

  it("renders per-sprint cells without reformatting", () => {
    const html = renderKpiSummary(doneKpis());
    expect(html).toContain('<td data-col="lead_time">0.30000000000000004</td>');
  });

  it("shows an empty state before a run is selected", () => {
    expect(renderKpiSummary(null)).toContain("Select a completed run");
  });
});

describe("allocation history", () => {
  it("lists one row per decision with the fired rule", () => {
    const kpis = doneKpis();
    kpis.mode_history![0].fired_rule_id = "exp_autonomy_cap";
    const html = renderHistory(kpis);
    expect(html).toContain("exp_autonomy_cap");
    expect(html).toContain('data-col="reward">0.64<');
  });
});

describe("benchmark comparison", () => {
  it("renders a table row and a five-segment stacked bar per run", () => {
    const html = renderComparison([{ id: "r1", kpis: doneKpis() }]);
    expect(html).toContain('data-col="objective">50.93<');
    const segments = html.match(/data-share="/g) ?? [];
    expect(segments.length).toBe(4);   // the zero human-only share is omitted
    expect(html).toContain('data-share="43.75"');
  });

  it("shows the empty state without runs", () => {
    expect(renderComparison([])).toContain("Select one or more completed runs");
  });
});
