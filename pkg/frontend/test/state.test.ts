import { describe, expect, it } from "vitest";

import { LatestWins, buildRunRequest, comparisonRows, formatCell, ladderPreset,
         scenariosForDomain, validateWizard } from "../src/state.js";
import type { WizardForm } from "../src/state.js";
import type { Resources, RunKpis } from "../src/types.js";

const RESOURCES: Resources = {
  scenarios: [
    { domain: "software", key: "standard_sprint", name: "Standard Sprint",
      cycles: 8, subtasks_per_cycle: 4 },
    { domain: "manufacturing", key: "standard_production", name: "Standard Production",
      cycles: 8, subtasks_per_cycle: 4 },
  ],
  strategies: ["ucb1", "ducb", "linucb", "thompson", "affinity_heuristic",
               "random", "human_scheduler", "fixed_human", "ai_only", "oracle"],
  levels: ["L0", "L1", "L2", "L3", "L4"],
  reward_profiles: ["cost_time", "four_outcome", "quality_cost_time"],
  subtasks: [],
};

function form(overrides: Partial<WizardForm> = {}): WizardForm {
  return {
    domain: "manufacturing",
    scenario: "standard_production",
    strategy: "linucb",
    policies: true,
    governance_level: "L3",
    seed: "11",
    cycles: "",
    reward_profile: "four_outcome",
    ...overrides,
  };
}

describe("wizard validation", () => {
  it("accepts a well-formed selection", () => {
    expect(validateWizard(form(), RESOURCES)).toEqual([]);
  });

  it("rejects zero cycles with an inline field error", () => {
    const errors = validateWizard(form({ cycles: "0" }), RESOURCES);
    expect(errors).toHaveLength(1);
    expect(errors[0].field).toBe("cycles");
  });

  it("rejects an unknown governance level, naming the field", () => {
    const errors = validateWizard(form({ governance_level: "L5" }), RESOURCES);
    expect(errors.map((e) => e.field)).toContain("governance_level");
  });

  it("rejects a scenario from the wrong domain", () => {
    const errors = validateWizard(form({ scenario: "standard_sprint" }), RESOURCES);
    expect(errors.map((e) => e.field)).toContain("scenario");
  });

  it("rejects negative and fractional seeds", () => {
    expect(validateWizard(form({ seed: "-1" }), RESOURCES)).toHaveLength(1);
    expect(validateWizard(form({ seed: "1.5" }), RESOURCES)).toHaveLength(1);
  });
});

describe("run request assembly", () => {
  it("echoes the selections exactly", () => {
    const request = buildRunRequest(form());
    expect(request).toEqual({
      domain: "manufacturing",
      scenario: "standard_production",
      strategy: "linucb",
      policies: true,
      governance_level: "L3",
      seed: 11,
      cycles: null,
      reward_profile: "four_outcome",
    });
  });

  it("ladder preset submits one config per level", () => {
    const configs = ladderPreset(form(), RESOURCES.levels);
    expect(configs.map((c) => c.governance_level)).toEqual(
      ["L0", "L1", "L2", "L3", "L4"]);
    expect(configs[0].policies).toBe(false);       // L0 disables the policy layer
    expect(configs.slice(1).every((c) => c.policies)).toBe(true);
  });
});

describe("byte-traceable cell rendering", () => {
  it("renders parsed JSON numbers with their canonical representation", () => {
    const payload = JSON.parse(
      '{"fatigue":0.734,"objective":161.48,"share":0.3799999999999999,"n":32}');
    expect(formatCell(payload.fatigue)).toBe("0.734");
    expect(formatCell(payload.objective)).toBe("161.48");
    expect(formatCell(payload.share)).toBe("0.3799999999999999");
    expect(formatCell(payload.n)).toBe("32");
  });

  it("renders nullish values as empty cells", () => {
    expect(formatCell(null)).toBe("");
    expect(formatCell(undefined)).toBe("");
  });
});

describe("request sequencing", () => {
  it("renders only the latest in-flight response", () => {
    const seq = new LatestWins();
    const first = seq.issue();
    const second = seq.issue();
    expect(seq.shouldRender(second)).toBe(true);
    expect(seq.shouldRender(first)).toBe(false);    // stale response discarded
  });
});

function kpisFixture(id: string, shares: number[]): { id: string; kpis: RunKpis } {
  const [ho, co, pe, su, au] = shares;
  return {
    id,
    kpis: {
      handle: {
        id, status: "done",
        config: { strategy: "linucb", policies: true, effective_level: "L2", seed: 11 },
      },
      aggregate: {
        objective: 52.1, lead_time: 7.7, quality: 0.55, cost: 208.5, fatigue: 0.43,
        cum_regret: 1.9, human_participation_pct: 40.0, hybrid_pct: 60.0,
        human_only_share_pct: ho, copilot_share_pct: co, peer_share_pct: pe,
        supervised_share_pct: su, autonomous_share_pct: au,
      },
    },
  };
}

describe("comparison assembly", () => {
  it("collects rows whose stacked mode shares sum to 100", () => {
    const rows = comparisonRows([
      kpisFixture("a", [10, 20, 30, 25, 15]),
      kpisFixture("b", [0, 0, 6.25, 68.75, 25]),
    ]);
    expect(rows).toHaveLength(2);
    for (const row of rows) {
      const total = row.modeShares.reduce((x, y) => x + y, 0);
      expect(total).toBeCloseTo(100.0, 9);
    }
    expect(rows[0].values.objective).toBe("52.1");
  });

  it("skips runs that have no aggregate yet", () => {
    const pending: RunKpis = {
      handle: { id: "x", status: "running", config: {} },
    };
    expect(comparisonRows([{ id: "x", kpis: pending }])).toEqual([]);
  });
});

describe("scenario filtering", () => {
  it("filters the catalogue by domain", () => {
    expect(scenariosForDomain(RESOURCES, "software").map((s) => s.key))
      .toEqual(["standard_sprint"]);
  });
});
