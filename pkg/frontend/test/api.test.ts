import { afterEach, describe, expect, it, vi } from "vitest";

import { fetchResources, fetchRunKpis, fetchWhatIf, submitRun } from "../src/api.js";

function mockFetch(status: number, body: unknown) {
  const fn = vi.fn(async () => ({
    ok: status >= 200 && status < 300,
    status,
    statusText: String(status),
    json: async () => body,
  }));
  vi.stubGlobal("fetch", fn);
  return fn;
}

afterEach(() => vi.unstubAllGlobals());

describe("api client", () => {
  it("fetches resources from /v1/resources", async () => {
    const fn = mockFetch(200, { scenarios: [], strategies: [], levels: [],
                                reward_profiles: [], subtasks: [] });
    await fetchResources();
    expect(fn).toHaveBeenCalledWith("/v1/resources", undefined);
  });

  it("posts run configs as JSON", async () => {
    const fn = mockFetch(202, { id: "abc", status: "queued", config: {} });
    const handle = await submitRun({
      domain: "software", scenario: "standard_sprint", strategy: "linucb",
      policies: true, governance_level: null, seed: 11, cycles: null,
      reward_profile: "four_outcome",
    });
    expect(handle.id).toBe("abc");
    const [url, init] = fn.mock.calls[0] as unknown as [string, RequestInit];
    expect(url).toBe("/v1/runs");
    expect(init.method).toBe("POST");
    expect(JSON.parse(init.body as string).seed).toBe(11);
  });

  it("requests kpis for a specific run", async () => {
    const fn = mockFetch(200, { handle: { id: "x", status: "done", config: {} } });
    await fetchRunKpis("x");
    expect(fn).toHaveBeenCalledWith("/v1/runs/x/kpis", undefined);
  });

  it("posts what-if queries and returns the preview", async () => {
    const fn = mockFetch(200, { subtask_id: "mf-qi-01", level: "L3",
                                directive: {}, feasible_modes: [], modes: [] });
    const preview = await fetchWhatIf({ subtask_id: "mf-qi-01", level: "L3",
                                        fatigue: 0.5 });
    expect(preview.level).toBe("L3");
    const [url, init] = fn.mock.calls[0] as unknown as [string, RequestInit];
    expect(url).toBe("/v1/whatif");
    expect(JSON.parse(init.body as string).fatigue).toBe(0.5);
  });

  it("surfaces structured error details", async () => {
    mockFetch(422, { detail: "unknown governance level 'L5'" });
    await expect(fetchWhatIf({ subtask_id: "x", level: "L5", fatigue: 0 }))
      .rejects.toThrow(/governance level 'L5'/);
  });
});
