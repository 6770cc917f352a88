import type { Resources, RunHandle, RunKpis, RunRequest, WhatIfPreview } from "./types.js";

const BASE = "/v1";

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const res = await fetch(`${BASE}${path}`, init);
  if (!res.ok) {
    let detail = res.statusText;
    try {
      const body = await res.json();
      detail = typeof body.detail === "string" ? body.detail : JSON.stringify(body.detail);
    } catch {
      /* keep the status text */
    }
    throw new Error(`${res.status}: ${detail}`);
  }
  return res.json() as Promise<T>;
}

export function fetchResources(): Promise<Resources> {
  return request<Resources>("/resources");
}

export function submitRun(config: RunRequest): Promise<RunHandle> {
  return request<RunHandle>("/runs", {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(config),
  });
}

export function fetchRuns(): Promise<{ runs: RunHandle[] }> {
  return request<{ runs: RunHandle[] }>("/runs");
}

export function fetchRunKpis(id: string): Promise<RunKpis> {
  return request<RunKpis>(`/runs/${id}/kpis`);
}

export interface WhatIfQuery {
  subtask_id: string;
  level: string;
  fatigue: number;
}

export function fetchWhatIf(query: WhatIfQuery): Promise<WhatIfPreview> {
  return request<WhatIfPreview>("/whatif", {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(query),
  });
}
