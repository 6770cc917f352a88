// Bootstrap: tab navigation, 1s status polling, and event wiring around the
// pure view renderers.

import { fetchResources, fetchRunKpis, fetchRuns, fetchWhatIf, submitRun } from "./api.js";
import { LatestWins, activeRunIds, buildRunRequest, ladderPreset,
         validateWizard } from "./state.js";
import type { WizardForm } from "./state.js";
import { renderComparison, renderHistory, renderKpiSummary, renderRunList,
         renderWhatIf, renderWizard } from "./views.js";
import type { Resources, RunHandle, RunKpis, WhatIfPreview } from "./types.js";

type Tab = "wizard" | "kpis" | "history" | "comparison" | "whatif";

const state = {
  resources: null as Resources | null,
  tab: "wizard" as Tab,
  domain: "software",
  handles: [] as RunHandle[],
  selected: new Set<string>(),
  focusedRun: null as string | null,
  kpiCache: new Map<string, RunKpis>(),
  whatif: {
    domain: "manufacturing",
    subtaskId: "",
    level: "L0",
    fatigue: 0.0,
    preview: null as WhatIfPreview | null,
    error: null as string | null,
  },
  wizardErrors: [] as { field: string; message: string }[],
  sequencer: new LatestWins(),
};

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function currentWizardForm(): WizardForm {
  return {
    domain: el<HTMLSelectElement>("w-domain").value,
    scenario: el<HTMLSelectElement>("w-scenario").value,
    strategy: el<HTMLSelectElement>("w-strategy").value,
    policies: el<HTMLSelectElement>("w-policies").value === "on",
    governance_level: el<HTMLSelectElement>("w-level").value || null,
    seed: el<HTMLInputElement>("w-seed").value,
    cycles: el<HTMLInputElement>("w-cycles").value,
    reward_profile: el<HTMLSelectElement>("w-profile").value,
  };
}

async function refreshRuns(): Promise<void> {
  const { runs } = await fetchRuns();
  state.handles = runs;
  for (const id of Array.from(state.kpiCache.keys())) {
    if (!runs.some((h) => h.id === id)) state.kpiCache.delete(id);
  }
  for (const handle of runs) {
    if (handle.status === "done" && !state.kpiCache.has(handle.id)) {
      state.kpiCache.set(handle.id, await fetchRunKpis(handle.id));
    }
  }
  renderRuns();
}

function renderRuns(): void {
  el("run-list").innerHTML = renderRunList(state.handles, state.selected);
  for (const box of document.querySelectorAll<HTMLInputElement>(".run-select")) {
    box.addEventListener("change", () => {
      const id = box.dataset.run!;
      if (box.checked) state.selected.add(id);
      else state.selected.delete(id);
      state.focusedRun = box.checked ? id : state.focusedRun;
      renderMain();
    });
  }
}

function renderMain(): void {
  const main = el("main-view");
  if (state.tab === "wizard") {
    main.innerHTML = renderWizard(state.resources!, state.domain, state.wizardErrors);
    wireWizard();
  } else if (state.tab === "kpis") {
    const kpis = state.focusedRun ? state.kpiCache.get(state.focusedRun) ?? null : null;
    main.innerHTML = renderKpiSummary(kpis);
  } else if (state.tab === "history") {
    const kpis = state.focusedRun ? state.kpiCache.get(state.focusedRun) ?? null : null;
    main.innerHTML = renderHistory(kpis);
  } else if (state.tab === "comparison") {
    const entries = Array.from(state.selected)
      .filter((id) => state.kpiCache.has(id))
      .map((id) => ({ id, kpis: state.kpiCache.get(id)! }));
    main.innerHTML = renderComparison(entries);
  } else {
    const w = state.whatif;
    main.innerHTML = renderWhatIf(state.resources!, w.domain, w.subtaskId, w.level,
                                  w.fatigue, w.preview, w.error);
    wireWhatIf();
  }
}

function wireWizard(): void {
  el<HTMLSelectElement>("w-domain").addEventListener("change", () => {
    state.domain = el<HTMLSelectElement>("w-domain").value;
    state.wizardErrors = [];
    renderMain();
  });
  el<HTMLFormElement>("wizard-form").addEventListener("submit", async (event) => {
    event.preventDefault();
    const form = currentWizardForm();
    state.wizardErrors = validateWizard(form, state.resources!);
    if (state.wizardErrors.length > 0) {
      renderMain();
      return;
    }
    await submitRun(buildRunRequest(form));
    await refreshRuns();
  });
  el("w-ladder").addEventListener("click", async () => {
    const form = currentWizardForm();
    state.wizardErrors = validateWizard(form, state.resources!);
    if (state.wizardErrors.length > 0) {
      renderMain();
      return;
    }
    for (const config of ladderPreset(form, state.resources!.levels)) {
      await submitRun(config);
    }
    await refreshRuns();
  });
}

function wireWhatIf(): void {
  const requery = async () => {
    const w = state.whatif;
    w.domain = el<HTMLSelectElement>("q-domain").value;
    const chosen = el<HTMLSelectElement>("q-subtask").value;
    w.subtaskId = chosen || state.resources!.subtasks
      .filter((s) => s.domain === w.domain)[0]?.id || "";
    w.level = el<HTMLSelectElement>("q-level").value;
    w.fatigue = Number(el<HTMLInputElement>("q-fatigue").value);
    const seq = state.sequencer.issue();
    try {
      const preview = await fetchWhatIf({
        subtask_id: w.subtaskId, level: w.level, fatigue: w.fatigue,
      });
      if (state.sequencer.shouldRender(seq)) {
        w.preview = preview;
        w.error = null;
        renderMain();
      }
    } catch (err) {
      if (state.sequencer.shouldRender(seq)) {
        w.error = String(err);
        renderMain();
      }
    }
  };
  for (const id of ["q-domain", "q-subtask", "q-level", "q-fatigue"]) {
    el(id).addEventListener("change", requery);
  }
  el("q-fatigue").addEventListener("input", requery);
}

function wireTabs(): void {
  for (const button of document.querySelectorAll<HTMLButtonElement>("[data-tab]")) {
    button.addEventListener("click", () => {
      state.tab = button.dataset.tab as Tab;
      for (const other of document.querySelectorAll("[data-tab]")) {
        other.classList.toggle("active", other === button);
      }
      renderMain();
    });
  }
}

async function bootstrap(): Promise<void> {
  state.resources = await fetchResources();
  const firstMf = state.resources.subtasks.find((s) => s.domain === "manufacturing");
  state.whatif.subtaskId = firstMf ? firstMf.id : "";
  wireTabs();
  renderMain();
  await refreshRuns();
  // poll run status every second while anything is still executing
  setInterval(async () => {
    if (activeRunIds(state.handles).length > 0) {
      await refreshRuns();
      if (state.tab !== "wizard" && state.tab !== "whatif") renderMain();
    }
  }, 1000);
}

bootstrap().catch((err) => {
  document.body.innerHTML = `<pre class="error">failed to start: ${String(err)}</pre>`;
});
