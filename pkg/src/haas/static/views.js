// HTML renderers for the five workbench views. Pure string builders: the
// bootstrap wires them into the DOM and attaches events by element id.
import { stackedModeBars, sprintLineChart } from "./charts.js";
import { comparisonRows, formatCell } from "./state.js";
import { COMPARISON_COLUMNS, MODE_ORDER } from "./types.js";
const esc = (s) => s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
function options(values, selected) {
    return values.map((v) => `<option value="${esc(v)}"${v === selected ? " selected" : ""}>${esc(v)}</option>`).join("");
}
export function renderWizard(resources, domain, errors = []) {
    const scenarios = resources.scenarios.filter((s) => s.domain === domain);
    const errorFor = (field) => {
        const err = errors.find((e) => e.field === field);
        return err ? `<span class="field-error" data-field="${esc(field)}">${esc(err.message)}</span>` : "";
    };
    return `
  <section class="panel" id="wizard">
    <h2>Setup wizard</h2>
    <form id="wizard-form">
      <label>Domain
        <select id="w-domain" name="domain">${options(["software", "manufacturing"], domain)}</select>
        ${errorFor("domain")}
      </label>
      <label>Scenario
        <select id="w-scenario" name="scenario">${scenarios.map((s) => `<option value="${esc(s.key)}">${esc(s.name)}</option>`).join("")}</select>
        ${errorFor("scenario")}
      </label>
      <label>Strategy
        <select id="w-strategy" name="strategy">${options(resources.strategies, "linucb")}</select>
        ${errorFor("strategy")}
      </label>
      <label>Policies
        <select id="w-policies" name="policies">${options(["on", "off"], "on")}</select>
      </label>
      <label>Governance level
        <select id="w-level" name="governance_level">
          <option value="">(from policies flag)</option>
          ${options(resources.levels)}
        </select>
        ${errorFor("governance_level")}
      </label>
      <label>Seed <input id="w-seed" name="seed" value="11"> ${errorFor("seed")}</label>
      <label>Cycles <input id="w-cycles" name="cycles" placeholder="8"> ${errorFor("cycles")}</label>
      <label>Reward profile
        <select id="w-profile" name="reward_profile">${options(resources.reward_profiles, "four_outcome")}</select>
        ${errorFor("reward_profile")}
      </label>
      <div class="actions">
        <button type="submit" id="w-submit">Submit run</button>
        <button type="button" id="w-ladder">Ladder preset (L0–L4)</button>
      </div>
    </form>
  </section>`;
}
export function renderRunList(handles, selected) {
    if (handles.length === 0) {
        return `<section class="panel"><h2>Runs</h2>
      <p class="empty">No runs yet. Submit one from the wizard.</p></section>`;
    }
    const rows = handles.map((h) => {
        const cfg = h.config;
        const label = `${cfg.domain}/${cfg.scenario} ${cfg.strategy} ` +
            `${cfg.effective_level ?? ""} seed=${cfg.seed}`;
        const checked = selected.has(h.id) ? " checked" : "";
        return `<tr data-run="${h.id}">
      <td><input type="checkbox" class="run-select" data-run="${h.id}"${checked}></td>
      <td class="mono">${h.id.slice(0, 8)}</td>
      <td>${esc(label)}</td>
      <td><span class="status status-${h.status}">${h.status}</span></td>
    </tr>`;
    }).join("");
    return `<section class="panel"><h2>Runs</h2>
    <table class="grid"><thead>
      <tr><th></th><th>id</th><th>config</th><th>status</th></tr>
    </thead><tbody>${rows}</tbody></table></section>`;
}
export function renderKpiSummary(kpis) {
    if (!kpis || !kpis.aggregate || !kpis.per_sprint) {
        return `<section class="panel"><h2>KPI summary</h2>
      <p class="empty">Select a completed run.</p></section>`;
    }
    const agg = kpis.aggregate;
    const cards = Object.keys(agg).sort().map((k) => `<div class="card"><div class="card-name">${esc(k)}</div>` +
        `<div class="card-value" data-kpi="${esc(k)}">${esc(formatCell(agg[k]))}</div></div>`).join("");
    const sprints = kpis.per_sprint;
    const columns = Object.keys(sprints[0] ?? {});
    const head = columns.map((c) => `<th>${esc(c)}</th>`).join("");
    const body = sprints.map((row) => `<tr>${columns.map((c) => `<td data-col="${esc(c)}">${esc(formatCell(row[c]))}</td>`).join("")}</tr>`).join("");
    const series = ["fatigue", "trust"].filter((c) => columns.includes(c)).map((c) => ({
        name: c, values: sprints.map((row) => row[c]),
    }));
    const screens = kpis.screens
        ? Object.entries(kpis.screens).map(([name, ok]) => `<span class="screen ${ok ? "pass" : "fail"}">${esc(name)}: ${ok ? "pass" : "fail"}</span>`).join(" ")
        : "";
    return `<section class="panel"><h2>KPI summary</h2>
    <div class="screens">${screens}</div>
    <div class="cards">${cards}</div>
    <h3>Per-sprint KPIs</h3>
    <div class="scroll"><table class="grid"><thead><tr>${head}</tr></thead>
      <tbody>${body}</tbody></table></div>
    <h3>Human state over sprints</h3>
    ${sprintLineChart(series)}
  </section>`;
}
export function renderHistory(kpis) {
    if (!kpis || !kpis.mode_history) {
        return `<section class="panel"><h2>Allocation history</h2>
      <p class="empty">Select a completed run.</p></section>`;
    }
    const rows = kpis.mode_history.map((e) => `<tr><td>${e.index}</td><td>${e.cycle}</td><td>${esc(e.task_type)}</td>` +
        `<td><span class="mode mode-${esc(e.mode)}">${esc(e.mode)}</span></td>` +
        `<td data-col="sigma_h">${esc(formatCell(e.sigma_h))}</td>` +
        `<td>${e.fired_rule_id ? `<span class="rule-badge">${esc(e.fired_rule_id)}</span>` : ""}</td>` +
        `<td data-col="reward">${esc(formatCell(e.reward))}</td></tr>`).join("");
    return `<section class="panel"><h2>Allocation history</h2>
    <div class="scroll"><table class="grid"><thead>
      <tr><th>#</th><th>sprint</th><th>task type</th><th>mode</th>
          <th>human share</th><th>fired rule</th><th>reward</th></tr>
    </thead><tbody>${rows}</tbody></table></div></section>`;
}
export function renderComparison(entries) {
    const rows = comparisonRows(entries);
    if (rows.length === 0) {
        return `<section class="panel"><h2>Benchmark comparison</h2>
      <p class="empty">Select one or more completed runs from the run list.</p></section>`;
    }
    const head = COMPARISON_COLUMNS.map((c) => `<th>${esc(c)}</th>`).join("");
    const body = rows.map((row) => `<tr><td>${esc(row.label)}</td>${COMPARISON_COLUMNS.map((c) => `<td data-col="${esc(c)}">${esc(row.values[c])}</td>`).join("")}</tr>`).join("");
    const legend = MODE_ORDER.map((m, i) => `<span class="legend-item"><span class="swatch" data-mode="${m}"></span>${m}</span>`).join(" ");
    return `<section class="panel"><h2>Benchmark comparison</h2>
    <div class="scroll"><table class="grid">
      <thead><tr><th>run</th>${head}</tr></thead><tbody>${body}</tbody>
    </table></div>
    <h3>Collaboration-mode distribution</h3>
    <div class="legend-row">${legend}</div>
    ${stackedModeBars(rows.map((r) => ({ label: r.label, shares: r.modeShares })))}
  </section>`;
}
export function renderWhatIf(resources, domain, subtaskId, level, fatigue, preview, error = null) {
    const subtasks = resources.subtasks.filter((s) => s.domain === domain);
    const directive = preview ? preview.directive : null;
    const badge = directive && directive.fired_rule_id
        ? `<span class="rule-badge">${esc(directive.fired_rule_id)}</span>` : "";
    const warnings = directive && directive.warnings.length
        ? `<div class="warnings">${directive.warnings.map(esc).join("<br>")}</div>` : "";
    const modeRows = preview ? preview.modes.map((m) => `<tr><td>${esc(m.mode)}</td>` +
        `<td data-col="sigma_h">${esc(formatCell(m.sigma_h))}</td>` +
        `<td data-col="sigma_ai">${esc(formatCell(m.sigma_ai))}</td>` +
        `<td>${esc(m.lead)}</td>` +
        `<td data-col="expected_reward">${esc(formatCell(m.expected_reward))}</td></tr>`).join("") : "";
    return `<section class="panel" id="whatif">
    <h2>Decision support (what-if)</h2>
    <form id="whatif-form">
      <label>Domain
        <select id="q-domain">${options(["software", "manufacturing"], domain)}</select>
      </label>
      <label>Subtask
        <select id="q-subtask">${subtasks.map((s) => `<option value="${esc(s.id)}"${s.id === subtaskId ? " selected" : ""}>` +
        `${esc(s.name)} (${esc(s.task_type)})</option>`).join("")}
        </select>
      </label>
      <label>Governance level
        <select id="q-level">${options(resources.levels, level)}</select>
      </label>
      <label>Fatigue <span id="q-fatigue-value">${fatigue.toFixed(2)}</span>
        <input type="range" id="q-fatigue" min="0" max="1" step="0.01" value="${fatigue}">
      </label>
    </form>
    ${error ? `<p class="error">${esc(error)}</p>` : ""}
    ${preview ? `
      <div class="directive">
        <strong>Directive:</strong> ${esc(directive.kind)}
        ${directive.mode ? `→ ${esc(directive.mode)}` : ""}
        ${directive.agent ? `→ ${esc(directive.agent)}` : ""}
        ${badge}
      </div>
      ${warnings}
      <div class="feasible">
        <strong>Feasible modes:</strong>
        ${preview.feasible_modes.map((m) => `<span class="mode mode-${esc(m)}">${esc(m)}</span>`).join(" ")}
      </div>
      <table class="grid"><thead>
        <tr><th>mode</th><th>human share</th><th>AI share</th><th>lead</th>
            <th>expected reward</th></tr>
      </thead><tbody>${modeRows}</tbody></table>
    ` : `<p class="empty">Adjust the controls to preview a governed decision.</p>`}
  </section>`;
}
