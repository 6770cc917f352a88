// View-model logic kept free of DOM concerns so it is directly testable.
import { COMPARISON_COLUMNS, MODE_SHARE_COLUMNS } from "./types.js";
// mirrors the server-side validation rules so errors surface before submission
export function validateWizard(form, resources) {
    const errors = [];
    const domains = new Set(resources.scenarios.map((s) => s.domain));
    if (!domains.has(form.domain)) {
        errors.push({ field: "domain", message: `unknown domain '${form.domain}'` });
    }
    const scenario = resources.scenarios.find((s) => s.domain === form.domain && s.key === form.scenario);
    if (!scenario) {
        errors.push({ field: "scenario", message: `scenario '${form.scenario}' is not in domain '${form.domain}'` });
    }
    if (!resources.strategies.includes(form.strategy)) {
        errors.push({ field: "strategy", message: `unknown strategy '${form.strategy}'` });
    }
    if (form.governance_level !== null && !resources.levels.includes(form.governance_level)) {
        errors.push({ field: "governance_level", message: `unknown level '${form.governance_level}'` });
    }
    const seed = Number(form.seed);
    if (!Number.isInteger(seed) || seed < 0) {
        errors.push({ field: "seed", message: "seed must be a non-negative integer" });
    }
    if (form.cycles !== "") {
        const cycles = Number(form.cycles);
        if (!Number.isInteger(cycles) || cycles < 1) {
            errors.push({ field: "cycles", message: "cycles must be a positive integer" });
        }
    }
    if (!resources.reward_profiles.includes(form.reward_profile)) {
        errors.push({ field: "reward_profile", message: `unknown reward profile '${form.reward_profile}'` });
    }
    return errors;
}
export function buildRunRequest(form) {
    return {
        domain: form.domain,
        scenario: form.scenario,
        strategy: form.strategy,
        policies: form.policies,
        governance_level: form.governance_level,
        seed: Number(form.seed),
        cycles: form.cycles === "" ? null : Number(form.cycles),
        reward_profile: form.reward_profile,
    };
}
// the ladder preset submits the same configuration at every governance level
export function ladderPreset(form, levels) {
    return levels.map((level) => ({
        ...buildRunRequest(form),
        governance_level: level,
        policies: level !== "L0",
    }));
}
// Displayed numbers must be byte-traceable to the API payload: String() of a
// parsed JSON number reproduces the canonical shortest representation, and we
// never round, scale, or otherwise recompute.
export function formatCell(value) {
    if (value === null || value === undefined)
        return "";
    return String(value);
}
export class LatestWins {
    constructor() {
        this.issued = 0;
        this.rendered = 0;
    }
    issue() {
        return ++this.issued;
    }
    shouldRender(seq) {
        if (seq < this.rendered)
            return false;
        this.rendered = seq;
        return seq === this.issued;
    }
}
export function comparisonRows(entries) {
    const rows = [];
    for (const { id, kpis } of entries) {
        if (!kpis.aggregate)
            continue;
        const aggregate = kpis.aggregate;
        const config = kpis.handle.config;
        const label = `${config.strategy}+${config.policies ? "on" : "off"} ` +
            `${config.effective_level ?? ""} seed=${config.seed}`;
        const values = {};
        for (const col of COMPARISON_COLUMNS) {
            values[col] = formatCell(aggregate[col]);
        }
        rows.push({
            id,
            label: label.trim(),
            values,
            modeShares: MODE_SHARE_COLUMNS.map((c) => aggregate[c] ?? 0),
        });
    }
    return rows;
}
export function activeRunIds(handles) {
    return handles.filter((h) => h.status === "queued" || h.status === "running")
        .map((h) => h.id);
}
export function scenariosForDomain(resources, domain) {
    return resources.scenarios.filter((s) => s.domain === domain);
}
