const BASE = "/v1";
async function request(path, init) {
    const res = await fetch(`${BASE}${path}`, init);
    if (!res.ok) {
        let detail = res.statusText;
        try {
            const body = await res.json();
            detail = typeof body.detail === "string" ? body.detail : JSON.stringify(body.detail);
        }
        catch {
            /* keep the status text */
        }
        throw new Error(`${res.status}: ${detail}`);
    }
    return res.json();
}
export function fetchResources() {
    return request("/resources");
}
export function submitRun(config) {
    return request("/runs", {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(config),
    });
}
export function fetchRuns() {
    return request("/runs");
}
export function fetchRunKpis(id) {
    return request(`/runs/${id}/kpis`);
}
export function fetchWhatIf(query) {
    return request("/whatif", {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(query),
    });
}
