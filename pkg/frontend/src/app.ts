import { ApiClient } from "./api.js";
import { CHANNELS, STATES } from "./models.js";
import type { ChannelName, RunInfo, StateName, Variant } from "./models.js";
import { pollJob } from "./poll.js";
import { ReportStore } from "./report-view.js";
import { drawTimeline } from "./timeline.js";
import { WeightGridViewModel } from "./weights-grid.js";

const VARIANT_LABELS: Record<Variant, string> = {
  nb: "NB",
  owo: "OwO w/o PI",
  owo_pi: "OwO with PI",
};

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function formatPercent(value: number | null | undefined): string {
  return value === null || value === undefined ? "–" : `${(value * 100).toFixed(1)}%`;
}

function formatDelta(value: number | null): string {
  if (value === null) {
    return "–";
  }
  const points = value * 100;
  return `${points >= 0 ? "+" : ""}${points.toFixed(1)}`;
}

export class App {
  private grid: WeightGridViewModel | null = null;
  private readonly reports = new ReportStore();

  constructor(private readonly api: ApiClient) {}

  async start(): Promise<void> {
    await this.reloadWeights();
    await this.refreshRuns();
    try {
      await this.renderLatestReport();
    } catch {
      el("report-area").innerHTML = "<p class='muted'>No report yet — run an evaluation.</p>";
    }
    el<HTMLButtonElement>("apply-button").onclick = () => void this.apply();
    el<HTMLButtonElement>("revert-button").onclick = () => this.revert();
    el<HTMLButtonElement>("evaluate-button").onclick = () => void this.evaluate();
    el<HTMLSelectElement>("run-select").onchange = () => void this.renderTimeline();
  }

  private async reloadWeights(): Promise<void> {
    this.grid = new WeightGridViewModel(await this.api.getWeights());
    this.renderGrid();
  }

  renderGrid(): void {
    if (!this.grid) {
      return;
    }
    const grid = this.grid;
    const head = ["State", ...CHANNELS].map((name) => `<th>${name}</th>`).join("");
    const body = STATES.map((state) => {
      const cells = CHANNELS.map((channel) => {
        const dirty = grid.isCellDirty(state, channel) ? " dirty" : "";
        const error = grid.cellError(state, channel);
        const title = error ? ` title="${error}"` : "";
        return (
          `<td class="cell${dirty}${error ? " invalid" : ""}"${title}>` +
          `<input data-state="${state}" data-channel="${channel}" type="number" ` +
          `min="0" step="1" value="${grid.value(state as StateName, channel as ChannelName)}">` +
          (error ? `<div class="cell-error">${error}</div>` : "") +
          "</td>"
        );
      }).join("");
      return `<tr><th>${state}</th>${cells}</tr>`;
    }).join("");
    el("weights-table").innerHTML = `<thead><tr>${head}</tr></thead><tbody>${body}</tbody>`;

    for (const input of el("weights-table").querySelectorAll("input")) {
      input.addEventListener("change", () => {
        const state = input.dataset.state as StateName;
        const channel = input.dataset.channel as ChannelName;
        grid.edit(state, channel, Number(input.value));
        this.renderGrid();
      });
    }
    el<HTMLButtonElement>("evaluate-button").disabled = grid.dirty;
    el<HTMLButtonElement>("apply-button").disabled = !grid.dirty;
    el<HTMLButtonElement>("revert-button").disabled = !grid.dirty;
    el("grid-status").textContent = grid.dirty
      ? "Unapplied edits — apply or revert before evaluating."
      : "Weights in sync with the service.";
  }

  private async apply(): Promise<void> {
    if (!this.grid) {
      return;
    }
    const local = this.grid.localViolations();
    if (local.length > 0) {
      this.grid.applyFailed(local);
      this.renderGrid();
      return;
    }
    const result = await this.api.putWeights(this.grid.applyPayload());
    if (result.ok && result.table) {
      this.grid.applySucceeded(result.table);
    } else {
      this.grid.applyFailed(result.errors ?? ["apply failed"]);
    }
    this.renderGrid();
  }

  private revert(): void {
    this.grid?.revert();
    this.renderGrid();
  }

  private async evaluate(): Promise<void> {
    const banner = el("job-status");
    banner.className = "";
    try {
      banner.textContent = "Evaluating…";
      const jobId = await this.api.startEvaluation();
      await pollJob(this.api, jobId, 1000);
      banner.textContent = `Job ${jobId} done.`;
      await this.renderLatestReport();
    } catch (error) {
      banner.textContent = String(error);
      banner.className = "error-banner";
    }
  }

  private async renderLatestReport(): Promise<void> {
    const report = await this.api.getLatestReport();
    const view = this.reports.viewFor(report);
    const variants = Object.keys(VARIANT_LABELS) as Variant[];
    const head =
      "<tr><th>State</th><th>Support</th>" +
      variants.map((v) => `<th>${VARIANT_LABELS[v]}</th>`).join("") +
      "<th>Δ OwO</th><th>Δ OwO+PI</th></tr>";
    const rows = view.rows
      .map(
        (row) =>
          `<tr><th>${row.state}</th><td>${row.support ?? "absent"}</td>` +
          variants.map((v) => `<td>${formatPercent(row.accuracy[v])}</td>`).join("") +
          `<td>${formatDelta(row.deltaOwo)}</td><td>${formatDelta(row.deltaOwoPi)}</td></tr>`,
      )
      .join("");
    const overall =
      `<tr class="overall"><th>Overall</th><td>${view.totalRows}</td>` +
      variants.map((v) => `<td>${formatPercent(view.overall[v])}</td>`).join("") +
      "<td></td><td></td></tr>";
    const badges = view.claims
      .map(
        (claim) =>
          `<span class="badge ${claim.passed ? "pass" : "fail"}" title="${claim.detail}">` +
          `${claim.passed ? "✓" : "✗"} ${claim.label}</span>`,
      )
      .join(" ");
    el("report-area").innerHTML =
      `<table class="report">${head}${rows}${overall}</table>` +
      `<div class="badges">${badges}</div>` +
      `<p class="muted">weights ${view.weightHash.slice(0, 12)}…</p>`;
  }

  private async refreshRuns(): Promise<void> {
    let runs: RunInfo[] = [];
    try {
      runs = await this.api.getRuns();
    } catch {
      el("timeline-area").textContent = "Run listing unavailable.";
      return;
    }
    const select = el<HTMLSelectElement>("run-select");
    select.innerHTML = runs
      .map((run) => `<option value="${run.id}">${run.id} (seed ${run.seed})</option>`)
      .join("");
    if (runs.length > 0) {
      await this.renderTimeline();
    }
  }

  private async renderTimeline(): Promise<void> {
    const runId = el<HTMLSelectElement>("run-select").value;
    const area = el("timeline-area");
    try {
      const timeline = await this.api.getTimeline(runId);
      if (timeline.t.length === 0) {
        area.innerHTML = "<p class='muted'>This run has no points.</p>";
        return;
      }
      area.innerHTML = '<canvas id="timeline-canvas" width="960" height="260"></canvas>';
      drawTimeline(el<HTMLCanvasElement>("timeline-canvas"), timeline);
    } catch {
      area.innerHTML = `<p class='muted'>Run ${runId} not found.</p>`;
    }
  }
}
