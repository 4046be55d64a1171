// Live ranking table: re-sorts on every weight change by asking the gateway
// to rank under an ephemeral value system (debounced), renders per-indicator
// contribution bars and rank deltas against a chosen baseline ranking.

import type { GatewayClient, RankingDoc } from "./api.js";
import { debounce } from "./debounce.js";

export interface RankingViewOptions {
  client: GatewayClient;
  kind?: string;
  filter?: string;
  debounceMs?: number;
}

export interface RankingView {
  element: HTMLElement;
  setWeights(weights: Record<string, number>): void;
  setBaseline(baseline: RankingDoc | null): void;
  refresh(weights: Record<string, number>): Promise<void>;
  order(): string[];
  requestCount(): number;
}

export const DEFAULT_DEBOUNCE_MS = 150;

export function createRankingView(options: RankingViewOptions): RankingView {
  const element = document.createElement("div");
  element.className = "ranking-view";
  const banner = document.createElement("div");
  banner.className = "offline-banner";
  banner.hidden = true;
  const table = document.createElement("table");
  table.className = "ranking-table";
  const empty = document.createElement("p");
  empty.className = "empty-state";
  empty.hidden = true;
  empty.textContent = "No resources match the current filter.";
  element.append(banner, table, empty);

  let baseline: RankingDoc | null = null;
  let current: RankingDoc | null = null;
  let requests = 0;

  function baselineRanks(): Record<string, number> {
    const ranks: Record<string, number> = {};
    for (const entry of baseline?.entries ?? []) {
      ranks[entry.resource] = entry.rank;
    }
    return ranks;
  }

  function render(): void {
    table.textContent = "";
    const entries = current?.entries ?? [];
    empty.hidden = entries.length > 0;
    if (!entries.length) return;
    const ranks = baselineRanks();
    const header = document.createElement("tr");
    header.innerHTML =
      "<th>#</th><th>resource</th><th>score</th><th>contributions</th><th>Δ vs baseline</th>";
    table.append(header);
    for (const entry of entries) {
      const row = document.createElement("tr");
      row.dataset.resource = entry.resource;
      const bars = document.createElement("td");
      bars.className = "bars";
      for (const indicator of Object.keys(entry.per_indicator).sort()) {
        const detail = entry.per_indicator[indicator];
        if (!detail) continue;
        const bar = document.createElement("div");
        bar.className = "bar";
        bar.title = `${indicator}: contribution ${detail.contribution.toFixed(4)}`;
        bar.style.width = `${Math.round(detail.contribution * 100)}px`;
        bar.dataset.indicator = indicator;
        bars.append(bar);
      }
      const delta = document.createElement("td");
      delta.className = "delta";
      const baselineRank = ranks[entry.resource];
      if (baselineRank !== undefined) {
        const diff = entry.rank - baselineRank;
        delta.textContent = diff === 0 ? "·" : diff > 0 ? `+${diff}` : String(diff);
      } else {
        delta.textContent = "";
      }
      const cells = [
        `<td>${entry.rank}</td>`,
        `<td>${entry.resource}</td>`,
        `<td>${entry.score.toFixed(4)}</td>`,
      ];
      row.innerHTML = cells.join("");
      row.append(bars, delta);
      table.append(row);
    }
  }

  async function refresh(weights: Record<string, number>): Promise<void> {
    requests += 1;
    try {
      current = await options.client.rankings({
        kind: options.kind ?? "person",
        weights,
        filter: options.filter,
      });
      banner.hidden = true;
      element.classList.remove("stale");
    } catch (error) {
      banner.hidden = false;
      banner.textContent = `gateway unreachable: ${String(error)} (showing stale data)`;
      element.classList.add("stale");
      return;
    }
    render();
  }

  const debounced = debounce((weights: Record<string, number>) => {
    void refresh(weights);
  }, options.debounceMs ?? DEFAULT_DEBOUNCE_MS);

  return {
    element,
    setWeights: (weights) => debounced({ ...weights }),
    setBaseline: (doc) => {
      baseline = doc;
      render();
    },
    refresh,
    order: () => (current?.entries ?? []).map((entry) => entry.resource),
    requestCount: () => requests,
  };
}
