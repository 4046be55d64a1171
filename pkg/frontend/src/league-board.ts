// Three-column league board with leader stars, what-if projections (simulate,
// server state untouched) and epoch commits. What-if and commit with the same
// inputs are guaranteed to agree by the gateway's determinism contract.

import type { GatewayClient, LeagueDoc, LeagueName, SimulationDoc } from "./api.js";

const LEAGUES: LeagueName[] = ["senior", "middle", "junior"];
const WHAT_IF_SEED = 1; // no synthetic achievements; seed is irrelevant but pinned

export interface LeagueBoardOptions {
  client: GatewayClient;
  readOnly?: boolean;
}

export interface LeagueBoard {
  element: HTMLElement;
  load(): Promise<void>;
  whatIf(): Promise<void>;
  commit(): Promise<void>;
  board(): LeagueDoc | null;
  projection(): LeagueDoc | null;
  badges(): Record<string, "promoted" | "relegated">;
}

export function createLeagueBoard(options: LeagueBoardOptions): LeagueBoard {
  const element = document.createElement("div");
  element.className = "league-board";
  const columns = document.createElement("div");
  columns.className = "league-columns";
  const controls = document.createElement("div");
  controls.className = "league-controls";
  const whatIfButton = document.createElement("button");
  whatIfButton.textContent = "What-if epoch";
  const commitButton = document.createElement("button");
  commitButton.textContent = "Commit epoch";
  commitButton.disabled = Boolean(options.readOnly);
  const status = document.createElement("p");
  status.className = "league-status";
  controls.append(whatIfButton, commitButton, status);
  element.append(controls, columns);

  let currentBoard: LeagueDoc | null = null;
  let projected: LeagueDoc | null = null;
  let moveBadges: Record<string, "promoted" | "relegated"> = {};

  function render(): void {
    columns.textContent = "";
    const shown = projected ?? currentBoard;
    if (!shown) return;
    for (const league of LEAGUES) {
      const column = document.createElement("div");
      column.className = `league-column league-${league}`;
      const title = document.createElement("h3");
      title.textContent = `${league} (epoch ${shown.epoch}${projected ? ", projected" : ""})`;
      column.append(title);
      const list = document.createElement("ol");
      for (const member of shown.leagues[league]) {
        const item = document.createElement("li");
        item.dataset.member = member;
        item.textContent =
          shown.leaders[league] === member ? `★ ${member}` : member;
        const badge = moveBadges[member];
        if (badge) {
          const mark = document.createElement("span");
          mark.className = `badge badge-${badge}`;
          mark.textContent = badge === "promoted" ? "▲" : "▼";
          item.append(mark);
        }
        list.append(item);
      }
      column.append(list);
      columns.append(column);
    }
  }

  async function load(): Promise<void> {
    currentBoard = await options.client.league();
    projected = null;
    moveBadges = {};
    status.textContent = `epoch ${currentBoard.epoch}`;
    render();
  }

  function badgesFromEvents(simulation: SimulationDoc): Record<string, "promoted" | "relegated"> {
    const badges: Record<string, "promoted" | "relegated"> = {};
    for (const event of simulation.events) {
      if (event.kind === "promoted" || event.kind === "relegated") {
        badges[String(event.payload["member"])] = event.kind;
      }
    }
    return badges;
  }

  async function whatIf(): Promise<void> {
    const simulation = await options.client.leagueSimulate({
      epochs: 1,
      seed: WHAT_IF_SEED,
      increments: {},
    });
    projected = simulation.trajectory[0] ?? null;
    moveBadges = badgesFromEvents(simulation);
    status.textContent = "projection only; server state untouched";
    render();
  }

  async function commit(): Promise<void> {
    if (options.readOnly) {
      status.textContent = "read-only session: commits are disabled";
      return;
    }
    currentBoard = await options.client.leagueEpoch();
    projected = null;
    status.textContent = `committed epoch ${currentBoard.epoch}`;
    render();
  }

  whatIfButton.addEventListener("click", () => void whatIf());
  commitButton.addEventListener("click", () => void commit());

  return {
    element,
    load,
    whatIf,
    commit,
    board: () => currentBoard,
    projection: () => projected,
    badges: () => ({ ...moveBadges }),
  };
}
