// Page wiring: connect to a gateway, then let the editor drive the live
// ranking view and the league board drive epochs.

import { GatewayClient } from "./api.js";
import { createLeagueBoard } from "./league-board.js";
import { createPsvEditor } from "./psv-editor.js";
import { createRankingView } from "./ranking-view.js";
import { createSession, setWorkingWeight } from "./session.js";

function byId(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

async function connect(): Promise<void> {
  const baseUrl = (byId("gateway-url") as HTMLInputElement).value.replace(/\/$/, "");
  const token = (byId("gateway-token") as HTMLInputElement).value || undefined;
  const owner = (byId("psv-owner") as HTMLInputElement).value || "collective";
  const session = createSession(baseUrl, token);
  const client = new GatewayClient(baseUrl, token);

  const health = await client.health();
  byId("status").textContent = `connected (epoch ${health.epoch})`;

  const indicators = await client.indicators();
  const rankingView = createRankingView({ client });

  const editor = createPsvEditor({
    indicators,
    onChange: (weights) => {
      for (const [indicator, value] of Object.entries(weights)) {
        setWorkingWeight(session, indicator, value);
      }
      if (Object.values(weights).some((value) => value > 0)) {
        rankingView.setWeights(weights);
      }
    },
    onSave: async (weights) => {
      const saved = await client.createValueSystem({ owner, weights });
      session.selectedValueSystem = saved.id;
      byId("status").textContent = `saved value system ${saved.id}`;
    },
  });

  const baselineInput = byId("baseline-vs") as HTMLInputElement;
  byId("baseline-apply").addEventListener("click", () => {
    const baselineId = baselineInput.value.trim();
    if (!baselineId) {
      rankingView.setBaseline(null);
      return;
    }
    void client
      .rankings({ vs: baselineId })
      .then((doc) => rankingView.setBaseline(doc))
      .catch((error) => {
        byId("status").textContent = String(error);
      });
  });

  const board = createLeagueBoard({ client, readOnly: session.readOnly });
  board.load().catch(() => {
    byId("league-slot").textContent = "league not initialized on this gateway";
  });

  byId("editor-slot").replaceChildren(editor.element);
  byId("ranking-slot").replaceChildren(rankingView.element);
  byId("league-slot").replaceChildren(board.element);
}

byId("connect").addEventListener("click", () => {
  void connect().catch((error) => {
    byId("status").textContent = `connection failed: ${String(error)}`;
  });
});
