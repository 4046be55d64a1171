import { afterEach, describe, expect, it, vi } from "vitest";

import { GatewayClient } from "../src/api.js";
import { createLeagueBoard } from "../src/league-board.js";
import { createFakeGateway, fixtures } from "./fake-gateway.js";

afterEach(() => vi.unstubAllGlobals());

function build(readOnly = false) {
  const gateway = createFakeGateway();
  vi.stubGlobal("fetch", gateway.fetch);
  const client = new GatewayClient("http://fake");
  return { gateway, board: createLeagueBoard({ client, readOnly }) };
}

describe("league board", () => {
  it("renders three columns with the leaders starred", async () => {
    const { board } = build();
    await board.load();
    const columns = board.element.querySelectorAll(".league-column");
    expect(columns.length).toBe(3);
    const senior = board.element.querySelector(".league-senior li");
    expect(senior?.textContent).toContain("★");
  });

  it("ten consecutive what-ifs never touch server state", async () => {
    const { gateway, board } = build();
    await board.load();
    const digestBefore = gateway.digest;
    for (let i = 0; i < 10; i++) {
      await board.whatIf();
    }
    expect(gateway.countBy("/league/simulate")).toBe(10);
    expect(gateway.countBy("/league/epoch")).toBe(0);
    expect(gateway.digest).toBe(digestBefore);
    expect(board.projection()).not.toBeNull();
  });

  it("what-if renders promotion and relegation badges from the audit events", async () => {
    const { board } = build();
    await board.load();
    await board.whatIf();
    const badges = board.badges();
    const exchanged = fixtures.simulate as unknown as {
      events: { kind: string; payload: { member?: string } }[];
    };
    const expected = exchanged.events.filter(
      (event) => event.kind === "promoted" || event.kind === "relegated",
    );
    expect(Object.keys(badges).length).toBeGreaterThan(0);
    expect(Object.keys(badges).length).toBe(
      new Set(expected.map((event) => event.payload.member)).size,
    );
    expect(board.element.querySelectorAll(".badge-promoted").length).toBeGreaterThan(0);
    expect(board.element.querySelectorAll(".badge-relegated").length).toBeGreaterThan(0);
  });

  it("commit advances the epoch through the gateway", async () => {
    const { gateway, board } = build();
    await board.load();
    await board.whatIf();
    await board.commit();
    expect(gateway.countBy("/league/epoch")).toBe(1);
    expect(board.board()?.epoch).toBe(fixtures.league.epoch + 1);
    expect(board.projection()).toBeNull();
  });

  it("read-only sessions cannot commit", async () => {
    const { gateway, board } = build(true);
    await board.load();
    await board.commit();
    expect(gateway.countBy("/league/epoch")).toBe(0);
    const status = board.element.querySelector(".league-status");
    expect(status?.textContent).toContain("read-only");
  });
});
