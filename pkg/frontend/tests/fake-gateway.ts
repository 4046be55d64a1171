// In-memory stand-in for the gateway, serving payloads captured from the
// real service. Tracks every request and a state digest that only commits
// (POST /league/epoch) may change, mirroring the server contract.

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

const fixturePath = join(
  dirname(fileURLToPath(import.meta.url)),
  "fixtures",
  "gateway.json",
);

export interface Fixtures {
  indicators: unknown[];
  ranking_expert: { entries: { resource: string }[] };
  ranking_crowd: { entries: { resource: string }[] };
  league: { epoch: number };
  simulate: { initial_digest: string; final_digest: string };
}

export const fixtures = JSON.parse(readFileSync(fixturePath, "utf-8")) as Fixtures;

export interface RequestRecord {
  method: string;
  path: string;
  body?: unknown;
}

export interface FakeGateway {
  requests: RequestRecord[];
  digest: string;
  countBy(pathPrefix: string): number;
  fetch: typeof fetch;
}

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

export function createFakeGateway(): FakeGateway {
  const requests: RequestRecord[] = [];
  const gateway: FakeGateway = {
    requests,
    digest: "digest-0",
    countBy: (prefix) => requests.filter((r) => r.path.startsWith(prefix)).length,
    fetch: async (input: RequestInfo | URL, init?: RequestInit) => {
      const url = new URL(String(input), "http://fake");
      const method = init?.method ?? "GET";
      const body = init?.body ? JSON.parse(String(init.body)) : undefined;
      requests.push({ method, path: url.pathname + url.search, body });

      if (url.pathname === "/health") {
        return jsonResponse({ status: "ok", epoch: fixtures.league.epoch });
      }
      if (url.pathname === "/indicators") {
        return jsonResponse(fixtures.indicators);
      }
      if (url.pathname === "/rankings") {
        const weights = url.searchParams.get("weights") ?? "";
        const vs = url.searchParams.get("vs") ?? "";
        if (vs === "m" || weights.startsWith("cit:0.1,")) {
          return jsonResponse(fixtures.ranking_crowd);
        }
        return jsonResponse(fixtures.ranking_expert);
      }
      if (url.pathname === "/league" && method === "GET") {
        return jsonResponse(fixtures.league);
      }
      if (url.pathname === "/league/simulate") {
        // read path: digest must stay where it was
        return jsonResponse({ ...fixtures.simulate, initial_digest: gateway.digest });
      }
      if (url.pathname === "/league/epoch") {
        gateway.digest = `digest-${requests.length}`;
        return jsonResponse({ ...fixtures.league, epoch: fixtures.league.epoch + 1 });
      }
      if (url.pathname === "/value-systems" && method === "POST") {
        const doc = body as { owner: string; weights: Record<string, number> };
        const positive = Object.values(doc.weights).some((value) => value > 0);
        if (!positive) {
          return jsonResponse(
            { code: "AllZeroWeights", message: "all weights are zero" },
            422,
          );
        }
        gateway.digest = `digest-${requests.length}`;
        return jsonResponse({ id: "vs9", owner: doc.owner, label: "", weights: doc.weights }, 201);
      }
      return jsonResponse({ code: "Internal", message: `no route ${url.pathname}` }, 500);
    },
  };
  return gateway;
}
