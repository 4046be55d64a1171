// Typed client for the meritrank gateway. Every number the UI shows comes
// out of these responses; the client never computes scores itself.

export interface IndicatorDoc {
  id: string;
  label: string;
  category: string;
  attribute: string;
  aggregation: string;
  status_floor: string;
  direction: string;
}

export interface PsvDoc {
  id: string;
  owner: string;
  label: string;
  weights: Record<string, number>;
}

export interface IndicatorBreakdown {
  raw: number;
  normalized: number;
  weight: number;
  contribution: number;
}

export interface RankingEntry {
  resource: string;
  score: number;
  rank: number;
  per_indicator: Record<string, IndicatorBreakdown>;
}

export interface RankingDoc {
  value_system: string;
  population: { ids: string[]; hash: string };
  entries: RankingEntry[];
}

export type LeagueName = "senior" | "middle" | "junior";

export interface LeagueDoc {
  epoch: number;
  config: { sizes: number[]; exchange_count: number };
  leagues: Record<LeagueName, string[]>;
  leaders: Record<LeagueName, string>;
  leader_psvs: Record<LeagueName, string>;
  seed_vs: string;
}

export interface AuditEventDoc {
  seq: number | null;
  epoch: number;
  kind: string;
  subjects: string[];
  payload: Record<string, unknown>;
}

export interface SimulationDoc {
  seed: number;
  epochs: number;
  initial_digest: string;
  final_digest: string;
  trajectory: LeagueDoc[];
  events: AuditEventDoc[];
}

export class GatewayError extends Error {
  constructor(
    public readonly code: string,
    message: string,
    public readonly status: number,
  ) {
    super(message);
    this.name = "GatewayError";
  }
}

export function weightsParam(weights: Record<string, number>): string {
  return Object.keys(weights)
    .sort()
    .map((key) => `${key}:${weights[key]}`)
    .join(",");
}

export class GatewayClient {
  constructor(
    private readonly baseUrl: string,
    private readonly token?: string,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const headers: Record<string, string> = {
      ...(init?.headers as Record<string, string> | undefined),
    };
    if (init?.body !== undefined) {
      headers["Content-Type"] = "application/json";
    }
    if (this.token && init?.method && init.method !== "GET") {
      headers["Authorization"] = `Bearer ${this.token}`;
    }
    const response = await fetch(`${this.baseUrl}${path}`, { ...init, headers });
    if (!response.ok) {
      let code = "Internal";
      let message = `gateway returned ${response.status}`;
      try {
        const body = (await response.json()) as { code?: string; message?: string };
        code = body.code ?? code;
        message = body.message ?? message;
      } catch {
        // non-JSON error body; keep the defaults
      }
      throw new GatewayError(code, message, response.status);
    }
    return (await response.json()) as T;
  }

  health(): Promise<{ status: string; epoch: number }> {
    return this.request("/health");
  }

  indicators(): Promise<IndicatorDoc[]> {
    return this.request("/indicators");
  }

  valueSystem(id: string): Promise<PsvDoc> {
    return this.request(`/value-systems/${encodeURIComponent(id)}`);
  }

  createValueSystem(doc: {
    owner: string;
    weights: Record<string, number>;
    label?: string;
    id?: string;
  }): Promise<PsvDoc> {
    return this.request("/value-systems", {
      method: "POST",
      body: JSON.stringify(doc),
    });
  }

  rankings(params: {
    kind?: string;
    vs?: string;
    weights?: Record<string, number>;
    filter?: string;
  }): Promise<RankingDoc> {
    const query = new URLSearchParams();
    query.set("kind", params.kind ?? "person");
    if (params.vs) query.set("vs", params.vs);
    if (params.weights) query.set("weights", weightsParam(params.weights));
    if (params.filter) query.set("filter", params.filter);
    return this.request(`/rankings?${query.toString()}`);
  }

  league(): Promise<LeagueDoc> {
    return this.request("/league");
  }

  leagueSimulate(body: {
    epochs: number;
    seed: number;
    increments?: Record<string, [number, number]>;
  }): Promise<SimulationDoc> {
    return this.request("/league/simulate", {
      method: "POST",
      body: JSON.stringify(body),
    });
  }

  leagueEpoch(): Promise<LeagueDoc> {
    return this.request("/league/epoch", {
      method: "POST",
      body: JSON.stringify({ achievements: [] }),
    });
  }
}
