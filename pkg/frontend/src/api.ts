/** Typed API client.
 *
 * All learning numbers (mastery, scores, minutes) come from the server; the
 * client never recomputes them. Every exchange is appended to `traffic` so
 * tests can verify that parity. Session events go through a depth-1 queue: a
 * new event request never starts before the previous one has settled, and a
 * failed event POST is retried once before the error surfaces.
 */

import { apiBase } from "./config.js";

export interface SearchHit {
  id: string;
  title: string;
  score: number;
}

export interface SearchResult {
  total: number;
  hits: SearchHit[];
  facets: Record<string, Record<string, number>>;
}

export interface MediaItem {
  type: string;
  src: string;
}

export interface UnitDoc {
  id: string;
  title: string;
  chapter: string | null;
  order: number | null;
  studyTime: number | null;
  targetGroup: string | null;
  difficulty: number | null;
  media: MediaItem[];
  teaches: string[];
  recommendedReading: string[];
  next: string | null;
  body: string;
}

export interface ConceptDoc {
  id: string;
  label: string;
  synonyms: string[];
  broader: string[];
  requires: string[];
  requiredBy: string[];
  taughtBy: string[];
  alignedWith: string[];
}

export interface ProfileDoc {
  mastery: Record<string, number>;
  eventCount: number;
  registered: boolean;
}

export interface TrajectoryStep {
  unit: string;
  title: string;
  minutes: number;
  contributes: string[];
}

export interface TrajectoryDoc {
  steps: TrajectoryStep[];
  gaps: string[];
  totalMinutes: number;
  truncated: boolean;
}

export interface ComparisonDoc {
  staticUnits: string[];
  dynamicUnits: string[];
  shared: string[];
  skipped: string[];
  added: string[];
  orderInversions: number;
}

export interface StatsDoc {
  pages: number;
  chapters: number;
  mediaObjects: number;
  concepts: number;
  triples: number;
}

export type SessionEventBody =
  | { kind: "view"; unitId: string; dwellSeconds: number }
  | { kind: "quiz"; unitId: string; score: number }
  | { kind: "reset" };

export interface TrafficRecord {
  method: string;
  url: string;
  body: unknown;
  status: number;
  response: unknown;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

export function buildSearchQuery(
  q: string,
  filters: Record<string, string[]>,
  page = 0,
  size = 10,
): string {
  const params = new URLSearchParams();
  if (q) params.set("q", q);
  for (const dim of Object.keys(filters).sort()) {
    for (const value of [...filters[dim]].sort()) {
      params.append(`facet.${dim}`, value);
    }
  }
  params.set("page", String(page));
  params.set("size", String(size));
  return `/api/search?${params.toString()}`;
}

export class ApiClient {
  readonly traffic: TrafficRecord[] = [];
  private eventChain: Promise<unknown> = Promise.resolve();

  constructor(private readonly base: string = apiBase()) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await fetch(this.base + path, init);
    let payload: unknown = null;
    try {
      payload = await response.json();
    } catch {
      payload = null;
    }
    this.traffic.push({
      method,
      url: path,
      body: body ?? null,
      status: response.status,
      response: payload,
    });
    if (!response.ok) {
      const err = (payload ?? {}) as { code?: string; message?: string };
      throw new ApiError(response.status, err.code ?? "error", err.message ?? response.statusText);
    }
    return payload as T;
  }

  search(q: string, filters: Record<string, string[]>, page = 0, size = 10): Promise<SearchResult> {
    return this.request("GET", buildSearchQuery(q, filters, page, size));
  }

  unit(id: string): Promise<UnitDoc> {
    return this.request("GET", `/api/units/${encodeURIComponent(id)}`);
  }

  concept(id: string): Promise<ConceptDoc> {
    return this.request("GET", `/api/concepts/${encodeURIComponent(id)}`);
  }

  stats(): Promise<StatsDoc> {
    return this.request("GET", "/api/stats");
  }

  profile(sessionId: string): Promise<ProfileDoc> {
    return this.request("GET", `/api/sessions/${encodeURIComponent(sessionId)}/profile`);
  }

  register(sessionId: string, userId: string): Promise<ProfileDoc & { userId: string }> {
    return this.request("POST", `/api/sessions/${encodeURIComponent(sessionId)}/register`, {
      userId,
    });
  }

  trajectory(req: {
    sessionId: string;
    goal: string;
    level?: number;
    theta?: number;
    maxMinutes?: number;
  }): Promise<TrajectoryDoc> {
    return this.request("POST", "/api/trajectories", req);
  }

  compare(sessionId: string, goal: string, chapter: string): Promise<ComparisonDoc> {
    const params = new URLSearchParams({ sessionId, goal, chapter });
    return this.request("GET", `/api/trajectories/compare?${params.toString()}`);
  }

  /** Depth-1 event queue: starts after the previous event settles; one retry. */
  postEvent(sessionId: string, event: SessionEventBody): Promise<{ eventCount: number }> {
    const path = `/api/sessions/${encodeURIComponent(sessionId)}/events`;
    const attempt = async (): Promise<{ eventCount: number }> => {
      try {
        return await this.request<{ eventCount: number }>("POST", path, event);
      } catch (first) {
        if (first instanceof ApiError && first.status < 500) throw first; // rejected, not lost
        return await this.request<{ eventCount: number }>("POST", path, event);
      }
    };
    const result = this.eventChain.then(attempt, attempt);
    this.eventChain = result.catch(() => undefined);
    return result;
  }
}
