/** End-to-end smoke against the real engine server: faceted search, unit
 * reader, session events, and the live trajectory panel, driven through the
 * DOM. The recorded traffic doubles as the parity proof that the UI displays
 * only server-computed numbers. */

import { spawn, ChildProcess } from "node:child_process";
import { mkdtempSync, mkdirSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { initApp, App } from "../src/main.js";

const REPO_ROOT = resolve(__dirname, "..", "..");

const LESSONS: Record<string, string> = {
  "u-1.xml": `<?xml version="1.0" encoding="UTF-8"?>
<lesson id="u-1" chapter="ch-1" order="1">
  <title>Grundlagen Alphan</title>
  <meta><studyTime minutes="10"/><difficulty level="2"/></meta>
  <body><p>Start mit <chem ref="c-a">Alphan</chem>.</p>
  <media type="image" src="assets/u-1.png"/></body>
</lesson>
`,
  "u-2.xml": `<?xml version="1.0" encoding="UTF-8"?>
<lesson id="u-2" chapter="ch-1" order="2">
  <title>Aufbau Betan</title>
  <meta><studyTime minutes="20"/><difficulty level="3"/><targetGroup>teachers</targetGroup></meta>
  <body><p>Weiter mit <chem ref="c-b">Betan</chem>.</p></body>
</lesson>
`,
  "u-3.xml": `<?xml version="1.0" encoding="UTF-8"?>
<lesson id="u-3" chapter="ch-1" order="3">
  <title>Ziel Gamman</title>
  <meta><studyTime minutes="30"/><difficulty level="4"/></meta>
  <body><p>Abschluss mit <chem ref="c-c">Gamman</chem>.</p></body>
</lesson>
`,
};

const CONCEPTS = `<?xml version="1.0" encoding="UTF-8"?>
<conceptScheme>
  <concept id="c-a"><label>Alphan</label></concept>
  <concept id="c-b"><label>Betan</label><requires ref="c-a"/></concept>
  <concept id="c-c"><label>Gamman</label><requires ref="c-b"/></concept>
</conceptScheme>
`;

let proc: ChildProcess | null = null;
let corpusDir = "";
let base = "";
let app: App;
let api: ApiClient;

async function waitFor(cond: () => boolean, what: string, timeoutMs = 10_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (cond()) return;
    await new Promise((r) => setTimeout(r, 25));
  }
  throw new Error(`timed out waiting for ${what}`);
}

beforeAll(async () => {
  corpusDir = mkdtempSync(join(tmpdir(), "chemdelt-e2e-"));
  mkdirSync(join(corpusDir, "lessons", "ch-1"), { recursive: true });
  writeFileSync(join(corpusDir, "concepts.xml"), CONCEPTS);
  for (const [name, content] of Object.entries(LESSONS)) {
    writeFileSync(join(corpusDir, "lessons", "ch-1", name), content);
  }

  const port = 20000 + Math.floor(Math.random() * 20000);
  base = `http://127.0.0.1:${port}`;
  proc = spawn(
    "python3",
    ["-m", "chemdelt", "serve", corpusDir, "--port", String(port), "--host", "127.0.0.1"],
    { cwd: REPO_ROOT, stdio: ["ignore", "pipe", "pipe"] },
  );

  const deadline = Date.now() + 60_000;
  for (;;) {
    try {
      const res = await fetch(`${base}/api/stats`);
      if (res.ok) break;
    } catch {
      /* not up yet */
    }
    if (Date.now() > deadline) throw new Error("engine server did not start");
    await new Promise((r) => setTimeout(r, 100));
  }

  (globalThis as Record<string, unknown>)["__CHEMDELT_API_BASE__"] = base;
  const root = document.createElement("div");
  document.body.append(root);
  api = new ApiClient(base);
  app = initApp(root, api);
  await waitFor(() => api.traffic.some((t) => t.url.startsWith("/api/search")), "initial search");
});

afterAll(() => {
  proc?.kill();
  if (corpusDir) rmSync(corpusDir, { recursive: true, force: true });
});

function stepUnits(): string[] {
  return [...document.querySelectorAll(".trajectory-panel .step")].map(
    (row) => (row as HTMLElement).dataset.unit ?? "",
  );
}

describe("learner loop", () => {
  it("lists all units with facet counts on an empty query", async () => {
    await app.showSearch();
    const total = document.querySelector(".results .total span")?.textContent;
    expect(total).toBe("3");
    const difficultyGroup = document.querySelector('.facet-group[data-dim="difficulty"]');
    const labels = [...(difficultyGroup?.querySelectorAll(".facet-value") ?? [])].map((n) =>
      n.textContent?.trim(),
    );
    expect(labels).toEqual(["2 (1)", "3 (1)", "4 (1)"]);
  });

  it("narrows results when a facet is checked", async () => {
    const box = document.querySelector(
      '.facet-group[data-dim="difficulty"] input[data-value="2"]',
    ) as HTMLInputElement;
    expect(box).toBeTruthy();
    box.click();
    await waitFor(
      () => api.traffic.some((t) => t.url.includes("facet.difficulty=2")),
      "faceted request",
    );
    await waitFor(
      () => document.querySelectorAll(".hit-list .hit").length === 1,
      "narrowed result list",
    );
    const hits = [...document.querySelectorAll(".hit-link")].map((a) => (a as HTMLElement).dataset.unit);
    expect(hits).toEqual(["u-1"]);
  });

  it("opens the unit reader from a result row", async () => {
    (document.querySelector('.hit-link[data-unit="u-1"]') as HTMLElement).click();
    await waitFor(() => document.querySelector(".unit-title")?.textContent === "Grundlagen Alphan", "unit open");
    expect(document.querySelector(".unit-body")?.textContent).toContain("Start mit Alphan.");
    expect(document.querySelector('.media-placeholder[data-type="image"]')).toBeTruthy();
  });

  it("shows the full prerequisite path once a goal is chosen", async () => {
    const input = document.getElementById("goal-input") as HTMLInputElement;
    input.value = "c-c";
    (document.getElementById("goal-set") as HTMLElement).click();
    await waitFor(() => stepUnits().length === 3, "trajectory panel");
    expect(stepUnits()).toEqual(["u-1", "u-2", "u-3"]);
    const cumulative = [...document.querySelectorAll(".trajectory-panel .step td:nth-child(4)")].map(
      (n) => n.textContent,
    );
    expect(cumulative).toEqual(["10", "30", "60"]);
  });

  it("mark-as-read posts a view event and the panel refetches", async () => {
    const trajectoriesBefore = api.traffic.filter((t) => t.url === "/api/trajectories").length;
    (document.getElementById("mark-read") as HTMLElement).click();
    await waitFor(
      () =>
        api.traffic.some(
          (t) =>
            t.url === "/api/sessions/" + encodeURIComponent(app.session.sessionId) + "/events" &&
            (t.body as { kind?: string }).kind === "view",
        ),
      "view event",
    );
    await waitFor(
      () => api.traffic.filter((t) => t.url === "/api/trajectories").length > trajectoriesBefore,
      "panel refetch after event",
    );
    // dwell was ~0 seconds, so the path itself is unchanged
    expect(stepUnits()).toEqual(["u-1", "u-2", "u-3"]);
  });

  it("two perfect self-checks drop the mastered unit from the path", async () => {
    const slider = document.getElementById("self-check") as HTMLInputElement;
    slider.value = "100";
    (document.getElementById("self-check-submit") as HTMLElement).click();
    (document.getElementById("self-check-submit") as HTMLElement).click();
    await waitFor(() => stepUnits().length === 2, "trajectory shrank");
    expect(stepUnits()).toEqual(["u-2", "u-3"]);
    const mastery = document.querySelector('.mastery-row[data-concept="c-a"] .mastery-value');
    expect(mastery?.getAttribute("data-api-value")).toBe("0.84");
  });

  it("static-vs-dynamic toggle shows the skipped unit", async () => {
    (document.getElementById("compare-toggle") as HTMLElement).click();
    await waitFor(() => document.querySelector(".compare-panel .skipped") !== null, "comparison");
    expect(document.querySelector(".compare-panel .static-order")?.textContent).toContain("u-1");
    expect(document.querySelector(".compare-panel .skipped")?.textContent).toContain("u-1");
  });

  it("displays only numbers that came from the API (no client recomputation)", () => {
    const served = new Set<string>();
    const collect = (value: unknown): void => {
      if (typeof value === "number") served.add(String(value));
      else if (Array.isArray(value)) value.forEach(collect);
      else if (value && typeof value === "object") Object.values(value).forEach(collect);
    };
    for (const record of api.traffic) collect(record.response);
    const displayed = [...document.querySelectorAll("[data-api-value]")]
      .map((n) => n.getAttribute("data-api-value") ?? "")
      .filter((v) => v !== "");
    expect(displayed.length).toBeGreaterThan(0);
    for (const value of displayed) {
      expect(served.has(value), `displayed value ${value} must come from an API response`).toBe(true);
    }
  });

  it("orders session events strictly (queue depth 1)", () => {
    const acks = api.traffic
      .filter((t) => t.url.endsWith("/events") && t.status === 200)
      .map((t) => (t.response as { eventCount: number }).eventCount);
    expect(acks).toEqual([...acks].sort((a, b) => a - b));
    expect(new Set(acks).size).toBe(acks.length);
  });
});
