/** Live trajectory panel: goal picker, level selector, the ordered steps with
 * cumulative minutes, gap highlighting, and a static-vs-dynamic toggle. The
 * panel regenerates after every session event and on goal/level change; it
 * never computes mastery or scores itself. */

import { ApiClient, ApiError, ComparisonDoc, TrajectoryDoc } from "../api.js";
import { UiSession } from "../session.js";
import { clear, el } from "../dom.js";

export class TrajectoryView {
  readonly root: HTMLElement;
  private readonly goalInput: HTMLInputElement;
  private readonly levelSelect: HTMLSelectElement;
  private readonly panel: HTMLElement;
  private readonly comparePanel: HTMLElement;
  private lastTrajectory: TrajectoryDoc | null = null;
  private compareChapter: (() => string | null) | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly session: UiSession,
  ) {
    this.goalInput = el("input", { id: "goal-input", type: "text", placeholder: "Lernziel (Konzept-Id)" });
    const goalButton = el("button", { id: "goal-set" }, "Ziel setzen");
    goalButton.addEventListener("click", () => {
      void this.setGoal(this.goalInput.value.trim() || null);
    });
    this.levelSelect = el("select", { id: "level-select" });
    for (let level = 1; level <= 5; level += 1) {
      const option = el("option", { value: String(level) }, String(level));
      if (level === session.level) option.selected = true;
      this.levelSelect.append(option);
    }
    this.levelSelect.addEventListener("change", () => {
      this.session.level = Number(this.levelSelect.value);
      void this.refresh();
    });
    const compareButton = el("button", { id: "compare-toggle" }, "Statisch vergleichen");
    compareButton.addEventListener("click", () => void this.toggleCompare());
    this.panel = el("div", { class: "trajectory-panel" });
    this.comparePanel = el("div", { class: "compare-panel" });
    this.root = el(
      "section",
      { class: "trajectory-view" },
      el("h2", {}, "Dein Lernpfad"),
      el("div", { class: "goal-row" }, this.goalInput, goalButton),
      el("div", { class: "level-row" }, el("label", { for: "level-select" }, "Niveau "), this.levelSelect),
      compareButton,
      this.panel,
      this.comparePanel,
    );
    this.renderEmpty();
  }

  /** The compare toggle needs a chapter; the app supplies where to take it from. */
  chapterSource(source: () => string | null): void {
    this.compareChapter = source;
  }

  trajectory(): TrajectoryDoc | null {
    return this.lastTrajectory;
  }

  async setGoal(goal: string | null): Promise<void> {
    this.session.goal = goal;
    this.goalInput.value = goal ?? "";
    await this.refresh();
  }

  async refresh(): Promise<void> {
    clear(this.comparePanel);
    if (!this.session.goal) {
      this.renderEmpty();
      return;
    }
    try {
      const trajectory = await this.api.trajectory({
        sessionId: this.session.sessionId,
        goal: this.session.goal,
        level: this.session.level,
      });
      this.lastTrajectory = trajectory;
      this.render(trajectory);
    } catch (error) {
      this.lastTrajectory = null;
      clear(this.panel);
      if (error instanceof ApiError && error.code === "cyclic_prerequisites") {
        this.panel.append(
          el("div", { class: "content-problem" }, "Inhaltsproblem: zyklische Voraussetzungen. ", error.message),
        );
      } else if (error instanceof ApiError && error.code === "concept_not_found") {
        this.panel.append(el("div", { class: "content-problem" }, `Unbekanntes Konzept: ${this.session.goal}`));
      } else {
        this.panel.append(el("div", { class: "error-banner" }, "Lernpfad konnte nicht geladen werden."));
      }
    }
  }

  private renderEmpty(): void {
    clear(this.panel);
    this.panel.append(el("p", { class: "empty-state" }, "Wähle ein Lernziel."));
  }

  private render(trajectory: TrajectoryDoc): void {
    clear(this.panel);
    if (trajectory.steps.length === 0 && trajectory.gaps.length === 0) {
      this.panel.append(el("p", { class: "all-done" }, "Alles gemeistert. Kein Pfad nötig."));
      return;
    }
    const table = el(
      "table",
      { class: "steps" },
      el(
        "thead",
        {},
        el(
          "tr",
          {},
          el("th", {}, "#"),
          el("th", {}, "Einheit"),
          el("th", {}, "Minuten"),
          el("th", {}, "Kumuliert"),
          el("th", {}, "Konzepte"),
        ),
      ),
    );
    const body = el("tbody", {});
    let cumulative = 0;
    trajectory.steps.forEach((step, index) => {
      cumulative += step.minutes;
      const link = el("a", { href: `#/unit/${step.unit}`, class: "step-unit", "data-unit": step.unit }, step.title || step.unit);
      body.append(
        el(
          "tr",
          { class: "step", "data-unit": step.unit },
          el("td", {}, String(index + 1)),
          el("td", {}, link),
          el("td", { "data-api-value": String(step.minutes) }, String(step.minutes)),
          el("td", {}, String(cumulative)),
          el("td", {}, step.contributes.join(", ")),
        ),
      );
    });
    table.append(body);
    this.panel.append(table);
    this.panel.append(
      el(
        "p",
        { class: "totals" },
        "Gesamt: ",
        el("span", { "data-api-value": String(trajectory.totalMinutes) }, String(trajectory.totalMinutes)),
        " min",
        trajectory.truncated ? " (gekürzt)" : "",
      ),
    );
    if (trajectory.gaps.length) {
      this.panel.append(
        el("p", { class: "gaps" }, "Lücken ohne Lerneinheit: ", trajectory.gaps.join(", ")),
      );
    }
  }

  async toggleCompare(): Promise<void> {
    if (this.comparePanel.childElementCount > 0) {
      clear(this.comparePanel);
      return;
    }
    const chapter = this.compareChapter ? this.compareChapter() : null;
    if (!this.session.goal || !chapter) {
      clear(this.comparePanel);
      this.comparePanel.append(
        el("p", { class: "empty-state" }, "Öffne eine Einheit, um ihr Kapitel zu vergleichen."),
      );
      return;
    }
    try {
      const cmp = await this.api.compare(this.session.sessionId, this.session.goal, chapter);
      this.renderCompare(cmp);
    } catch (error) {
      clear(this.comparePanel);
      const message =
        error instanceof ApiError && error.code === "broken_chain"
          ? "Inhaltsproblem: Kapitelkette ist unterbrochen."
          : "Vergleich fehlgeschlagen.";
      this.comparePanel.append(el("div", { class: "content-problem" }, message));
    }
  }

  private renderCompare(cmp: ComparisonDoc): void {
    clear(this.comparePanel);
    this.comparePanel.append(
      el("h3", {}, "Statisch vs. dynamisch"),
      el("p", { class: "static-order" }, "Statisch: ", cmp.staticUnits.join(" → ") || "-"),
      el("p", { class: "dynamic-order" }, "Dynamisch: ", cmp.dynamicUnits.join(" → ") || "-"),
      el("p", { class: "skipped" }, "Übersprungen: ", cmp.skipped.join(", ") || "-"),
      el("p", { class: "added" }, "Hinzugefügt: ", cmp.added.join(", ") || "-"),
      el(
        "p",
        { class: "inversions" },
        "Reihenfolge-Inversionen: ",
        el("span", { "data-api-value": String(cmp.orderInversions) }, String(cmp.orderInversions)),
      ),
    );
  }
}
