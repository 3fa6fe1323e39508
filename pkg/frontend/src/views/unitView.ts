/** Unit reader: body text, media placeholders, metadata, and the two event
 * instruments. A dwell timer accumulates while the unit is open; leaving the
 * unit or pressing "mark as read" posts a view event with the accumulated
 * seconds. The self-check slider posts a quiz event with score 0..1. Every
 * posted event triggers the trajectory panel refresh callback. */

import { ApiClient, UnitDoc } from "../api.js";
import { UiSession } from "../session.js";
import { clear, el } from "../dom.js";

export class UnitView {
  readonly root: HTMLElement;
  private current: UnitDoc | null = null;
  private openedAt = 0;
  private readonly now: () => number;

  constructor(
    private readonly api: ApiClient,
    private readonly session: UiSession,
    private readonly onEventPosted: () => Promise<void>,
    private readonly onSetGoal: (conceptId: string) => void,
    now?: () => number,
  ) {
    this.now = now ?? (() => performance.now());
    this.root = el("section", { class: "unit-view" });
  }

  unit(): UnitDoc | null {
    return this.current;
  }

  private dwellSeconds(): number {
    return Math.max(0, Math.floor((this.now() - this.openedAt) / 1000));
  }

  /** Post the pending view event for the open unit, if any. */
  async leave(): Promise<void> {
    if (!this.current) return;
    const unitId = this.current.id;
    const dwell = this.dwellSeconds();
    this.current = null;
    await this.postGuarded({ kind: "view", unitId, dwellSeconds: dwell });
  }

  async open(id: string): Promise<void> {
    await this.leave();
    const unit = await this.api.unit(id);
    this.current = unit;
    this.openedAt = this.now();
    this.render(unit);
  }

  async markAsRead(): Promise<void> {
    if (!this.current) return;
    const dwell = this.dwellSeconds();
    this.openedAt = this.now(); // timer restarts; the unit stays open
    await this.postGuarded({ kind: "view", unitId: this.current.id, dwellSeconds: dwell });
  }

  async selfCheck(percent: number): Promise<void> {
    if (!this.current) return;
    const score = Math.min(100, Math.max(0, percent)) / 100;
    await this.postGuarded({ kind: "quiz", unitId: this.current.id, score });
  }

  private async postGuarded(event: Parameters<ApiClient["postEvent"]>[1]): Promise<void> {
    const note = this.root.querySelector(".event-status");
    try {
      await this.api.postEvent(this.session.sessionId, event);
      if (note) note.textContent = "";
    } catch (error) {
      if (note) note.textContent = `Ereignis fehlgeschlagen: ${(error as Error).message}`;
      return;
    }
    await this.onEventPosted();
  }

  private render(unit: UnitDoc): void {
    clear(this.root);
    const meta = el(
      "dl",
      { class: "unit-meta" },
      el("dt", {}, "Kapitel"),
      el("dd", {}, unit.chapter ?? "-"),
      el("dt", {}, "Lernzeit (min)"),
      el("dd", { "data-api-value": String(unit.studyTime ?? "") }, String(unit.studyTime ?? "-")),
      el("dt", {}, "Zielgruppe"),
      el("dd", {}, unit.targetGroup ?? "-"),
      el("dt", {}, "Schwierigkeit"),
      el("dd", { "data-api-value": String(unit.difficulty ?? "") }, String(unit.difficulty ?? "-")),
    );

    const teaches = el("div", { class: "teaches" }, "Behandelt: ");
    for (const conceptId of unit.teaches) {
      const chip = el("button", { class: "concept-chip", "data-concept": conceptId }, conceptId);
      chip.title = "Als Lernziel setzen";
      chip.addEventListener("click", () => this.onSetGoal(conceptId));
      teaches.append(chip, " ");
    }

    const media = el("div", { class: "media-list" });
    for (const item of unit.media) {
      media.append(el("div", { class: "media-placeholder", "data-type": item.type }, `[${item.type}] ${item.src}`));
    }

    const markButton = el("button", { id: "mark-read" }, "Als gelesen markieren");
    markButton.addEventListener("click", () => void this.markAsRead());

    const slider = el("input", {
      id: "self-check",
      type: "range",
      min: "0",
      max: "100",
      step: "5",
      value: "100",
    });
    const sliderLabel = el("span", { class: "self-check-label" }, "100%");
    slider.addEventListener("input", () => {
      sliderLabel.textContent = `${slider.value}%`;
    });
    const quizButton = el("button", { id: "self-check-submit" }, "Selbsteinschätzung senden");
    quizButton.addEventListener("click", () => void this.selfCheck(Number(slider.value)));

    this.root.append(
      el("h2", { class: "unit-title" }, unit.title || unit.id),
      meta,
      teaches,
      el("article", { class: "unit-body" }, unit.body),
      media,
      el(
        "div",
        { class: "instruments" },
        markButton,
        el("div", { class: "self-check" }, el("label", { for: "self-check" }, "Wie sicher fühlst du dich? "), slider, sliderLabel, quizButton),
      ),
      el("div", { class: "event-status" }),
      unit.next
        ? el("div", { class: "next-link" }, "Nächste Einheit: ", el("a", { href: `#/unit/${unit.next}` }, unit.next))
        : el("div", {}),
    );
  }
}
