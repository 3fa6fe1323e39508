/** Mastery bars for the current session, straight from /profile. */

import { ApiClient } from "../api.js";
import { UiSession } from "../session.js";
import { clear, el } from "../dom.js";

export class ProfileWidget {
  readonly root: HTMLElement;

  constructor(
    private readonly api: ApiClient,
    private readonly session: UiSession,
  ) {
    this.root = el("section", { class: "profile-widget" }, el("h2", {}, "Dein Wissensstand"));
  }

  async refresh(): Promise<void> {
    const profile = await this.api.profile(this.session.sessionId);
    clear(this.root);
    this.root.append(el("h2", {}, "Dein Wissensstand"));
    const entries = Object.entries(profile.mastery).sort(([a], [b]) => a.localeCompare(b));
    if (!entries.length) {
      this.root.append(el("p", { class: "empty-state" }, "Noch keine Daten in dieser Sitzung."));
    }
    for (const [conceptId, value] of entries) {
      const bar = el("div", { class: "mastery-bar" });
      bar.style.width = `${Math.round(value * 100)}%`;
      this.root.append(
        el(
          "div",
          { class: "mastery-row", "data-concept": conceptId },
          el("span", { class: "concept-id" }, conceptId),
          el("div", { class: "mastery-track" }, bar),
          el("span", { class: "mastery-value", "data-api-value": String(value) }, value.toFixed(2)),
        ),
      );
    }
    this.root.append(
      el(
        "p",
        { class: "event-count" },
        "Ereignisse: ",
        el("span", { "data-api-value": String(profile.eventCount) }, String(profile.eventCount)),
      ),
    );
  }
}
