/** Faceted search: text box, checkbox facet groups with counts, result rows.
 * Checking values within one dimension widens (OR), checking across
 * dimensions narrows (AND); both happen server-side, the view only refetches. */

import { ApiClient, SearchResult } from "../api.js";
import { clear, el } from "../dom.js";

const DIMENSIONS = ["targetGroup", "difficulty", "mediaType", "chapter", "studyTimeBucket"];

export class SearchView {
  readonly root: HTMLElement;
  private readonly input: HTMLInputElement;
  private readonly facetBox: HTMLElement;
  private readonly results: HTMLElement;
  private readonly status: HTMLElement;
  private readonly selected = new Map<string, Set<string>>();
  private lastResult: SearchResult | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly onOpenUnit: (id: string) => void,
  ) {
    this.input = el("input", {
      id: "search-input",
      type: "search",
      placeholder: "Suche in Lerneinheiten…",
    });
    const button = el("button", { id: "search-button" }, "Suchen");
    button.addEventListener("click", () => void this.runSearch());
    this.input.addEventListener("keydown", (event) => {
      if ((event as KeyboardEvent).key === "Enter") void this.runSearch();
    });
    this.status = el("div", { class: "status" });
    this.facetBox = el("aside", { class: "facets" });
    this.results = el("div", { class: "results" });
    this.root = el(
      "section",
      { class: "search-view" },
      el("div", { class: "search-bar" }, this.input, button),
      this.status,
      el("div", { class: "search-body" }, this.facetBox, this.results),
    );
  }

  filters(): Record<string, string[]> {
    const out: Record<string, string[]> = {};
    for (const [dim, values] of this.selected) {
      if (values.size) out[dim] = [...values];
    }
    return out;
  }

  async runSearch(): Promise<void> {
    clear(this.status);
    try {
      const result = await this.api.search(this.input.value, this.filters(), 0, 50);
      this.lastResult = result;
      this.render(result);
    } catch {
      this.renderError();
    }
  }

  private renderError(): void {
    clear(this.status);
    const retry = el("button", { class: "retry" }, "Erneut versuchen");
    retry.addEventListener("click", () => void this.runSearch());
    this.status.append(el("div", { class: "error-banner" }, "Suche fehlgeschlagen. ", retry));
  }

  private render(result: SearchResult): void {
    clear(this.facetBox);
    for (const dim of DIMENSIONS) {
      const counts = result.facets[dim] ?? {};
      const values = Object.keys(counts).sort();
      const group = el("div", { class: "facet-group", "data-dim": dim }, el("h3", {}, dim));
      const active = this.selected.get(dim) ?? new Set<string>();
      for (const value of values) {
        const checkbox = el("input", { type: "checkbox", "data-dim": dim, "data-value": value });
        checkbox.checked = active.has(value);
        checkbox.addEventListener("change", () => {
          const set = this.selected.get(dim) ?? new Set<string>();
          if (checkbox.checked) set.add(value);
          else set.delete(value);
          this.selected.set(dim, set);
          void this.runSearch();
        });
        group.append(
          el(
            "label",
            { class: "facet-value" },
            checkbox,
            ` ${value} `,
            el("span", { class: "count", "data-api-value": String(counts[value]) }, `(${counts[value]})`),
          ),
        );
      }
      // keep a selected value visible even when the current counts omit it
      for (const value of [...active].sort()) {
        if (!(value in counts)) {
          const checkbox = el("input", { type: "checkbox", "data-dim": dim, "data-value": value });
          checkbox.checked = true;
          checkbox.addEventListener("change", () => {
            active.delete(value);
            void this.runSearch();
          });
          group.append(el("label", { class: "facet-value" }, checkbox, ` ${value} `, el("span", { class: "count" }, "(0)")));
        }
      }
      this.facetBox.append(group);
    }

    clear(this.results);
    this.results.append(
      el("p", { class: "total" }, "Treffer: ", el("span", { "data-api-value": String(result.total) }, String(result.total))),
    );
    if (result.total === 0) {
      this.results.append(el("p", { class: "empty-state" }, "Keine Einheiten gefunden."));
      return;
    }
    const list = el("ul", { class: "hit-list" });
    for (const hit of result.hits) {
      const link = el("a", { href: `#/unit/${hit.id}`, class: "hit-link", "data-unit": hit.id }, hit.title || hit.id);
      link.addEventListener("click", (event) => {
        event.preventDefault();
        this.onOpenUnit(hit.id);
      });
      list.append(
        el(
          "li",
          { class: "hit" },
          link,
          " ",
          el("span", { class: "score", "data-api-value": String(hit.score) }, hit.score.toFixed(3)),
        ),
      );
    }
    this.results.append(list);
  }

  result(): SearchResult | null {
    return this.lastResult;
  }
}
