/** App shell: hash routing between search and reader, with the trajectory
 * panel and profile widget always alongside. No learning logic lives here;
 * the UI posts events and re-renders what the API returns. */

import { ApiClient } from "./api.js";
import { UiSession } from "./session.js";
import { clear, el } from "./dom.js";
import { ProfileWidget } from "./views/profileWidget.js";
import { SearchView } from "./views/searchView.js";
import { TrajectoryView } from "./views/trajectoryView.js";
import { UnitView } from "./views/unitView.js";

export interface App {
  api: ApiClient;
  session: UiSession;
  search: SearchView;
  unit: UnitView;
  trajectory: TrajectoryView;
  profile: ProfileWidget;
  openUnit(id: string): Promise<void>;
  showSearch(): Promise<void>;
}

export function initApp(root: HTMLElement, api: ApiClient = new ApiClient()): App {
  const session = new UiSession();
  const main = el("main", { class: "content" });
  const sidebar = el("aside", { class: "sidebar" });

  const trajectory = new TrajectoryView(api, session);
  const profile = new ProfileWidget(api, session);

  const afterEvent = async (): Promise<void> => {
    // the panel regenerates after every event; profile bars follow
    await trajectory.refresh();
    await profile.refresh();
  };

  const unit = new UnitView(api, session, afterEvent, (conceptId) => {
    void trajectory.setGoal(conceptId);
  });
  const search = new SearchView(api, (id) => {
    void openUnit(id);
  });

  trajectory.chapterSource(() => unit.unit()?.chapter ?? null);

  async function openUnit(id: string): Promise<void> {
    clear(main);
    main.append(unit.root);
    window.location.hash = `#/unit/${id}`;
    await unit.open(id);
  }

  async function showSearch(): Promise<void> {
    await unit.leave();
    clear(main);
    main.append(search.root);
    window.location.hash = "#/search";
    await search.runSearch();
  }

  const header = el(
    "header",
    { class: "topbar" },
    el("h1", {}, "chemdelt"),
    (() => {
      const home = el("a", { href: "#/search", class: "nav-search" }, "Suche");
      home.addEventListener("click", (event) => {
        event.preventDefault();
        void showSearch();
      });
      return home;
    })(),
  );

  sidebar.append(trajectory.root, profile.root);
  root.append(header, el("div", { class: "layout" }, main, sidebar));

  window.addEventListener("hashchange", () => {
    const match = window.location.hash.match(/^#\/unit\/(.+)$/);
    if (match) {
      void openUnit(decodeURIComponent(match[1]));
    }
  });

  const initial = window.location.hash.match(/^#\/unit\/(.+)$/);
  if (initial) {
    void openUnit(decodeURIComponent(initial[1]));
  } else {
    void showSearch();
  }

  return { api, session, search, unit, trajectory, profile, openUnit, showSearch };
}

declare global {
  interface Window {
    chemdeltApp?: App;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  window.chemdeltApp = initApp(document.getElementById("app") as HTMLElement);
}
