// App bootstrap: hash routing between the four persistent views plus the
// 2-second poll loop. Connectivity failures raise a retry banner and never
// touch form state; the next successful poll clears it.

import { initJobsView, initPreprocessView, initResultsView, initSourcesView, View } from "./views";

const POLL_MS = 2000;

const routes = ["sources", "jobs", "preprocess", "results"] as const;
type Route = (typeof routes)[number];

function currentRoute(): Route {
  const hash = location.hash.replace(/^#\//, "");
  return (routes as readonly string[]).includes(hash) ? (hash as Route) : "sources";
}

function main(): void {
  const app = document.getElementById("app")!;
  const banner = document.getElementById("banner")!;

  const containers = {} as Record<Route, HTMLElement>;
  for (const route of routes) {
    const section = document.createElement("section");
    section.className = "view";
    section.id = `view-${route}`;
    app.appendChild(section);
    containers[route] = section;
  }

  const results = initResultsView(containers.results);
  const views: Record<Route, View> = {
    sources: initSourcesView(containers.sources),
    jobs: initJobsView(containers.jobs, (jobId) => {
      location.hash = "#/results";
      results.open(jobId);
    }),
    preprocess: initPreprocessView(containers.preprocess),
    results,
  };

  function setActive(route: Route): void {
    for (const r of routes) {
      containers[r].style.display = r === route ? "block" : "none";
      document.querySelector(`nav a[href="#/${r}"]`)?.classList.toggle("active", r === route);
    }
    void refresh();
  }

  let refreshing = false;
  async function refresh(): Promise<void> {
    if (refreshing) return;
    refreshing = true;
    try {
      await views[currentRoute()].refresh();
      banner.style.display = "none";
    } catch {
      banner.textContent = "API unreachable, retrying; your form input is preserved.";
      banner.style.display = "block";
    } finally {
      refreshing = false;
    }
  }

  window.addEventListener("hashchange", () => setActive(currentRoute()));
  setActive(currentRoute());
  setInterval(() => void refresh(), POLL_MS);
}

main();
