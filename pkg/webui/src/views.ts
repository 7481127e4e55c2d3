// The four views. Each is a persistent DOM subtree: navigation only toggles
// visibility, so form state survives connectivity loss and view switches.
// Data regions are re-rendered on each poll tick; forms never are.

import { api, latestOnly, RequestFailed } from "./api";
import { barChart, lineChart } from "./charts";
import { configToForm, defaultForm, formToConfig, PipelineForm, splitTerms } from "./forms";
import { escapeHtml, stageReportTableHtml } from "./report";
import type {
  AnalysisResult,
  DatasetRecord,
  JobRecord,
  SourceEntry,
  StageReport,
} from "./types";

export interface View {
  refresh(): Promise<void>;
}

type Fields = Record<string, string> | undefined;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  html = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  if (html) node.innerHTML = html;
  return node;
}

function showFieldErrors(form: HTMLElement, fields: Fields, fallback: string): void {
  form.querySelectorAll(".field-error").forEach((n) => n.remove());
  const box = form.querySelector(".form-message") as HTMLElement | null;
  if (fields && Object.keys(fields).length > 0) {
    for (const [name, message] of Object.entries(fields)) {
      const input = form.querySelector(`[data-field="${name}"]`);
      const note = el("span", { class: "field-error" }, escapeHtml(`${name}: ${message}`));
      if (input?.parentElement) input.parentElement.appendChild(note);
      else box?.appendChild(note);
    }
    if (box) box.textContent = fallback;
  } else if (box) {
    box.textContent = fallback;
  }
}

function clearFormMessage(form: HTMLElement): void {
  form.querySelectorAll(".field-error").forEach((n) => n.remove());
  const box = form.querySelector(".form-message") as HTMLElement | null;
  if (box) box.textContent = "";
}

const STATUS_BADGES: Record<string, string> = {
  pending: "badge-pending",
  running: "badge-running",
  completed: "badge-completed",
  failed: "badge-failed",
  cancelled: "badge-cancelled",
};

function badge(status: string): string {
  return `<span class="badge ${STATUS_BADGES[status] ?? ""}">${escapeHtml(status)}</span>`;
}

// ---------------------------------------------------------------------------
// Sources view
// ---------------------------------------------------------------------------

export function initSourcesView(container: HTMLElement): View {
  container.innerHTML = `<h2>Sources</h2>
    <p class="hint">Configure a connector and submit a collection job.</p>
    <div id="source-forms" class="cards"></div>`;
  const formsBox = container.querySelector("#source-forms") as HTMLElement;
  let loaded = false;

  function paramInput(kind: string, name: string, doc: string): string {
    const long = name === "mapping";
    const field = `params.${name}`;
    return `<label>${escapeHtml(name)} <span class="hint">${escapeHtml(doc)}</span>
      ${long
        ? `<textarea data-field="${field}" data-param="${escapeHtml(name)}" rows="4"></textarea>`
        : `<input data-field="${field}" data-param="${escapeHtml(name)}">`}
    </label>`;
  }

  function renderForms(sources: SourceEntry[]): void {
    formsBox.innerHTML = "";
    for (const source of sources) {
      const card = el("div", { class: "card" });
      card.innerHTML = `<h3>${escapeHtml(source.kind)}</h3>
        <label>source name <input data-field="source_name" value="my-${escapeHtml(source.kind)}"></label>
        <label>category
          <select data-field="source_category">
            <option>social_media</option><option>news</option>
            <option>ecommerce_review</option><option>academic</option>
          </select>
        </label>
        <label>keywords (comma separated) <input data-field="keywords"></label>
        <label>date range start <input data-field="date_start" placeholder="2022-09-01T00:00:00Z"></label>
        <label>date range end <input data-field="date_end" placeholder="2022-09-30T23:59:59Z"></label>
        ${Object.entries(source.params).map(([n, d]) => paramInput(source.kind, n, d)).join("")}
        <button type="button">Collect</button>
        <div class="form-message"></div>`;
      const button = card.querySelector("button")!;
      button.addEventListener("click", async () => {
        clearFormMessage(card);
        const read = (sel: string) =>
          (card.querySelector(`[data-field="${sel}"]`) as HTMLInputElement | null)?.value ?? "";
        const params: Record<string, string> = {};
        card.querySelectorAll<HTMLElement>("[data-param]").forEach((node) => {
          const value = (node as HTMLInputElement).value.trim();
          if (value) params[node.dataset.param!] = value;
        });
        const payload: Record<string, unknown> = {
          connector_kind: source.kind,
          source_name: read("source_name"),
          source_category: read("source_category"),
          params,
        };
        const keywords = splitTerms(read("keywords"));
        if (keywords.length) payload.keywords = keywords;
        if (read("date_start") && read("date_end")) {
          payload.date_range = { start: read("date_start"), end: read("date_end") };
        }
        try {
          const { job_id } = await api.submitJob("collect", payload);
          showFieldErrors(card, undefined, `submitted ${job_id}; watch the Jobs view`);
        } catch (err) {
          if (err instanceof RequestFailed) showFieldErrors(card, err.detail.fields, err.detail.error);
          else throw err;
        }
      });
      formsBox.appendChild(card);
    }
  }

  const fetchSources = latestOnly(api.sources);
  return {
    async refresh() {
      if (loaded) return;
      const result = await fetchSources();
      if (result) {
        renderForms(result.sources);
        loaded = true;
      }
    },
  };
}

// ---------------------------------------------------------------------------
// Jobs view
// ---------------------------------------------------------------------------

export function initJobsView(container: HTMLElement, openResult: (jobId: string) => void): View {
  container.innerHTML = `<h2>Jobs</h2>
    <div id="source-counts" class="cards"></div>
    <table class="list"><thead><tr>
      <th>job</th><th>type</th><th>status</th><th>attempts</th><th>created</th><th></th>
    </tr></thead><tbody id="jobs-body"></tbody></table>
    <p class="hint">List refreshes every 2 seconds.</p>`;
  const body = container.querySelector("#jobs-body") as HTMLElement;
  const countsBox = container.querySelector("#source-counts") as HTMLElement;

  function renderCounts(datasets: DatasetRecord[]): void {
    const raws = datasets.filter((d) => d.kind === "raw");
    countsBox.innerHTML =
      raws.length === 0
        ? `<p class="empty">No datasets collected yet; configure one under
           <a href="#/sources">Sources</a>.</p>`
        : raws
            .map(
              (d) => `<div class="card stat"><div class="stat-value">${d.record_count}</div>
                <div class="stat-label">${escapeHtml(d.name)}</div></div>`,
            )
            .join("");
  }

  function renderJobs(jobs: JobRecord[]): void {
    body.innerHTML = jobs
      .map((job) => {
        const cancel =
          job.status === "pending"
            ? `<button type="button" data-cancel="${job.job_id}">cancel</button>`
            : "";
        const open =
          job.status === "completed"
            ? `<button type="button" data-open="${job.job_id}">result</button>`
            : "";
        const error = job.error ? `<div class="hint">${escapeHtml(job.error)}</div>` : "";
        return `<tr><td class="mono">${job.job_id}</td><td>${job.job_type}</td>
          <td>${badge(job.status)}${error}</td><td>${job.attempts}/${job.max_attempts}</td>
          <td class="mono">${job.created_at.slice(0, 19)}</td><td>${cancel}${open}</td></tr>`;
      })
      .join("");
    body.querySelectorAll<HTMLButtonElement>("[data-cancel]").forEach((button) =>
      button.addEventListener("click", () => api.cancelJob(button.dataset.cancel!)),
    );
    body.querySelectorAll<HTMLButtonElement>("[data-open]").forEach((button) =>
      button.addEventListener("click", () => openResult(button.dataset.open!)),
    );
  }

  const fetchBoth = latestOnly(async () => ({
    jobs: await api.jobs(),
    datasets: await api.datasets(),
  }));
  return {
    async refresh() {
      const result = await fetchBoth();
      if (result) {
        renderJobs(result.jobs.jobs.slice().reverse());
        renderCounts(result.datasets.datasets);
      }
    },
  };
}

// ---------------------------------------------------------------------------
// Preprocess view
// ---------------------------------------------------------------------------

const STAGE_TITLES: Record<keyof PipelineForm, string> = {
  dedup: "Deduplication",
  date: "Date filtering",
  language: "Language detection",
  keyword: "Keyword filtering",
  relevancy: "Relevancy classification",
};

export function initPreprocessView(container: HTMLElement): View {
  container.innerHTML = `<h2>Preprocess</h2>
    <form id="pre-form" onsubmit="return false">
      <label>input datasets
        <select id="pre-inputs" data-field="inputs" multiple size="5"></select>
      </label>
      <label>output name <input id="pre-name" value="preprocessed"></label>
      <div id="stage-panels" class="cards"></div>
      <button type="button" id="pre-submit">Run pipeline</button>
      <div class="form-message"></div>
    </form>`;
  const form = container.querySelector("#pre-form") as HTMLElement;
  const panels = container.querySelector("#stage-panels") as HTMLElement;
  const inputsSelect = container.querySelector("#pre-inputs") as HTMLSelectElement;

  const stageFieldHtml: Record<keyof PipelineForm, string> = {
    dedup: `<label>mode <select data-bind="dedup.mode">
        <option>exact</option><option>near</option></select></label>
      <label>near threshold (bits)
        <input type="number" min="0" max="64" data-bind="dedup.nearThreshold"></label>`,
    date: `<label>start <input data-bind="date.start" data-field="config.date.start"></label>
      <label>end <input data-bind="date.end" data-field="config.date.end"></label>
      <label>missing timestamps <select data-bind="date.missingPolicy">
        <option>drop</option><option>keep</option></select></label>`,
    language: `<label>targets (codes, comma separated)
        <input data-bind="language.targets" data-field="config.language.targets"></label>
      <label>unknown policy <select data-bind="language.unknownPolicy">
        <option>drop</option><option>keep</option></select></label>
      <label>ambiguity margin
        <input type="number" step="0.01" min="0" max="1" data-bind="language.margin"></label>`,
    keyword: `<label>include terms <input data-bind="keyword.include"></label>
      <label>exclude terms <input data-bind="keyword.exclude"
        placeholder="BlackBerry Messenger"></label>
      <label>match <select data-bind="keyword.match">
        <option>substring</option><option>whole_word</option></select></label>`,
    relevancy: `<label>research context
        <textarea rows="2" data-bind="relevancy.context" data-field="config.relevancy.context"
          placeholder="Kebijakan harga BBM dan dampaknya terhadap kehidupan sehari-hari"></textarea></label>
      <label>threshold <span class="threshold-value">0.1</span>
        <input type="range" min="0" max="1" step="0.01" data-bind="relevancy.threshold"></label>
      <label>classifier <select data-bind="relevancy.classifier">
        <option>baseline</option><option>remote</option></select></label>
      <label>remote endpoint <input data-bind="relevancy.endpoint"
        data-field="config.relevancy.endpoint" placeholder="http://127.0.0.1:8901"></label>`,
  };

  for (const stage of Object.keys(STAGE_TITLES) as (keyof PipelineForm)[]) {
    const panel = el("div", { class: "card" });
    panel.innerHTML = `<h3><label><input type="checkbox" data-enable="${stage}">
      ${STAGE_TITLES[stage]}</label></h3>
      <div class="stage-fields" data-stage="${stage}">${stageFieldHtml[stage]}</div>`;
    panels.appendChild(panel);
  }
  const slider = form.querySelector('[data-bind="relevancy.threshold"]') as HTMLInputElement;
  slider.addEventListener("input", () => {
    (form.querySelector(".threshold-value") as HTMLElement).textContent = slider.value;
  });

  writeForm(defaultForm());

  function writeForm(state: PipelineForm): void {
    for (const stage of Object.keys(STAGE_TITLES) as (keyof PipelineForm)[]) {
      (form.querySelector(`[data-enable="${stage}"]`) as HTMLInputElement).checked =
        state[stage].enabled;
      for (const [key, value] of Object.entries(state[stage])) {
        if (key === "enabled") continue;
        const input = form.querySelector(`[data-bind="${stage}.${key}"]`) as
          | HTMLInputElement
          | null;
        if (input) input.value = String(value);
      }
    }
    (form.querySelector(".threshold-value") as HTMLElement).textContent = slider.value;
  }

  function readForm(): PipelineForm {
    const state = defaultForm();
    for (const stage of Object.keys(STAGE_TITLES) as (keyof PipelineForm)[]) {
      const anyStage = state[stage] as unknown as Record<string, unknown>;
      anyStage.enabled = (form.querySelector(`[data-enable="${stage}"]`) as HTMLInputElement)
        .checked;
      for (const key of Object.keys(state[stage])) {
        if (key === "enabled") continue;
        const input = form.querySelector(`[data-bind="${stage}.${key}"]`) as
          | HTMLInputElement
          | null;
        if (!input) continue;
        const current = anyStage[key];
        anyStage[key] = typeof current === "number" ? Number(input.value) : input.value;
      }
    }
    return state;
  }

  (container.querySelector("#pre-submit") as HTMLButtonElement).addEventListener(
    "click",
    async () => {
      clearFormMessage(form);
      const inputs = Array.from(inputsSelect.selectedOptions).map((o) => o.value);
      const config = formToConfig(readForm());
      // round-trip the config back into the form: the panels now show
      // exactly what was submitted
      writeForm(configToForm(config));
      const payload = {
        inputs,
        config,
        name: (container.querySelector("#pre-name") as HTMLInputElement).value,
      };
      try {
        const { job_id } = await api.submitJob("preprocess", payload);
        showFieldErrors(form, undefined, `submitted ${job_id}; watch the Jobs view`);
      } catch (err) {
        if (err instanceof RequestFailed) showFieldErrors(form, err.detail.fields, err.detail.error);
        else throw err;
      }
    },
  );

  const fetchDatasets = latestOnly(api.datasets);
  return {
    async refresh() {
      const result = await fetchDatasets();
      if (!result) return;
      const selected = new Set(Array.from(inputsSelect.selectedOptions).map((o) => o.value));
      inputsSelect.innerHTML = result.datasets
        .map(
          (d) => `<option value="${d.dataset_id}" ${selected.has(d.dataset_id) ? "selected" : ""}>
            ${escapeHtml(d.name)} (${d.kind}, ${d.record_count})</option>`,
        )
        .join("");
    },
  };
}

// ---------------------------------------------------------------------------
// Results view
// ---------------------------------------------------------------------------

function renderAnalysis(result: AnalysisResult): string {
  const summary = `<p class="mono">${escapeHtml(JSON.stringify(result.summary))}</p>`;
  if (result.analyzer_id === "sentiment") {
    const s = result.summary as Record<string, number>;
    return (
      summary +
      barChart([
        { label: "positive", value: s.positive ?? 0 },
        { label: "neutral", value: s.neutral ?? 0 },
        { label: "negative", value: s.negative ?? 0 },
      ])
    );
  }
  if (result.analyzer_id === "trend") {
    const series = (result.detail.series as { bucket: string; count: number }[]) ?? [];
    return summary + lineChart(series.map((p) => ({ label: p.bucket, value: p.count })));
  }
  if (result.analyzer_id === "network") {
    const nodes = (result.detail.nodes as {
      id: string; in_degree: number; out_degree: number; weighted_degree: number;
    }[]) ?? [];
    const edges = (result.detail.edges as { src: string; dst: string; weight: number }[]) ?? [];
    const nodeRows = nodes
      .slice(0, 10)
      .map(
        (n) => `<tr><td>${escapeHtml(n.id)}</td><td class="num">${n.in_degree}</td>
          <td class="num">${n.out_degree}</td><td class="num">${n.weighted_degree}</td></tr>`,
      )
      .join("");
    const edgeRows = edges
      .map(
        (e) => `<tr><td>${escapeHtml(e.src)}</td><td>${escapeHtml(e.dst)}</td>
          <td class="num">${e.weight}</td></tr>`,
      )
      .join("");
    return `${summary}
      <h4>Top nodes by weighted degree</h4>
      <table class="list"><thead><tr><th>node</th><th class="num">in</th>
        <th class="num">out</th><th class="num">weighted</th></tr></thead>
        <tbody>${nodeRows}</tbody></table>
      <h4>Edges</h4>
      <table class="list"><thead><tr><th>from</th><th>to</th><th class="num">weight</th>
        </tr></thead><tbody>${edgeRows}</tbody></table>`;
  }
  if (result.analyzer_id === "terms") {
    const terms = (result.detail.terms as { term: string; count: number }[]) ?? [];
    const max = Math.max(...terms.map((t) => t.count), 1);
    return (
      summary +
      `<ul class="terms">` +
      terms
        .map(
          (t) => `<li style="font-size:${(0.8 + (t.count / max) * 1.4).toFixed(2)}em">
            ${escapeHtml(t.term)} <span class="hint">${t.count}</span></li>`,
        )
        .join("") +
      `</ul>`
    );
  }
  return summary + `<pre>${escapeHtml(JSON.stringify(result.detail, null, 2))}</pre>`;
}

export function initResultsView(container: HTMLElement): View & { open(jobId: string): void } {
  container.innerHTML = `<h2>Results</h2>
    <div class="card">
      <h3>Run an analyzer</h3>
      <label>dataset <select id="an-dataset" data-field="dataset_id"></select></label>
      <label>analyzer <select id="an-analyzer" data-field="analyzer"></select></label>
      <label>params (JSON) <input id="an-params" value="{}" data-field="params"></label>
      <button type="button" id="an-submit">Analyze</button>
      <div class="form-message"></div>
    </div>
    <label>completed job <select id="res-job"></select></label>
    <div id="res-body"><p class="empty">Pick a completed job to see its result.</p></div>`;
  const jobSelect = container.querySelector("#res-job") as HTMLSelectElement;
  const resultBox = container.querySelector("#res-body") as HTMLElement;
  const analyzeCard = container.querySelector(".card") as HTMLElement;
  let analyzersLoaded = false;
  let shownJob = "";

  async function showResult(jobId: string): Promise<void> {
    if (!jobId) return;
    shownJob = jobId;
    const result = await api.jobResult(jobId);
    if ("stages" in (result as StageReport)) {
      resultBox.innerHTML = stageReportTableHtml(result as StageReport);
    } else if ("analyzer_id" in (result as AnalysisResult)) {
      resultBox.innerHTML = renderAnalysis(result as AnalysisResult);
    } else {
      resultBox.innerHTML = `<pre>${escapeHtml(JSON.stringify(result, null, 2))}</pre>`;
    }
  }

  jobSelect.addEventListener("change", () => void showResult(jobSelect.value));

  (container.querySelector("#an-submit") as HTMLButtonElement).addEventListener(
    "click",
    async () => {
      clearFormMessage(analyzeCard);
      let params: unknown = {};
      try {
        params = JSON.parse(
          (container.querySelector("#an-params") as HTMLInputElement).value || "{}",
        );
      } catch {
        showFieldErrors(analyzeCard, { params: "not valid JSON" }, "invalid params");
        return;
      }
      const payload = {
        dataset_id: (container.querySelector("#an-dataset") as HTMLSelectElement).value,
        analyzer: (container.querySelector("#an-analyzer") as HTMLSelectElement).value,
        params,
      };
      try {
        const { job_id } = await api.submitJob("analyze", payload);
        showFieldErrors(analyzeCard, undefined, `submitted ${job_id}; watch the Jobs view`);
      } catch (err) {
        if (err instanceof RequestFailed)
          showFieldErrors(analyzeCard, err.detail.fields, err.detail.error);
        else throw err;
      }
    },
  );

  const fetchAll = latestOnly(async () => ({
    jobs: await api.jobs({ status: "completed" }),
    datasets: await api.datasets(),
    analyzers: analyzersLoaded ? null : await api.analyzers(),
  }));

  return {
    async refresh() {
      const result = await fetchAll();
      if (!result) return;
      const previous = jobSelect.value;
      jobSelect.innerHTML =
        `<option value="">(choose)</option>` +
        result.jobs.jobs
          .slice()
          .reverse()
          .map((j) => `<option value="${j.job_id}">${j.job_id} (${j.job_type})</option>`)
          .join("");
      if (previous) jobSelect.value = previous;
      const datasetSelect = container.querySelector("#an-dataset") as HTMLSelectElement;
      const selected = datasetSelect.value;
      datasetSelect.innerHTML = result.datasets.datasets
        .map((d) => `<option value="${d.dataset_id}">${escapeHtml(d.name)} (${d.kind})</option>`)
        .join("");
      if (selected) datasetSelect.value = selected;
      if (result.analyzers) {
        (container.querySelector("#an-analyzer") as HTMLSelectElement).innerHTML =
          result.analyzers.analyzers.map((a) => `<option>${escapeHtml(a)}</option>`).join("");
        analyzersLoaded = true;
      }
    },
    open(jobId: string) {
      jobSelect.value = jobId;
      if (jobId !== shownJob) void showResult(jobId);
    },
  };
}
