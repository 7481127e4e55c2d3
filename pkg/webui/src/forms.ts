// Filter-form model and its two-way mapping to the pipeline config JSON.
// formToConfig and configToForm are exact inverses on canonical form state,
// so what the user sees after a round trip is precisely what was submitted.

export interface DedupForm {
  enabled: boolean;
  mode: "exact" | "near";
  nearThreshold: number;
}

export interface DateForm {
  enabled: boolean;
  start: string; // RFC 3339
  end: string;
  missingPolicy: "drop" | "keep";
}

export interface LanguageForm {
  enabled: boolean;
  targets: string; // comma-separated codes, canonical "id,en"
  unknownPolicy: "drop" | "keep";
  margin: number;
}

export interface KeywordForm {
  enabled: boolean;
  include: string; // comma-separated terms
  exclude: string;
  match: "substring" | "whole_word";
}

export interface RelevancyForm {
  enabled: boolean;
  context: string;
  classifier: "baseline" | "remote";
  threshold: number;
  endpoint: string;
}

export interface PipelineForm {
  dedup: DedupForm;
  date: DateForm;
  language: LanguageForm;
  keyword: KeywordForm;
  relevancy: RelevancyForm;
}

export type PipelineConfig = Record<string, unknown>;

export function defaultForm(): PipelineForm {
  return {
    dedup: { enabled: false, mode: "exact", nearThreshold: 3 },
    date: {
      enabled: false,
      start: "2022-09-01T00:00:00Z",
      end: "2022-09-30T23:59:59Z",
      missingPolicy: "drop",
    },
    language: { enabled: false, targets: "id", unknownPolicy: "drop", margin: 0.05 },
    keyword: { enabled: false, include: "", exclude: "", match: "substring" },
    relevancy: {
      enabled: false,
      context: "",
      classifier: "baseline",
      threshold: 0.1,
      endpoint: "",
    },
  };
}

export function splitTerms(raw: string): string[] {
  return raw
    .split(",")
    .map((term) => term.trim())
    .filter((term) => term.length > 0);
}

export function formToConfig(form: PipelineForm): PipelineConfig {
  const config: PipelineConfig = {};
  if (form.dedup.enabled) {
    config.dedup = { mode: form.dedup.mode, near_threshold: form.dedup.nearThreshold };
  }
  if (form.date.enabled) {
    config.date = {
      start: form.date.start,
      end: form.date.end,
      missing_timestamp_policy: form.date.missingPolicy,
    };
  }
  if (form.language.enabled) {
    config.language = {
      targets: splitTerms(form.language.targets),
      unknown_policy: form.language.unknownPolicy,
      margin: form.language.margin,
    };
  }
  if (form.keyword.enabled) {
    config.keyword = {
      include: splitTerms(form.keyword.include),
      exclude: splitTerms(form.keyword.exclude),
      match: form.keyword.match,
    };
  }
  if (form.relevancy.enabled) {
    config.relevancy = {
      context: form.relevancy.context,
      classifier: form.relevancy.classifier,
      threshold: form.relevancy.threshold,
      endpoint: form.relevancy.classifier === "remote" ? form.relevancy.endpoint : null,
    };
  }
  return config;
}

export function configToForm(config: PipelineConfig): PipelineForm {
  const form = defaultForm();
  const dedup = config.dedup as { mode?: string; near_threshold?: number } | undefined;
  if (dedup) {
    form.dedup = {
      enabled: true,
      mode: (dedup.mode as "exact" | "near") ?? "exact",
      nearThreshold: dedup.near_threshold ?? 3,
    };
  }
  const date = config.date as
    | { start?: string; end?: string; missing_timestamp_policy?: string }
    | undefined;
  if (date) {
    form.date = {
      enabled: true,
      start: date.start ?? "",
      end: date.end ?? "",
      missingPolicy: (date.missing_timestamp_policy as "drop" | "keep") ?? "drop",
    };
  }
  const language = config.language as
    | { targets?: string[]; unknown_policy?: string; margin?: number }
    | undefined;
  if (language) {
    form.language = {
      enabled: true,
      targets: (language.targets ?? []).join(","),
      unknownPolicy: (language.unknown_policy as "drop" | "keep") ?? "drop",
      margin: language.margin ?? 0.05,
    };
  }
  const keyword = config.keyword as
    | { include?: string[]; exclude?: string[]; match?: string }
    | undefined;
  if (keyword) {
    form.keyword = {
      enabled: true,
      include: (keyword.include ?? []).join(","),
      exclude: (keyword.exclude ?? []).join(","),
      match: (keyword.match as "substring" | "whole_word") ?? "substring",
    };
  }
  const relevancy = config.relevancy as
    | { context?: string; classifier?: string; threshold?: number; endpoint?: string | null }
    | undefined;
  if (relevancy) {
    form.relevancy = {
      enabled: true,
      context: relevancy.context ?? "",
      classifier: (relevancy.classifier as "baseline" | "remote") ?? "baseline",
      threshold: relevancy.threshold ?? 0.1,
      endpoint: relevancy.endpoint ?? "",
    };
  }
  return form;
}
