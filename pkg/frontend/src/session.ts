import {
  ApiError,
  ModelId,
  PredictionResponse,
  RankedDisease,
  SimilarDisease,
  Suggestion,
  Transport,
} from "./types.js";

export interface SessionView {
  asserted: string[]; // ordered as entered, duplicate-free
  ranking: RankedDisease[];
  similar: SimilarDisease[];
  suggestions: Suggestion[];
  model: ModelId;
  featureMode: string | null;
  error: string | null; // server 422 detail, verbatim
  retry: boolean; // network failure; last request can be retried
}

export interface WhatIfRow {
  disease: string;
  current: number | null;
  withCandidate: number | null;
  delta: number | null;
}

export interface WhatIfComparison {
  candidate: string;
  rows: WhatIfRow[];
}

const SUGGEST_LIMIT = 5;
const TOP_N = 5;

function detailText(error: ApiError): string {
  return typeof error.detail === "string"
    ? error.detail
    : JSON.stringify(error.detail);
}

/**
 * Session state machine. Overlapping refreshes are resolved by a
 * monotonically increasing sequence number: only the response belonging to
 * the most recently issued request is ever applied.
 */
export class TriageSession {
  private issued = 0;
  private state: SessionView;
  private listeners: Array<(view: SessionView) => void> = [];

  constructor(
    private readonly transport: Transport,
    readonly vocabulary: string[],
    model: ModelId = "lssvm",
  ) {
    this.state = {
      asserted: [],
      ranking: [],
      similar: [],
      suggestions: [],
      model,
      featureMode: null,
      error: null,
      retry: false,
    };
  }

  get view(): SessionView {
    return {
      ...this.state,
      asserted: [...this.state.asserted],
      ranking: [...this.state.ranking],
      similar: [...this.state.similar],
      suggestions: [...this.state.suggestions],
    };
  }

  onChange(listener: (view: SessionView) => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    const snapshot = this.view;
    for (const listener of this.listeners) listener(snapshot);
  }

  async setModel(model: ModelId): Promise<void> {
    this.state.model = model;
    if (this.state.asserted.length) {
      await this.refresh();
    } else {
      this.emit();
    }
  }

  /** Add or remove a symptom and refresh the panels from the server. */
  async toggle(name: string): Promise<void> {
    if (!this.vocabulary.includes(name)) {
      throw new Error(`symptom ${name} is not in the vocabulary`);
    }
    const has = this.state.asserted.includes(name);
    this.state.asserted = has
      ? this.state.asserted.filter((s) => s !== name)
      : [...this.state.asserted, name];
    if (this.state.asserted.length === 0) {
      // no server call for the empty set; just clear the panels
      this.issued += 1; // anything in flight is now stale
      this.state.ranking = [];
      this.state.similar = [];
      this.state.suggestions = [];
      this.state.error = null;
      this.state.retry = false;
      this.emit();
      return;
    }
    await this.refresh();
  }

  async refresh(): Promise<void> {
    const seq = ++this.issued;
    const symptoms = [...this.state.asserted];
    const model = this.state.model;
    try {
      const [prediction, suggestions] = await Promise.all([
        this.transport.predict(symptoms, model),
        this.transport.suggest(symptoms, model, SUGGEST_LIMIT),
      ]);
      if (seq !== this.issued) return; // stale: a later request was issued
      this.state.ranking = prediction.ranking;
      this.state.similar = prediction.similar;
      this.state.featureMode = prediction.feature_mode;
      this.state.suggestions = suggestions.suggestions;
      this.state.error = null;
      this.state.retry = false;
    } catch (error) {
      if (seq !== this.issued) return;
      if (error instanceof ApiError) {
        this.state.error = detailText(error);
        this.state.retry = false;
      } else {
        this.state.error = null;
        this.state.retry = true; // network trouble; offer a retry
      }
    }
    this.emit();
  }

  /**
   * Top-5 now vs top-5 with the candidate added; pure comparison, the
   * session itself is left untouched. Row order follows the server's
   * ranking of the with-candidate prediction, then any current-only rows
   * in their server order.
   */
  async whatifCompare(candidate: string): Promise<WhatIfComparison> {
    if (this.state.asserted.includes(candidate)) {
      throw new Error(`symptom ${candidate} is already asserted`);
    }
    const current = new Map(
      this.state.ranking.slice(0, TOP_N).map((r) => [r.disease, r.confidence]),
    );
    const prediction: PredictionResponse = await this.transport.predict(
      [...this.state.asserted, candidate],
      this.state.model,
    );
    const rows: WhatIfRow[] = [];
    for (const entry of prediction.ranking.slice(0, TOP_N)) {
      const was = current.get(entry.disease);
      rows.push({
        disease: entry.disease,
        current: was ?? null,
        withCandidate: entry.confidence,
        delta: was === undefined ? null : entry.confidence - was,
      });
    }
    const shown = new Set(rows.map((r) => r.disease));
    for (const entry of this.state.ranking.slice(0, TOP_N)) {
      if (!shown.has(entry.disease)) {
        const now = prediction.ranking.find(
          (r) => r.disease === entry.disease,
        );
        rows.push({
          disease: entry.disease,
          current: entry.confidence,
          withCandidate: now ? now.confidence : null,
          delta: now ? now.confidence - entry.confidence : null,
        });
      }
    }
    return { candidate, rows };
  }
}
