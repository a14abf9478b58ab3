export type ModelId = "lssvm" | "cnn";

export interface RankedDisease {
  disease: string;
  confidence: number;
}

export interface SimilarDisease {
  disease: string;
  similarity: number;
}

export interface PredictionResponse {
  model: ModelId;
  feature_mode: string;
  ranking: RankedDisease[];
  similar: SimilarDisease[];
}

export interface Suggestion {
  symptom: string;
  expected_entropy_reduction: number;
}

export interface SuggestResponse {
  model: ModelId;
  suggestions: Suggestion[];
}

/** Server error carrying the HTTP status and the body's detail verbatim. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: unknown,
  ) {
    super(typeof detail === "string" ? detail : JSON.stringify(detail));
    this.name = "ApiError";
  }
}

/** The service surface the session needs; mocked in tests. */
export interface Transport {
  symptoms(): Promise<string[]>;
  diseases(): Promise<string[]>;
  predict(symptoms: string[], model: ModelId): Promise<PredictionResponse>;
  suggest(
    symptoms: string[],
    model: ModelId,
    limit: number,
  ): Promise<SuggestResponse>;
}
