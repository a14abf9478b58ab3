import {
  ApiError,
  ModelId,
  PredictionResponse,
  SuggestResponse,
  Transport,
} from "./types.js";

async function parse<T>(response: Response): Promise<T> {
  const body = await response.json().catch(() => null);
  if (!response.ok) {
    const detail =
      body && typeof body === "object" && "detail" in body
        ? (body as { detail: unknown }).detail
        : body;
    throw new ApiError(response.status, detail);
  }
  return body as T;
}

/** fetch-backed Transport speaking the /api/v1 contract. */
export class HttpTransport implements Transport {
  constructor(private readonly baseUrl: string = "") {}

  async symptoms(): Promise<string[]> {
    const body = await parse<{ symptoms: string[] }>(
      await fetch(`${this.baseUrl}/api/v1/symptoms`),
    );
    return body.symptoms;
  }

  async diseases(): Promise<string[]> {
    const body = await parse<{ diseases: string[] }>(
      await fetch(`${this.baseUrl}/api/v1/diseases`),
    );
    return body.diseases;
  }

  async predict(
    symptoms: string[],
    model: ModelId,
  ): Promise<PredictionResponse> {
    return parse<PredictionResponse>(
      await fetch(`${this.baseUrl}/api/v1/predict`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ symptoms, model }),
      }),
    );
  }

  async suggest(
    symptoms: string[],
    model: ModelId,
    limit: number,
  ): Promise<SuggestResponse> {
    return parse<SuggestResponse>(
      await fetch(`${this.baseUrl}/api/v1/suggest`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ symptoms, model, limit }),
      }),
    );
  }
}
