import { describe, expect, it } from "vitest";

import { TriageSession } from "../src/session.js";
import {
  ApiError,
  ModelId,
  PredictionResponse,
  SuggestResponse,
  Transport,
} from "../src/types.js";

const VOCAB = ["cough", "fever", "itching", "rash"];

function prediction(ranking: Array<[string, number]>): PredictionResponse {
  return {
    model: "lssvm",
    feature_mode: "all",
    ranking: ranking.map(([disease, confidence]) => ({ disease, confidence })),
    similar: [],
  };
}

function suggestions(names: string[]): SuggestResponse {
  return {
    model: "lssvm",
    suggestions: names.map((symptom, i) => ({
      symptom,
      expected_entropy_reduction: 1 - i * 0.1,
    })),
  };
}

class Deferred<T> {
  promise: Promise<T>;
  resolve!: (value: T) => void;
  reject!: (reason: unknown) => void;

  constructor() {
    this.promise = new Promise((resolve, reject) => {
      this.resolve = resolve;
      this.reject = reject;
    });
  }
}

/** Scriptable transport: records calls, answers via handlers or deferreds. */
class MockTransport implements Transport {
  predictCalls: string[][] = [];
  suggestCalls: string[][] = [];
  predictQueue: Array<Deferred<PredictionResponse>> = [];
  onPredict: ((symptoms: string[]) => PredictionResponse) | null = null;
  onSuggest: ((symptoms: string[]) => SuggestResponse) | null = (s) =>
    suggestions([]);

  async symptoms(): Promise<string[]> {
    return VOCAB;
  }

  async diseases(): Promise<string[]> {
    return ["flu", "cold"];
  }

  predict(symptoms: string[], _model: ModelId): Promise<PredictionResponse> {
    this.predictCalls.push([...symptoms]);
    if (this.onPredict) return Promise.resolve(this.onPredict(symptoms));
    const deferred = new Deferred<PredictionResponse>();
    this.predictQueue.push(deferred);
    return deferred.promise;
  }

  suggest(
    symptoms: string[],
    _model: ModelId,
    _limit: number,
  ): Promise<SuggestResponse> {
    this.suggestCalls.push([...symptoms]);
    if (this.onSuggest) return Promise.resolve(this.onSuggest(symptoms));
    return Promise.resolve(suggestions([]));
  }
}

describe("sequence-number discipline", () => {
  it("discards a stale response that resolves after a newer one", async () => {
    const transport = new MockTransport();
    const session = new TriageSession(transport, VOCAB);

    const first = session.toggle("cough"); // request 1 stays in flight
    const second = session.toggle("fever"); // request 2 issued after

    expect(transport.predictQueue.length).toBe(2);
    // resolve the NEWER request first
    transport.predictQueue[1].resolve(prediction([["flu", 0.9], ["cold", 0.1]]));
    await second;
    expect(session.view.ranking[0].disease).toBe("flu");

    // now the older response arrives; it must be ignored
    transport.predictQueue[0].resolve(prediction([["cold", 0.8], ["flu", 0.2]]));
    await first;
    expect(session.view.ranking[0].disease).toBe("flu");
    expect(session.view.ranking[0].confidence).toBe(0.9);
  });

  it("ignores in-flight responses after the set empties", async () => {
    const transport = new MockTransport();
    const session = new TriageSession(transport, VOCAB);
    const inflight = session.toggle("cough");
    await session.toggle("cough"); // back to empty: clears immediately
    expect(session.view.ranking).toEqual([]);
    transport.predictQueue[0].resolve(prediction([["flu", 1.0]]));
    await inflight;
    expect(session.view.ranking).toEqual([]);
  });
});

describe("toggle", () => {
  it("is an involution on the asserted set", async () => {
    const transport = new MockTransport();
    transport.onPredict = () => prediction([["flu", 0.7]]);
    const session = new TriageSession(transport, VOCAB);
    await session.toggle("cough");
    await session.toggle("fever");
    const before = session.view.asserted;
    await session.toggle("itching");
    await session.toggle("itching");
    expect(session.view.asserted).toEqual(before);
  });

  it("keeps entry order and forbids duplicates", async () => {
    const transport = new MockTransport();
    transport.onPredict = () => prediction([["flu", 0.7]]);
    const session = new TriageSession(transport, VOCAB);
    await session.toggle("fever");
    await session.toggle("cough");
    expect(session.view.asserted).toEqual(["fever", "cough"]);
  });

  it("issues no server call for the empty set", async () => {
    const transport = new MockTransport();
    transport.onPredict = () => prediction([["flu", 0.7]]);
    const session = new TriageSession(transport, VOCAB);
    await session.toggle("cough");
    expect(transport.predictCalls.length).toBe(1);
    await session.toggle("cough"); // empties the set
    expect(transport.predictCalls.length).toBe(1);
    expect(session.view.ranking).toEqual([]);
    expect(session.view.suggestions).toEqual([]);
  });

  it("rejects names outside the vocabulary", async () => {
    const session = new TriageSession(new MockTransport(), VOCAB);
    await expect(session.toggle("xyzzy")).rejects.toThrow("vocabulary");
  });
});

describe("error rendering", () => {
  it("stores the 422 detail verbatim", async () => {
    const transport = new MockTransport();
    const detail = { unknown_symptoms: ["xyzzy"] };
    transport.onPredict = () => {
      throw new ApiError(422, detail);
    };
    const session = new TriageSession(transport, VOCAB);
    await session.toggle("cough");
    expect(session.view.error).toBe(JSON.stringify(detail));
    expect(session.view.retry).toBe(false);
  });

  it("marks network failures as retryable", async () => {
    const transport = new MockTransport();
    transport.onPredict = () => {
      throw new TypeError("fetch failed");
    };
    const session = new TriageSession(transport, VOCAB);
    await session.toggle("cough");
    expect(session.view.retry).toBe(true);
    expect(session.view.error).toBeNull();
  });
});

describe("whatifCompare", () => {
  it("does not mutate the session and follows server ordering", async () => {
    const transport = new MockTransport();
    transport.onPredict = (symptoms) =>
      symptoms.includes("rash")
        ? prediction([["measles", 0.8], ["flu", 0.15], ["cold", 0.05]])
        : prediction([["flu", 0.6], ["cold", 0.4]]);
    const session = new TriageSession(transport, VOCAB);
    await session.toggle("cough");
    const before = session.view;

    const comparison = await session.whatifCompare("rash");
    expect(comparison.rows.map((r) => r.disease)).toEqual([
      "measles",
      "flu",
      "cold",
    ]);
    expect(comparison.rows[1].delta).toBeCloseTo(0.15 - 0.6, 12);
    const after = session.view;
    expect(after.asserted).toEqual(before.asserted);
    expect(after.ranking).toEqual(before.ranking);
  });

  it("near-zero deltas for an uninformative candidate", async () => {
    const transport = new MockTransport();
    transport.onPredict = () => prediction([["flu", 0.6], ["cold", 0.4]]);
    const session = new TriageSession(transport, VOCAB);
    await session.toggle("cough");
    const comparison = await session.whatifCompare("itching");
    for (const row of comparison.rows) {
      expect(Math.abs(row.delta ?? 0)).toBeLessThan(1e-12);
    }
  });

  it("refuses an already-asserted candidate", async () => {
    const transport = new MockTransport();
    transport.onPredict = () => prediction([["flu", 1.0]]);
    const session = new TriageSession(transport, VOCAB);
    await session.toggle("cough");
    await expect(session.whatifCompare("cough")).rejects.toThrow("asserted");
  });
});
