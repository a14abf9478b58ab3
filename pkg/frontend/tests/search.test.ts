import { describe, expect, it } from "vitest";

import { filterSymptoms } from "../src/search.js";

// a vocabulary at the real dataset's scale
const VOCAB = Array.from({ length: 135 }, (_, i) =>
  i % 3 === 0
    ? `symptom_${i.toString().padStart(3, "0")}`
    : i % 3 === 1
      ? `skin_sign_${i.toString().padStart(3, "0")}`
      : `ache_${i.toString().padStart(3, "0")}`,
);

describe("filterSymptoms", () => {
  it("lists the whole vocabulary for an empty query", () => {
    expect(filterSymptoms(VOCAB, "")).toEqual(VOCAB);
    expect(filterSymptoms(VOCAB, "   ")).toEqual(VOCAB);
  });

  it("reaches every entry by typing its own name", () => {
    for (const name of VOCAB) {
      expect(filterSymptoms(VOCAB, name)).toContain(name);
    }
  });

  it("matches case-insensitive substrings", () => {
    const hits = filterSymptoms(VOCAB, "SKIN_SIGN");
    expect(hits.length).toBeGreaterThan(0);
    expect(hits.every((h) => h.startsWith("skin_sign"))).toBe(true);
  });

  it("returns nothing for a non-matching query", () => {
    expect(filterSymptoms(VOCAB, "zz-not-there")).toEqual([]);
  });
});
