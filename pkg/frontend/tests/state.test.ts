import { describe, expect, it } from "vitest";

import type { Alternative, Analysis } from "../src/api.js";
import {
  applyAnalysis,
  applySuggestions,
  canAnalyze,
  canSuggest,
  chooseSuggestion,
  editDraft,
  initialState,
} from "../src/state.js";

const analysis: Analysis = {
  message: "could you check ?",
  strategies: ["Subjunctive"],
  occurrences: [
    { strategy: "Subjunctive", start_token: 0, end_token: 2, start_char: 0, end_char: 9, text: "could you" },
  ],
  intended: 0.454,
  receiverLevel: 0.0,
  noInterventionGap: 0.454,
};

function alt(text: string, gap: number): Alternative {
  return { text, strategies: [], predicted: 0, gap, shortfall: false, trace: [] };
}

function readyState() {
  let s = initialState();
  s = { ...s, sender: "average", receiver: "average", channel: "mt-lossy" };
  s = editDraft(s, "could you check ?");
  s = applyAnalysis(s, analysis);
  return s;
}

describe("composer state", () => {
  it("requires draft and profiles before analyzing", () => {
    let s = initialState();
    expect(canAnalyze(s)).toBe(false);
    s = { ...s, sender: "a", receiver: "a", channel: "c" };
    expect(canAnalyze(s)).toBe(false);
    s = editDraft(s, "hello");
    expect(canAnalyze(s)).toBe(true);
  });

  it("typing after analysis marks it stale", () => {
    let s = readyState();
    expect(s.stale).toBe(false);
    expect(canSuggest(s)).toBe(true);
    s = editDraft(s, "could you check ? now");
    expect(s.stale).toBe(true);
    expect(canSuggest(s)).toBe(false);
  });

  it("ignores analysis for a superseded draft", () => {
    let s = readyState();
    s = editDraft(s, "something else entirely");
    const next = applyAnalysis(s, analysis);
    expect(next).toBe(s);
  });

  it("accepts service suggestion order and rejects unsorted lists", () => {
    const s = readyState();
    const sorted = applySuggestions(s, s.draft, [alt("a", 0.1), alt("b", 0.2)], 0.454);
    expect(sorted.suggestions.map((a) => a.gap)).toEqual([0.1, 0.2]);
    expect(sorted.noInterventionGap).toBe(0.454);
    expect(() => applySuggestions(s, s.draft, [alt("a", 0.3), alt("b", 0.2)], 0.454)).toThrow(
      /out of gap order/,
    );
  });

  it("does not mutate suggestion content", () => {
    const s = readyState();
    const alternatives = [alt("can you check ?", 0.001)];
    const next = applySuggestions(s, s.draft, alternatives, 0.454);
    expect(next.suggestions[0]).toBe(alternatives[0]);
  });

  it("choosing a suggestion copies its text into the draft", () => {
    let s = readyState();
    s = applySuggestions(s, s.draft, [alt("can you check ?", 0.001), alt("x", 0.2)], 0.454);
    s = chooseSuggestion(s, 0);
    expect(s.draft).toBe("can you check ?");
    expect(s.chosen).toBe(0);
    expect(s.stale).toBe(true); // next analysis pass still pending
  });

  it("ignores out-of-range selection", () => {
    const s = readyState();
    expect(chooseSuggestion(s, 5)).toBe(s);
  });
});
