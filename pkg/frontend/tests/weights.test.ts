import { describe, expect, it } from "vitest";

import { allZero, formatPercent, normalizeForDisplay } from "../src/weights.js";

describe("display normalization", () => {
  it("normalizes to fractions summing to one", () => {
    const normalized = normalizeForDisplay({ cit: 2, hif: 2 });
    expect(normalized).toEqual({ cit: 0.5, hif: 0.5 });
  });

  it("doubling every weight leaves the display unchanged", () => {
    const base = { cit: 0.8, hif: 0.1, intl: 0.1 };
    const doubled = { cit: 1.6, hif: 0.2, intl: 0.2 };
    expect(normalizeForDisplay(doubled)).toEqual(normalizeForDisplay(base));
  });

  it("all-zero maps to zeros, not NaN", () => {
    expect(normalizeForDisplay({ cit: 0, hif: 0 })).toEqual({ cit: 0, hif: 0 });
  });
});

describe("allZero", () => {
  it("detects the unsavable state", () => {
    expect(allZero({ cit: 0, hif: 0 })).toBe(true);
    expect(allZero({ cit: 0, hif: 0.01 })).toBe(false);
  });
});

describe("formatPercent", () => {
  it("renders one decimal", () => {
    expect(formatPercent(0.8)).toBe("80.0%");
  });
});
