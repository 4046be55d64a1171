// Display-side weight helpers. This is the only arithmetic the UI performs:
// normalizing weights for display mirrors what the server does at scoring
// time, it never replaces a server-computed number.

export function allZero(weights: Record<string, number>): boolean {
  return Object.values(weights).every((value) => value <= 0);
}

export function normalizeForDisplay(
  weights: Record<string, number>,
): Record<string, number> {
  const total = Object.values(weights).reduce((sum, value) => sum + value, 0);
  const normalized: Record<string, number> = {};
  for (const key of Object.keys(weights).sort()) {
    normalized[key] = total > 0 ? (weights[key] ?? 0) / total : 0;
  }
  return normalized;
}

export function formatPercent(fraction: number): string {
  return `${(fraction * 100).toFixed(1)}%`;
}
