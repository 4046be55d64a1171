// Session state for one browser tab. Working (unsaved) weight edits live
// only here: read paths that reference a stored value system always use the
// id, and the working copy travels exclusively through the explicit
// ephemeral-weights parameter until the user saves it as a new immutable
// value system.

export interface UiSession {
  baseUrl: string;
  token?: string;
  selectedValueSystem?: string;
  workingWeights: Record<string, number>;
  readOnly: boolean;
}

export function createSession(baseUrl: string, token?: string): UiSession {
  return {
    baseUrl,
    token,
    workingWeights: {},
    readOnly: false,
  };
}

export function setWorkingWeight(
  session: UiSession,
  indicator: string,
  value: number,
): void {
  session.workingWeights[indicator] = Math.max(0, value);
}

export function discardWorkingEdits(session: UiSession): void {
  session.workingWeights = {};
}
