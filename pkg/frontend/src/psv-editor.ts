// Weight editor: one slider + number input per indicator, live normalized
// display, save posts a new immutable value system through the gateway.

import type { GatewayError, IndicatorDoc } from "./api.js";
import { allZero, formatPercent, normalizeForDisplay } from "./weights.js";

export interface PsvEditorOptions {
  indicators: IndicatorDoc[];
  initial?: Record<string, number>;
  onChange?: (weights: Record<string, number>) => void;
  onSave: (weights: Record<string, number>) => Promise<void>;
}

export interface PsvEditor {
  element: HTMLElement;
  weights(): Record<string, number>;
  setWeight(indicator: string, value: number): void;
  saveDisabled(): boolean;
  hint(): string;
  save(): Promise<void>;
}

export function createPsvEditor(options: PsvEditorOptions): PsvEditor {
  const weights: Record<string, number> = {};
  for (const indicator of options.indicators) {
    weights[indicator.id] = options.initial?.[indicator.id] ?? 0;
  }

  const element = document.createElement("div");
  element.className = "psv-editor";
  const rows = new Map<
    string,
    { slider: HTMLInputElement; number: HTMLInputElement; normalized: HTMLElement }
  >();

  const hint = document.createElement("p");
  hint.className = "psv-hint";
  const saveButton = document.createElement("button");
  saveButton.textContent = "Save as new value system";

  function refresh(): void {
    const normalized = normalizeForDisplay(weights);
    for (const [id, row] of rows) {
      row.normalized.textContent = formatPercent(normalized[id] ?? 0);
    }
    const zero = allZero(weights);
    saveButton.disabled = zero;
    hint.textContent = zero
      ? "AllZeroWeights: raise at least one weight above zero to save"
      : "";
    options.onChange?.({ ...weights });
  }

  function setWeight(indicator: string, value: number): void {
    if (!(indicator in weights)) return;
    weights[indicator] = Math.max(0, value);
    const row = rows.get(indicator);
    if (row) {
      row.slider.value = String(weights[indicator]);
      row.number.value = String(weights[indicator]);
    }
    refresh();
  }

  for (const indicator of options.indicators) {
    const row = document.createElement("label");
    row.className = "psv-row";
    const name = document.createElement("span");
    name.textContent = indicator.label || indicator.id;
    const slider = document.createElement("input");
    slider.type = "range";
    slider.min = "0";
    slider.max = "10";
    slider.step = "0.05";
    slider.value = String(weights[indicator.id]);
    const number = document.createElement("input");
    number.type = "number";
    number.min = "0";
    number.step = "0.05";
    number.value = String(weights[indicator.id]);
    const normalized = document.createElement("span");
    normalized.className = "psv-normalized";
    slider.addEventListener("input", () => setWeight(indicator.id, Number(slider.value)));
    number.addEventListener("input", () => setWeight(indicator.id, Number(number.value)));
    row.append(name, slider, number, normalized);
    element.append(row);
    rows.set(indicator.id, { slider, number, normalized });
  }
  element.append(saveButton, hint);

  async function save(): Promise<void> {
    if (saveButton.disabled) return;
    try {
      await options.onSave({ ...weights });
      hint.textContent = "saved";
    } catch (error) {
      const gatewayError = error as GatewayError;
      hint.textContent = gatewayError.code
        ? `${gatewayError.code}: ${gatewayError.message}`
        : String(error);
    }
  }

  saveButton.addEventListener("click", () => void save());
  refresh();

  return {
    element,
    weights: () => ({ ...weights }),
    setWeight,
    saveDisabled: () => saveButton.disabled,
    hint: () => hint.textContent ?? "",
    save,
  };
}
