/** Composer wiring: debounced draft analysis, profile pickers, suggestion
 * fetching with single-flight cancellation, and suggestion adoption. */

import { ApiClient, ServiceError } from "./api.js";
import { renderHighlights, renderLevels, renderSuggestions } from "./render.js";
import { SingleFlight, debounce, isAbort } from "./schedule.js";
import {
  ComposerState,
  applyAnalysis,
  applySuggestions,
  canAnalyze,
  canSuggest,
  chooseSuggestion,
  editDraft,
  initialState,
  setError,
} from "./state.js";

export interface ComposerApp {
  getState(): ComposerState;
  analyzeNow(): Promise<void>;
  requestSuggestions(): Promise<void>;
  ready: Promise<void>;
}

interface Options {
  debounceMs?: number;
}

function el<T extends HTMLElement>(root: ParentNode, id: string): T {
  const found = root.querySelector(`#${id}`);
  if (!found) {
    throw new Error(`missing element #${id}`);
  }
  return found as T;
}

export function boot(root: Document, client: ApiClient, options: Options = {}): ComposerApp {
  const draftEl = el<HTMLTextAreaElement>(root, "draft");
  const senderEl = el<HTMLSelectElement>(root, "sender-select");
  const receiverEl = el<HTMLSelectElement>(root, "receiver-select");
  const channelEl = el<HTMLSelectElement>(root, "channel-select");
  const methodEl = el<HTMLSelectElement>(root, "method-select");
  const highlightsEl = el<HTMLElement>(root, "highlights");
  const levelsEl = el<HTMLElement>(root, "levels");
  const statusEl = el<HTMLElement>(root, "status");
  const suggestBtn = el<HTMLButtonElement>(root, "suggest-btn");
  const suggestionsEl = el<HTMLElement>(root, "suggestions");
  const bannerEl = el<HTMLElement>(root, "error-banner");

  let state = initialState();
  const analysisFlight = new SingleFlight();
  const suggestFlight = new SingleFlight();

  function choice() {
    return {
      sender: state.sender,
      receiver: state.receiver,
      channel: state.channel,
      method: state.method,
    };
  }

  function render(): void {
    bannerEl.textContent = state.error ?? "";
    bannerEl.hidden = state.error === null;
    statusEl.textContent =
      state.busy !== "idle" ? state.busy : state.stale ? "analysis out of date" : "";
    suggestBtn.disabled = !canSuggest(state);
    if (draftEl.value !== state.draft) {
      draftEl.value = state.draft;
    }
    if (state.analysis && !state.stale) {
      renderHighlights(highlightsEl, state.analysis.message, state.analysis.occurrences);
      renderLevels(levelsEl, state.analysis);
    } else {
      highlightsEl.replaceChildren();
      levelsEl.replaceChildren();
    }
    if (state.suggestionsFor === state.draft && state.suggestions.length > 0) {
      renderSuggestions(suggestionsEl, state.draft, state.suggestions, choose);
    } else {
      suggestionsEl.replaceChildren();
    }
  }

  async function analyzeNow(): Promise<void> {
    if (!canAnalyze(state)) {
      state = { ...state, analysis: null, suggestions: [], suggestionsFor: null };
      render();
      return;
    }
    const draft = state.draft;
    const signal = analysisFlight.start();
    state = { ...state, busy: "analyzing" };
    render();
    try {
      const analysis = await client.analyze(draft, choice(), signal);
      state = applyAnalysis(state, analysis);
    } catch (err) {
      if (isAbort(err)) {
        return;
      }
      const msg = err instanceof ServiceError ? err.message : String(err);
      state = setError(state, msg);
    }
    render();
  }

  async function requestSuggestions(): Promise<void> {
    if (!canSuggest(state)) {
      return;
    }
    const draft = state.draft;
    const signal = suggestFlight.start();
    state = { ...state, busy: "suggesting" };
    render();
    try {
      const resp = await client.paraphrase(draft, choice(), 3, signal);
      state = applySuggestions(state, draft, resp.alternatives, resp.no_intervention_gap);
    } catch (err) {
      if (isAbort(err)) {
        return;
      }
      const msg = err instanceof ServiceError ? err.message : String(err);
      state = setError(state, msg);
    }
    render();
  }

  const debouncedAnalyze = debounce(() => void analyzeNow(), options.debounceMs ?? 400);

  function choose(index: number): void {
    state = chooseSuggestion(state, index);
    state = { ...state, suggestions: [], suggestionsFor: null };
    render();
    void analyzeNow();
  }

  draftEl.addEventListener("input", () => {
    state = editDraft(state, draftEl.value);
    render();
    debouncedAnalyze();
  });

  for (const [select, key] of [
    [senderEl, "sender"],
    [receiverEl, "receiver"],
    [channelEl, "channel"],
  ] as const) {
    select.addEventListener("change", () => {
      state = { ...state, [key]: select.value, stale: state.analysis !== null };
      render();
      void analyzeNow();
    });
  }

  methodEl.addEventListener("change", () => {
    state = { ...state, method: methodEl.value };
    render();
    if (state.suggestionsFor === state.draft && state.suggestions.length > 0) {
      void requestSuggestions(); // method toggles re-rank the list
    }
  });

  suggestBtn.addEventListener("click", () => void requestSuggestions());

  const ready = (async () => {
    try {
      const profiles = await client.profiles();
      const fill = (select: HTMLSelectElement, values: string[]) => {
        select.replaceChildren();
        for (const value of values) {
          const option = root.createElement("option");
          option.value = value;
          option.textContent = value;
          select.append(option);
        }
      };
      fill(senderEl, profiles.models);
      fill(receiverEl, profiles.models);
      fill(channelEl, profiles.channels);
      state = {
        ...state,
        sender: profiles.models[0] ?? "",
        receiver: profiles.models[0] ?? "",
        channel: profiles.channels[0] ?? "",
      };
    } catch (err) {
      state = setError(state, err instanceof Error ? err.message : String(err));
    }
    render();
  })();

  render();
  return {
    getState: () => state,
    analyzeNow,
    requestSuggestions,
    ready,
  };
}

declare global {
  interface Window {
    composer?: ComposerApp;
  }
}

if (typeof document !== "undefined" && document.getElementById("draft")) {
  window.composer = boot(document, new ApiClient(""));
}
