/** Composer state and its pure transitions.
 *
 * The UI layer renders this state verbatim: suggestion text and gaps are
 * never recomputed or mutated client-side, and the suggestion list keeps the
 * ascending-by-gap order the service returned (verified on arrival).
 */

import type { Alternative, Analysis } from "./api.js";

export interface ComposerState {
  draft: string;
  sender: string;
  receiver: string;
  channel: string;
  method: string;
  analysis: Analysis | null;
  /** analysis no longer matches the draft (user typed since) */
  stale: boolean;
  suggestions: Alternative[];
  suggestionsFor: string | null; // draft the suggestions belong to
  noInterventionGap: number | null;
  chosen: number | null;
  error: string | null;
  busy: "idle" | "analyzing" | "suggesting";
}

export function initialState(): ComposerState {
  return {
    draft: "",
    sender: "",
    receiver: "",
    channel: "",
    method: "ilp",
    analysis: null,
    stale: false,
    suggestions: [],
    suggestionsFor: null,
    noInterventionGap: null,
    chosen: null,
    error: null,
    busy: "idle",
  };
}

export function editDraft(state: ComposerState, draft: string): ComposerState {
  return {
    ...state,
    draft,
    stale: state.analysis !== null && state.analysis.message !== draft,
    chosen: null,
  };
}

export function applyAnalysis(state: ComposerState, analysis: Analysis): ComposerState {
  if (analysis.message !== state.draft) {
    return state; // superseded by further typing
  }
  return { ...state, analysis, stale: false, error: null, busy: "idle" };
}

export function applySuggestions(
  state: ComposerState,
  draft: string,
  alternatives: Alternative[],
  noInterventionGap: number,
): ComposerState {
  if (draft !== state.draft) {
    return state;
  }
  const sorted = [...alternatives].every((alt, i, arr) => i === 0 || arr[i - 1].gap <= alt.gap);
  if (!sorted) {
    throw new Error("service returned suggestions out of gap order");
  }
  return {
    ...state,
    suggestions: alternatives,
    suggestionsFor: draft,
    noInterventionGap,
    chosen: null,
    error: null,
    busy: "idle",
  };
}

/** Selecting a suggestion copies its text into the draft for refinement. */
export function chooseSuggestion(state: ComposerState, index: number): ComposerState {
  const alt = state.suggestions[index];
  if (!alt) {
    return state;
  }
  return {
    ...state,
    draft: alt.text,
    chosen: index,
    stale: true, // the new draft has not been analyzed yet
  };
}

export function setError(state: ComposerState, message: string): ComposerState {
  return { ...state, error: message, busy: "idle" };
}

export function canAnalyze(state: ComposerState): boolean {
  return state.draft.trim().length > 0 && !!state.sender && !!state.receiver && !!state.channel;
}

export function canSuggest(state: ComposerState): boolean {
  return canAnalyze(state) && state.analysis !== null && !state.stale;
}
