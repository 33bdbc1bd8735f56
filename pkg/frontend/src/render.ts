/** DOM rendering helpers; all content is built via createElement/textContent
 * so service-provided text is never interpreted as HTML. */

import type { Alternative, Analysis, Occurrence } from "./api.js";
import { tokenDiff } from "./diff.js";

export function renderHighlights(container: HTMLElement, message: string, occurrences: Occurrence[]): void {
  container.replaceChildren();
  let cursor = 0;
  const ordered = [...occurrences].sort((a, b) => a.start_char - b.start_char);
  for (const occ of ordered) {
    if (occ.start_char > cursor) {
      container.append(document.createTextNode(message.slice(cursor, occ.start_char)));
    }
    const mark = document.createElement("mark");
    mark.className = "marker";
    mark.dataset.strategy = occ.strategy;
    mark.title = occ.strategy;
    mark.textContent = message.slice(occ.start_char, occ.end_char);
    container.append(mark);
    cursor = occ.end_char;
  }
  if (cursor < message.length) {
    container.append(document.createTextNode(message.slice(cursor)));
  }
}

const fmt = (x: number) => x.toFixed(3);

export function renderLevels(container: HTMLElement, analysis: Analysis): void {
  container.replaceChildren();
  const rows: Array<[string, string]> = [
    ["intended", fmt(analysis.intended)],
    ["receiver sees (no intervention)", fmt(analysis.receiverLevel)],
    ["gap", fmt(analysis.noInterventionGap)],
    ["strategies", analysis.strategies.join(", ") || "(none)"],
  ];
  for (const [label, value] of rows) {
    const dt = document.createElement("dt");
    dt.textContent = label;
    const dd = document.createElement("dd");
    dd.textContent = value;
    container.append(dt, dd);
  }
}

export function renderSuggestions(
  list: HTMLElement,
  draft: string,
  suggestions: Alternative[],
  onChoose: (index: number) => void,
): void {
  list.replaceChildren();
  suggestions.forEach((alt, index) => {
    const item = document.createElement("li");
    item.className = "suggestion";
    item.dataset.index = String(index);

    const text = document.createElement("p");
    text.className = "suggestion-text";
    for (const part of tokenDiff(draft, alt.text)) {
      if (part.kind === "same") {
        text.append(document.createTextNode(part.text + " "));
      } else {
        const span = document.createElement("span");
        span.className = part.kind === "added" ? "diff-added" : "diff-removed";
        span.textContent = part.text + " ";
        text.append(span);
      }
    }

    const meta = document.createElement("p");
    meta.className = "suggestion-meta";
    const gap = document.createElement("span");
    gap.className = "gap";
    gap.textContent = `gap ${fmt(alt.gap)}`;
    const predicted = document.createElement("span");
    predicted.textContent = `receiver ${fmt(alt.predicted)}`;
    const strategies = document.createElement("span");
    strategies.textContent = alt.strategies.join(", ") || "(none)";
    meta.append(gap, predicted, strategies);
    if (alt.shortfall) {
      const warn = document.createElement("span");
      warn.className = "shortfall";
      warn.textContent = "partial plan";
      meta.append(warn);
    }

    const use = document.createElement("button");
    use.type = "button";
    use.className = "use-suggestion";
    use.textContent = "Use";
    use.addEventListener("click", () => onChoose(index));

    item.append(text, meta, use);
    list.append(item);
  });
}
