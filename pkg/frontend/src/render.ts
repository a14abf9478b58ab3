import { SessionView, WhatIfComparison } from "./session.js";

function el(tag: string, className?: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderRanking(container: HTMLElement, view: SessionView): void {
  container.replaceChildren();
  if (view.error) {
    container.appendChild(el("div", "error", view.error));
    return;
  }
  if (view.retry) {
    container.appendChild(
      el("div", "retry", "network problem; press retry to resend"),
    );
    return;
  }
  if (!view.asserted.length) {
    container.appendChild(
      el("div", "placeholder", "assert symptoms to see ranked hypotheses"),
    );
    return;
  }
  for (const row of view.ranking.slice(0, 10)) {
    const item = el("div", "rank-row");
    const bar = el("div", "rank-bar");
    bar.style.width = `${Math.max(1, Math.round(row.confidence * 100))}%`;
    item.appendChild(bar);
    item.appendChild(
      el("span", "rank-label", `${row.disease} ${(row.confidence * 100).toFixed(1)}%`),
    );
    container.appendChild(item);
  }
  if (view.similar.length) {
    const block = el("div", "similar");
    block.appendChild(el("h3", undefined, "similar to the top hypothesis"));
    for (const s of view.similar) {
      block.appendChild(
        el("div", "similar-row", `${s.disease} (${s.similarity.toFixed(2)})`),
      );
    }
    container.appendChild(block);
  }
}

export function renderSuggestions(
  container: HTMLElement,
  view: SessionView,
  onPick: (symptom: string) => void,
  onWhatIf: (symptom: string) => void,
): void {
  container.replaceChildren();
  for (const s of view.suggestions) {
    const chip = el("span", "chip");
    const label = el("button", "chip-add", s.symptom);
    label.title = `expected entropy reduction ${s.expected_entropy_reduction.toFixed(3)}`;
    label.addEventListener("click", () => onPick(s.symptom));
    const compare = el("button", "chip-whatif", "?");
    compare.title = "what-if comparison";
    compare.addEventListener("click", () => onWhatIf(s.symptom));
    chip.appendChild(label);
    chip.appendChild(compare);
    container.appendChild(chip);
  }
}

export function renderChecklist(
  container: HTMLElement,
  names: string[],
  asserted: Set<string>,
  onToggle: (symptom: string) => void,
): void {
  container.replaceChildren();
  for (const name of names) {
    const row = el("label", "check-row");
    const box = document.createElement("input");
    box.type = "checkbox";
    box.checked = asserted.has(name);
    box.addEventListener("change", () => onToggle(name));
    row.appendChild(box);
    row.appendChild(el("span", undefined, name));
    container.appendChild(row);
  }
}

export function renderWhatIf(
  container: HTMLElement,
  comparison: WhatIfComparison | null,
): void {
  container.replaceChildren();
  if (!comparison) return;
  container.appendChild(
    el("h3", undefined, `what if: ${comparison.candidate}`),
  );
  const table = el("table", "whatif-table");
  const head = el("tr");
  for (const title of ["disease", "now", "with candidate", "delta"]) {
    head.appendChild(el("th", undefined, title));
  }
  table.appendChild(head);
  const fmt = (v: number | null) => (v === null ? "-" : (v * 100).toFixed(1) + "%");
  for (const row of comparison.rows) {
    const tr = el("tr");
    tr.appendChild(el("td", undefined, row.disease));
    tr.appendChild(el("td", undefined, fmt(row.current)));
    tr.appendChild(el("td", undefined, fmt(row.withCandidate)));
    tr.appendChild(
      el(
        "td",
        row.delta !== null && row.delta > 0 ? "delta-up" : "delta-down",
        row.delta === null ? "-" : ((row.delta > 0 ? "+" : "") + (row.delta * 100).toFixed(1) + "%"),
      ),
    );
    table.appendChild(tr);
  }
  container.appendChild(table);
}
