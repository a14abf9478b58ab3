import { HttpTransport } from "./api.js";
import { filterSymptoms } from "./search.js";
import { TriageSession, WhatIfComparison } from "./session.js";
import {
  renderChecklist,
  renderRanking,
  renderSuggestions,
  renderWhatIf,
} from "./render.js";
import { ModelId } from "./types.js";

function byId(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const base = params.get("api") ?? "";
  const transport = new HttpTransport(base);
  const vocabulary = await transport.symptoms();
  const session = new TriageSession(transport, vocabulary);

  const searchBox = byId("search") as HTMLInputElement;
  const checklist = byId("checklist");
  const ranking = byId("ranking");
  const suggestions = byId("suggestions");
  const whatifPanel = byId("whatif");
  const modelPicker = byId("model") as HTMLSelectElement;
  const assertedLine = byId("asserted");

  let comparison: WhatIfComparison | null = null;

  const redrawChecklist = () => {
    const names = filterSymptoms(vocabulary, searchBox.value);
    renderChecklist(checklist, names, new Set(session.view.asserted), (name) => {
      comparison = null;
      renderWhatIf(whatifPanel, null);
      void session.toggle(name);
    });
  };

  session.onChange((view) => {
    assertedLine.textContent = view.asserted.length
      ? `asserted: ${view.asserted.join(", ")}`
      : "no symptoms asserted";
    renderRanking(ranking, view);
    renderSuggestions(
      suggestions,
      view,
      (symptom) => {
        comparison = null;
        renderWhatIf(whatifPanel, null);
        void session.toggle(symptom);
      },
      (symptom) => {
        void session.whatifCompare(symptom).then((result) => {
          comparison = result;
          renderWhatIf(whatifPanel, comparison);
        });
      },
    );
    redrawChecklist();
  });

  searchBox.addEventListener("input", redrawChecklist);
  modelPicker.addEventListener("change", () => {
    void session.setModel(modelPicker.value as ModelId);
  });

  redrawChecklist();
  renderRanking(ranking, session.view);
}

void boot();
