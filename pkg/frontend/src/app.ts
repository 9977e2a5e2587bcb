/**
 * DOM shell wiring the pure modules to the service.
 *
 * Layout: a facet bar on top, result list on the left, notice reader on
 * the right, curation panel below. All state lives in two plain
 * objects (SearchState, CurationState); every handler updates state and
 * re-renders the affected region. At most one search request is in
 * flight: newer input aborts the older request.
 */

import {
  ApiClient,
  ApiError,
  type ConceptRecord,
  type SearchResponse,
} from "./api.js";
import {
  PAGE_SIZE,
  PERIOD_MAX,
  PERIOD_MIN,
  type SearchState,
  buildSearchRequest,
  clampPage,
  clampPeriod,
  defaultSearchState,
} from "./search.js";
import { noticeHighlights } from "./highlights.js";
import {
  type CurationState,
  type Language,
  DraftError,
  discardDraft,
  emptyCuration,
  stageLabel,
  stageMerge,
  submitCuration,
} from "./curation.js";

export interface AppHandle {
  element: HTMLElement;
  refresh: () => Promise<void>;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function conceptName(concept: ConceptRecord): string {
  const preferred =
    concept.preferred.fr ?? Object.values(concept.preferred)[0];
  return preferred ? `${preferred} (${concept.concept_id})` : concept.concept_id;
}

function fillConceptSelect(
  select: HTMLSelectElement,
  concepts: ConceptRecord[],
  placeholder: string,
): void {
  const previous = select.value;
  select.replaceChildren();
  const blank = el("option", undefined, placeholder);
  blank.value = "";
  select.appendChild(blank);
  for (const concept of concepts) {
    const option = el("option", undefined, conceptName(concept));
    option.value = concept.concept_id;
    select.appendChild(option);
  }
  select.value = previous;
  if (select.value !== previous) select.value = "";
}

export function createApp(root: HTMLElement, client: ApiClient): AppHandle {
  let searchState: SearchState = defaultSearchState();
  let curation: CurationState = emptyCuration();
  let concepts: ConceptRecord[] = [];
  let inflight: AbortController | null = null;

  const container = el("div", "app");
  root.appendChild(container);

  const status = el("div", "app__status");

  // --- facet bar -------------------------------------------------------

  const facets = el("form", "facets");
  facets.addEventListener("submit", (event) => event.preventDefault());

  const textInput = el("input", "facets__text");
  textInput.type = "search";
  textInput.placeholder = "full-text terms";

  const conceptSelect = el("select", "facets__concept");
  const placeSelect = el("select", "facets__place");

  const fromSlider = el("input", "facets__from");
  const toSlider = el("input", "facets__to");
  for (const slider of [fromSlider, toSlider]) {
    slider.type = "range";
    slider.min = String(PERIOD_MIN);
    slider.max = String(PERIOD_MAX);
    slider.step = "10";
  }
  fromSlider.value = String(PERIOD_MIN);
  toSlider.value = String(PERIOD_MAX);
  const periodLabel = el("span", "facets__period-label");

  const townInput = el("input", "facets__municipality");
  townInput.type = "search";
  townInput.placeholder = "municipality";

  const resetButton = el("button", "facets__reset", "Reset");
  resetButton.type = "button";

  const labelled = (caption: string, ...controls: HTMLElement[]) => {
    const wrap = el("label", "facets__field");
    wrap.appendChild(el("span", "facets__caption", caption));
    for (const control of controls) wrap.appendChild(control);
    return wrap;
  };
  facets.append(
    labelled("Text", textInput),
    labelled("Concept", conceptSelect),
    labelled("Place", placeSelect),
    labelled("Period", fromSlider, toSlider, periodLabel),
    labelled("Municipality", townInput),
    resetButton,
  );

  // --- results and notice reader --------------------------------------

  const resultsPane = el("div", "results");
  const resultsTotal = el("div", "results__total");
  const resultsList = el("ul", "results__list");
  const pager = el("div", "results__pager");
  const prevButton = el("button", undefined, "Prev");
  const nextButton = el("button", undefined, "Next");
  prevButton.type = "button";
  nextButton.type = "button";
  pager.append(prevButton, nextButton);
  resultsPane.append(resultsTotal, resultsList, pager);

  const noticePane = el("div", "notice");
  const noticeHeader = el("h2", "notice__header", "Select a notice");
  const noticeBody = el("pre", "notice__body");
  noticePane.append(noticeHeader, noticeBody);

  let lastResponse: SearchResponse | null = null;

  function renderPeriodLabel(): void {
    periodLabel.textContent = `${searchState.periodFrom} to ${searchState.periodTo}`;
  }

  function renderResults(): void {
    resultsList.replaceChildren();
    if (lastResponse === null) {
      resultsTotal.textContent = "";
      return;
    }
    resultsTotal.textContent = `${lastResponse.total} notices`;
    for (const hit of lastResponse.hits) {
      const item = el("li", "results__hit");
      const link = el("button", "results__link", hit.notice_id);
      link.type = "button";
      link.addEventListener("click", () => void openNotice(hit.notice_id));
      item.appendChild(link);
      if (hit.score > 0) {
        item.appendChild(el("span", "results__score", ` score ${hit.score}`));
      }
      resultsList.appendChild(item);
    }
    prevButton.disabled = searchState.page <= 1;
    nextButton.disabled =
      searchState.page * PAGE_SIZE >= lastResponse.total;
  }

  async function runSearch(): Promise<void> {
    inflight?.abort();
    const controller = new AbortController();
    inflight = controller;
    try {
      const response = await client.search(
        buildSearchRequest(searchState),
        controller.signal,
      );
      if (inflight !== controller) return; // a newer request took over
      lastResponse = response;
      status.textContent = "";
      renderResults();
    } catch (error) {
      if (controller.signal.aborted) return;
      showError(error);
    }
  }

  async function openNotice(noticeId: string): Promise<void> {
    try {
      const detail = await client.getNotice(noticeId);
      noticeHeader.textContent = `${detail.notice.number} - ${detail.notice.municipality}`;
      noticeBody.replaceChildren();
      for (const range of noticeHighlights(detail)) {
        const piece = detail.text.slice(range.start, range.end);
        if (range.style === "plain") {
          noticeBody.appendChild(document.createTextNode(piece));
        } else {
          noticeBody.appendChild(el("mark", `mention-${range.style}`, piece));
        }
      }
    } catch (error) {
      showError(error);
    }
  }

  function showError(error: unknown): void {
    status.textContent =
      error instanceof ApiError
        ? `${error.code}: ${error.message}`
        : String(error);
  }

  // --- curation panel --------------------------------------------------

  const curationPane = el("div", "curation");
  curationPane.appendChild(el("h2", undefined, "Terminology"));

  const keepSelect = el("select", "curation__keep");
  const mergeSelect = el("select", "curation__merge");
  const stageMergeButton = el("button", undefined, "Stage merge");
  stageMergeButton.type = "button";

  const labelConceptSelect = el("select", "curation__concept");
  const languageSelect = el("select", "curation__language");
  for (const lang of ["fr", "de", "en"]) {
    const option = el("option", undefined, lang);
    option.value = lang;
    languageSelect.appendChild(option);
  }
  const labelInput = el("input", "curation__label");
  labelInput.type = "text";
  labelInput.placeholder = "new label";
  const stageLabelButton = el("button", undefined, "Stage label");
  stageLabelButton.type = "button";

  const pendingBox = el("div", "curation__pending");
  const confirmButton = el("button", undefined, "Confirm");
  const discardButton = el("button", undefined, "Discard");
  confirmButton.type = "button";
  discardButton.type = "button";
  const auditList = el("ul", "curation__audit");

  const mergeRow = el("div", "curation__row");
  mergeRow.append(
    el("span", undefined, "Merge"),
    mergeSelect,
    el("span", undefined, "into"),
    keepSelect,
    stageMergeButton,
  );
  const labelRow = el("div", "curation__row");
  labelRow.append(
    el("span", undefined, "Add label to"),
    labelConceptSelect,
    languageSelect,
    labelInput,
    stageLabelButton,
  );
  curationPane.append(mergeRow, labelRow, pendingBox, auditList);

  function knownIds(): ReadonlySet<string> {
    return new Set(concepts.map((c) => c.concept_id));
  }

  function renderCuration(): void {
    pendingBox.replaceChildren();
    const edit = curation.pending;
    if (edit !== null) {
      const text =
        edit.kind === "merge"
          ? `merge ${edit.mergeId} into ${edit.keepId}?`
          : `add ${edit.language} label "${edit.label}" to ${edit.conceptId}?`;
      pendingBox.append(el("span", undefined, text), confirmButton, discardButton);
    }
    auditList.replaceChildren();
    for (const applied of curation.audit) {
      auditList.appendChild(el("li", "curation__audit-item", applied.summary));
    }
  }

  function renderConceptControls(): void {
    fillConceptSelect(conceptSelect, concepts, "any concept");
    fillConceptSelect(placeSelect, concepts, "any place");
    fillConceptSelect(keepSelect, concepts, "keep");
    fillConceptSelect(mergeSelect, concepts, "merge away");
    fillConceptSelect(labelConceptSelect, concepts, "concept");
  }

  function stageSafely(action: () => CurationState): void {
    try {
      curation = action();
      status.textContent = "";
    } catch (error) {
      if (error instanceof DraftError) {
        status.textContent = error.message;
      } else {
        showError(error);
      }
    }
    renderCuration();
  }

  stageMergeButton.addEventListener("click", () =>
    stageSafely(() =>
      stageMerge(curation, keepSelect.value, mergeSelect.value, knownIds()),
    ),
  );
  stageLabelButton.addEventListener("click", () =>
    stageSafely(() =>
      stageLabel(
        curation,
        labelConceptSelect.value,
        languageSelect.value as Language,
        labelInput.value,
        knownIds(),
      ),
    ),
  );
  discardButton.addEventListener("click", () => {
    curation = discardDraft(curation);
    renderCuration();
  });
  confirmButton.addEventListener("click", () => {
    void (async () => {
      try {
        const outcome = await submitCuration(curation, client);
        curation = outcome.state;
        if (outcome.concepts !== null) {
          concepts = outcome.concepts;
          renderConceptControls();
        }
        status.textContent =
          outcome.status === "conflict"
            ? `conflict: ${outcome.message}`
            : outcome.message;
      } catch (error) {
        showError(error);
      }
      renderCuration();
    })();
  });

  // --- facet events ----------------------------------------------------

  function facetChanged(): void {
    searchState.page = 1;
    void runSearch();
  }

  textInput.addEventListener("input", () => {
    searchState.text = textInput.value;
    facetChanged();
  });
  conceptSelect.addEventListener("change", () => {
    searchState.conceptId = conceptSelect.value || null;
    facetChanged();
  });
  placeSelect.addEventListener("change", () => {
    searchState.placeId = placeSelect.value || null;
    facetChanged();
  });
  const sliderChanged = () => {
    [searchState.periodFrom, searchState.periodTo] = clampPeriod(
      Number(fromSlider.value),
      Number(toSlider.value),
    );
    renderPeriodLabel();
    facetChanged();
  };
  fromSlider.addEventListener("change", sliderChanged);
  toSlider.addEventListener("change", sliderChanged);
  townInput.addEventListener("input", () => {
    searchState.municipality = townInput.value;
    facetChanged();
  });
  resetButton.addEventListener("click", () => {
    searchState = defaultSearchState();
    textInput.value = "";
    conceptSelect.value = "";
    placeSelect.value = "";
    fromSlider.value = String(PERIOD_MIN);
    toSlider.value = String(PERIOD_MAX);
    townInput.value = "";
    renderPeriodLabel();
    void runSearch();
  });
  prevButton.addEventListener("click", () => {
    searchState.page = clampPage(searchState.page - 1);
    void runSearch();
  });
  nextButton.addEventListener("click", () => {
    searchState.page = clampPage(searchState.page + 1);
    void runSearch();
  });

  // --- assembly --------------------------------------------------------

  const main = el("div", "app__main");
  main.append(resultsPane, noticePane);
  container.append(status, facets, main, curationPane);
  renderPeriodLabel();
  renderCuration();

  async function refresh(): Promise<void> {
    const listed = await client.listConcepts({ limit: "1000" });
    concepts = listed.concepts;
    renderConceptControls();
    await runSearch();
  }

  return { element: container, refresh };
}
