/**
 * Search facets as plain state, mapped onto /search request parameters.
 *
 * The mapping is a pure function so the query a given facet combination
 * produces can be asserted without a browser or a server.
 */

import type { QueryParams } from "./api.js";

/** Coverage span of the corpus; the period slider never leaves it. */
export const PERIOD_MIN = -800;
export const PERIOD_MAX = 800;

/** Matches the server's default page size so page N is simply an offset. */
export const PAGE_SIZE = 20;

export interface SearchState {
  text: string;
  conceptId: string | null;
  placeId: string | null;
  periodFrom: number;
  periodTo: number;
  municipality: string;
  page: number;
}

export function defaultSearchState(): SearchState {
  return {
    text: "",
    conceptId: null,
    placeId: null,
    periodFrom: PERIOD_MIN,
    periodTo: PERIOD_MAX,
    municipality: "",
    page: 1,
  };
}

/** Clamp both handles into the coverage span and keep them ordered. */
export function clampPeriod(from: number, to: number): [number, number] {
  const clamp = (year: number) =>
    Math.min(Math.max(Math.round(year), PERIOD_MIN), PERIOD_MAX);
  const lo = clamp(from);
  const hi = clamp(to);
  return lo <= hi ? [lo, hi] : [hi, lo];
}

export function clampPage(page: number): number {
  return Number.isFinite(page) ? Math.max(1, Math.floor(page)) : 1;
}

/**
 * Map facet state 1:1 onto /search parameters.
 *
 * Unset facets are omitted entirely: an empty state yields an empty
 * parameter map (match-all). The text box splits on whitespace and
 * commas into conjunctive terms. A slider sitting at the full coverage
 * span is "no period filter"; anything narrower emits both bounds,
 * since the server rejects half-open periods. Page N past the first
 * becomes an offset in server page-size units.
 */
export function buildSearchRequest(state: SearchState): QueryParams {
  const params: QueryParams = {};

  const terms = state.text.trim().split(/[\s,]+/).filter(Boolean);
  if (terms.length > 0) {
    params.q = terms.join(",");
  }
  if (state.conceptId) {
    params.concept = state.conceptId;
  }
  if (state.placeId) {
    params.place = state.placeId;
  }
  if (state.periodFrom !== PERIOD_MIN || state.periodTo !== PERIOD_MAX) {
    params.from = String(state.periodFrom);
    params.to = String(state.periodTo);
  }
  const town = state.municipality.trim();
  if (town) {
    params.municipality = town;
  }
  if (state.page > 1) {
    params.offset = String((state.page - 1) * PAGE_SIZE);
  }
  return params;
}
