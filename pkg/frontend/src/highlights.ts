/**
 * Turn a notice's mentions into styled text ranges.
 *
 * The renderer produces a partition: styled and plain ranges together
 * cover the notice text exactly once, in offset order. Overlapping
 * input spans are a violated server invariant and are surfaced as an
 * error rather than silently patched over.
 */

import type { NoticeDetail } from "./api.js";

export type MentionKind = "date" | "place" | "person" | "term";

export interface HighlightSpan {
  start: number;
  end: number;
  kind: MentionKind;
}

export type RangeStyle = MentionKind | "plain";

export interface StyledRange {
  start: number;
  end: number;
  style: RangeStyle;
}

export class OverlapDetected extends Error {
  constructor(a: HighlightSpan, b: HighlightSpan) {
    super(
      `overlapping mention spans [${a.start},${a.end}) and [${b.start},${b.end})`,
    );
    this.name = "OverlapDetected";
  }
}

/**
 * Partition [0, text.length) into styled and plain ranges.
 *
 * Spans may arrive in any order; they must lie inside the text and must
 * not overlap. Empty text with no spans yields no ranges.
 */
export function renderHighlights(
  text: string,
  spans: readonly HighlightSpan[],
): StyledRange[] {
  for (const span of spans) {
    if (span.start < 0 || span.end > text.length || span.start >= span.end) {
      throw new RangeError(
        `mention span [${span.start},${span.end}) outside text of length ${text.length}`,
      );
    }
  }
  const ordered = [...spans].sort((a, b) => a.start - b.start || a.end - b.end);

  const ranges: StyledRange[] = [];
  let cursor = 0;
  let previous: HighlightSpan | null = null;
  for (const span of ordered) {
    if (previous !== null && span.start < previous.end) {
      throw new OverlapDetected(previous, span);
    }
    if (span.start > cursor) {
      ranges.push({ start: cursor, end: span.start, style: "plain" });
    }
    ranges.push({ start: span.start, end: span.end, style: span.kind });
    cursor = span.end;
    previous = span;
  }
  if (cursor < text.length) {
    ranges.push({ start: cursor, end: text.length, style: "plain" });
  }
  return ranges;
}

const KIND_PRIORITY: Record<MentionKind, number> = {
  date: 0,
  place: 1,
  person: 2,
  term: 3,
};

/**
 * Reduce possibly-overlapping spans to a non-overlapping subset.
 *
 * Mentions of different kinds may legitimately overlap (a term inside a
 * period name, say); a single style per offset forces a choice. Earlier
 * start wins, then the longer span, then the kind order above. The
 * strict renderer stays untouched so a same-kind overlap, which the
 * server forbids, still raises.
 */
export function resolveOverlaps(
  spans: readonly HighlightSpan[],
): HighlightSpan[] {
  const ordered = [...spans].sort(
    (a, b) =>
      a.start - b.start ||
      b.end - b.start - (a.end - a.start) ||
      KIND_PRIORITY[a.kind] - KIND_PRIORITY[b.kind],
  );
  const kept: HighlightSpan[] = [];
  let reach = 0;
  for (const span of ordered) {
    if (span.start >= reach) {
      kept.push(span);
      reach = span.end;
    }
  }
  return kept;
}

/**
 * Ranges for one fetched notice. Mention offsets are document-absolute
 * while the detail text is the notice slice, so spans are rebased onto
 * the slice before rendering.
 */
export function noticeHighlights(detail: NoticeDetail): StyledRange[] {
  const base = detail.notice.start;
  const spans = detail.mentions.map((m) => ({
    start: m.start - base,
    end: m.end - base,
    kind: m.kind as MentionKind,
  }));
  return renderHighlights(detail.text, resolveOverlaps(spans));
}
