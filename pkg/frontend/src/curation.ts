/**
 * Single-edit-at-a-time curation workflow.
 *
 * One pending edit is staged, confirmed explicitly, then posted. A 409
 * means someone else changed the table first: the draft is discarded
 * and the conflict shown, never retried silently. Applied edits
 * accumulate in a session-local audit view.
 */

import type { ApiClient, ConceptRecord } from "./api.js";
import { ApiError } from "./api.js";

export type Language = "fr" | "de" | "en";

export interface MergeDraft {
  kind: "merge";
  keepId: string;
  mergeId: string;
}

export interface LabelDraft {
  kind: "label";
  conceptId: string;
  language: Language;
  label: string;
}

export type PendingEdit = MergeDraft | LabelDraft;

export interface AppliedEdit {
  kind: PendingEdit["kind"];
  summary: string;
}

export interface CurationState {
  pending: PendingEdit | null;
  audit: AppliedEdit[];
}

export class DraftError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "DraftError";
  }
}

export function emptyCuration(): CurationState {
  return { pending: null, audit: [] };
}

function requireClear(state: CurationState): void {
  if (state.pending !== null) {
    throw new DraftError("an edit is already staged; confirm or discard it");
  }
}

function requireKnown(conceptId: string, known: ReadonlySet<string>): void {
  if (!known.has(conceptId)) {
    throw new DraftError(`unknown concept ${conceptId}`);
  }
}

export function stageMerge(
  state: CurationState,
  keepId: string,
  mergeId: string,
  knownIds: ReadonlySet<string>,
): CurationState {
  requireClear(state);
  requireKnown(keepId, knownIds);
  requireKnown(mergeId, knownIds);
  if (keepId === mergeId) {
    throw new DraftError("cannot merge a concept into itself");
  }
  return { ...state, pending: { kind: "merge", keepId, mergeId } };
}

export function stageLabel(
  state: CurationState,
  conceptId: string,
  language: Language,
  label: string,
  knownIds: ReadonlySet<string>,
): CurationState {
  requireClear(state);
  requireKnown(conceptId, knownIds);
  if (!label.trim()) {
    throw new DraftError("label must not be empty");
  }
  return {
    ...state,
    pending: { kind: "label", conceptId, language, label: label.trim() },
  };
}

export function discardDraft(state: CurationState): CurationState {
  return { ...state, pending: null };
}

function summarize(edit: PendingEdit): string {
  return edit.kind === "merge"
    ? `merged ${edit.mergeId} into ${edit.keepId}`
    : `added ${edit.language} label "${edit.label}" to ${edit.conceptId}`;
}

export interface SubmitOutcome {
  state: CurationState;
  status: "applied" | "conflict";
  message: string;
  /** Refreshed concept list after a successful edit, else null. */
  concepts: ConceptRecord[] | null;
}

/**
 * Post the pending edit.
 *
 * On success the concept list is re-fetched so the view reflects the
 * server's state, not an optimistic guess. On 409 the draft is cleared
 * and the audit view left untouched. Every other failure propagates
 * verbatim with the draft still staged, so the caller may retry.
 */
export async function submitCuration(
  state: CurationState,
  client: ApiClient,
): Promise<SubmitOutcome> {
  const edit = state.pending;
  if (edit === null) {
    throw new DraftError("nothing staged");
  }
  try {
    if (edit.kind === "merge") {
      await client.mergeConcepts({
        keep_id: edit.keepId,
        merge_id: edit.mergeId,
      });
    } else {
      await client.addLabel(edit.conceptId, {
        language: edit.language,
        label: edit.label,
      });
    }
  } catch (error) {
    if (error instanceof ApiError && error.status === 409) {
      return {
        state: { ...state, pending: null },
        status: "conflict",
        message: error.message,
        concepts: null,
      };
    }
    throw error;
  }
  const refreshed = await client.listConcepts({ limit: "1000" });
  return {
    state: {
      pending: null,
      audit: [...state.audit, { kind: edit.kind, summary: summarize(edit) }],
    },
    status: "applied",
    message: summarize(edit),
    concepts: refreshed.concepts,
  };
}
