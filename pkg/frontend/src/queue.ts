/** Queue view model: server-ordered entries, optimistic decision flow,
 * conflict recovery, and the dry-run preview.
 */

import { ApiError, Client, DecisionEvent, QueueEntry, StepOutcome } from "./api.js";

export interface Notice {
  kind: "conflict" | "error" | "info";
  text: string;
  retry?: { ideaId: string; label: 0 | 1 };
}

export class QueueViewModel {
  entries: QueueEntry[] = [];
  notice: Notice | null = null;
  stale = false;
  private inFlight = new Set<string>();

  /** Replace the list with a fresh server response (server order kept). */
  load(entries: QueueEntry[]): void {
    this.entries = entries.filter((e) => e.status === "pending");
    this.stale = false;
  }

  pendingIds(): string[] {
    return this.entries.map((e) => e.idea_id);
  }

  top(): QueueEntry | undefined {
    return this.entries[0];
  }

  get(ideaId: string): QueueEntry | undefined {
    return this.entries.find((e) => e.idea_id === ideaId);
  }

  isSubmitting(ideaId: string): boolean {
    return this.inFlight.has(ideaId);
  }

  /** Claim the submit slot for an idea; false when one is in flight. */
  beginSubmit(ideaId: string): boolean {
    if (this.inFlight.has(ideaId)) return false;
    this.inFlight.add(ideaId);
    return true;
  }

  endSubmit(ideaId: string): void {
    this.inFlight.delete(ideaId);
  }

  /** Remove now, remember where the entry sat in case it must return. */
  optimisticallyRemove(ideaId: string): { entry: QueueEntry; index: number } | null {
    const index = this.entries.findIndex((e) => e.idea_id === ideaId);
    if (index < 0) return null;
    const [entry] = this.entries.splice(index, 1);
    this.stale = true;
    return { entry, index };
  }

  restore(removed: { entry: QueueEntry; index: number }): void {
    const at = Math.min(removed.index, this.entries.length);
    this.entries.splice(at, 0, removed.entry);
  }
}

export interface DecideResult {
  ok: boolean;
  event?: DecisionEvent;
  notice?: Notice;
}

/** Record a decision with optimistic removal.
 *
 * Success leaves the entry out and marks the list stale for a refetch.
 * A conflict (409) restores the entry with an explanation. A transport
 * failure restores it with a retry affordance. Double submits are
 * swallowed while a request is in flight.
 */
export async function reviewAndDecide(
  client: Client,
  model: QueueViewModel,
  ideaId: string,
  label: 0 | 1,
  actor: string,
): Promise<DecideResult> {
  if (!model.beginSubmit(ideaId)) {
    return { ok: false, notice: { kind: "info", text: "decision already in flight" } };
  }
  const removed = model.optimisticallyRemove(ideaId);
  if (!removed) {
    model.endSubmit(ideaId);
    return { ok: false, notice: { kind: "error", text: `idea ${ideaId} is not pending` } };
  }
  try {
    const event = await client.decide(ideaId, label, actor, true);
    model.notice = null;
    return { ok: true, event };
  } catch (err) {
    model.restore(removed);
    if (err instanceof ApiError && err.status === 409) {
      const notice: Notice = {
        kind: "conflict",
        text: `idea ${ideaId} was already decided elsewhere (${err.code})`,
      };
      model.notice = notice;
      return { ok: false, notice };
    }
    const notice: Notice = {
      kind: "error",
      text: `decision for ${ideaId} did not reach the server; retry when ready`,
      retry: { ideaId, label },
    };
    model.notice = notice;
    return { ok: false, notice };
  } finally {
    model.endSubmit(ideaId);
  }
}

export interface WhatIfPreview {
  available: boolean;
  label?: 0 | 1;
  outcome?: StepOutcome | null;
  initializes?: boolean;
}

/** Ask the server what one decision would do, without committing it.
 * Unavailable (hidden panel) when the idea is gone or already decided. */
export async function whatIfPreview(
  client: Client,
  ideaId: string,
  label: 0 | 1,
  actor = "preview",
): Promise<WhatIfPreview> {
  try {
    const event = await client.decide(ideaId, label, actor, false);
    return {
      available: true,
      label,
      outcome: event.outcome,
      initializes: event.initialized_model,
    };
  } catch (err) {
    if (
      err instanceof ApiError &&
      (err.status === 400 || err.status === 404 || err.status === 405 || err.status === 409)
    ) {
      return { available: false };
    }
    throw err;
  }
}
