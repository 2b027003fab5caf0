/** DOM rendering for the console; no state lives here. */

import { QueueEntry } from "./api.js";
import {
  DashboardState,
  ensembleSize,
  mistakeCount,
  runningAccuracy,
  weightBars,
} from "./dashboard.js";
import { highlightTerms } from "./highlight.js";
import { Notice, WhatIfPreview } from "./queue.js";

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

function fmt(value: number | null | undefined, digits = 3): string {
  if (value === null || value === undefined) return "—";
  return value.toFixed(digits);
}

export interface QueueHandlers {
  onDecide(ideaId: string, label: 0 | 1): void;
  onPreview(ideaId: string): void;
  onRetry(ideaId: string, label: 0 | 1): void;
}

export function renderQueue(
  root: HTMLElement,
  entries: QueueEntry[],
  handlers: QueueHandlers,
  submitting: (id: string) => boolean,
): void {
  root.replaceChildren();
  if (entries.length === 0) {
    root.append(el("p", "empty", "Queue is empty — every idea is decided."));
    return;
  }
  for (const entry of entries) {
    const card = el("article", "card");
    card.dataset.ideaId = entry.idea_id;

    const header = el("header");
    const title = el("h3");
    for (const span of highlightTerms(entry.title, entry.terms.rt, entry.terms.kt)) {
      if (span.kind === "plain") {
        title.append(span.text);
      } else {
        title.append(el("mark", span.kind, span.text));
      }
    }
    header.append(title);
    header.append(el("span", "prob", `p=${fmt(entry.p)}`));
    card.append(header);

    const m = entry.measurements;
    const badges = el("div", "badges");
    const badgeValues: [string, string][] = [
      ["rel", fmt(m.rel, 2)],
      ["vote", String(m.vote)],
      ["type", String(m.type)],
      ["epr", String(m.epr)],
      ["div", fmt(m.div, 2)],
      ["con", fmt(m.con, 2)],
    ];
    for (const [name, value] of badgeValues) {
      badges.append(el("span", `badge badge-${name}`, `${name} ${value}`));
    }
    card.append(badges);

    const terms = el("div", "terms");
    for (const rt of entry.terms.rt) terms.append(el("mark", "rt", rt));
    for (const kt of entry.terms.kt) terms.append(el("mark", "kt", kt));
    card.append(terms);

    const actions = el("div", "actions");
    const potential = el("button", "decide-potential", "Potential");
    const notPotential = el("button", "decide-not", "Not potential");
    const preview = el("button", "preview", "What if?");
    potential.disabled = notPotential.disabled = submitting(entry.idea_id);
    potential.onclick = () => handlers.onDecide(entry.idea_id, 1);
    notPotential.onclick = () => handlers.onDecide(entry.idea_id, 0);
    preview.onclick = () => handlers.onPreview(entry.idea_id);
    actions.append(potential, notPotential, preview);
    card.append(actions);

    root.append(card);
  }
}

export function renderNotice(
  root: HTMLElement,
  notice: Notice | null,
  handlers: QueueHandlers,
): void {
  root.replaceChildren();
  if (!notice) return;
  const banner = el("div", `notice notice-${notice.kind}`, notice.text);
  if (notice.retry) {
    const retry = el("button", "retry", "Retry");
    const { ideaId, label } = notice.retry;
    retry.onclick = () => handlers.onRetry(ideaId, label);
    banner.append(" ", retry);
  }
  root.append(banner);
}

export function renderPreview(root: HTMLElement, previews: WhatIfPreview[]): void {
  root.replaceChildren();
  const usable = previews.filter((p) => p.available);
  if (usable.length === 0) {
    root.hidden = true;
    return;
  }
  root.hidden = false;
  root.append(el("h4", undefined, "What would happen"));
  for (const p of usable) {
    const line = el("div", "preview-line");
    const labelName = p.label === 1 ? "Potential" : "Not potential";
    if (p.initializes) {
      line.textContent = `${labelName}: would train the first parameter vector`;
    } else if (p.outcome) {
      const o = p.outcome;
      const bits = [
        `p=${fmt(o.p)}`,
        o.mistake ? "mistake" : "no mistake",
        o.refit_performed ? "refit" : o.capacity_hit ? "capacity hit" : "no refit",
      ];
      line.textContent = `${labelName}: ${bits.join(", ")}`;
    }
    root.append(line);
  }
  root.append(el("p", "fineprint", "Dry run — nothing was recorded."));
}

export function renderDashboard(root: HTMLElement, state: DashboardState): void {
  root.replaceChildren();
  const model = state.latestModel;
  if (!model || !model.initialized) {
    root.append(el("p", "empty", "Model not initialized — record the first decision."));
    return;
  }
  const stats = el("div", "stats");
  const fields: [string, string][] = [
    ["ensemble", String(ensembleSize(state) ?? "—")],
    ["mistakes", String(mistakeCount(state) ?? "—")],
    ["observed", String(model.observed ?? "—")],
    ["accuracy", fmt(runningAccuracy(state))],
    ["regret", model.empirical_regret === null ? "—" : String(model.empirical_regret)],
    ["bound", fmt(model.theory_bound ?? null, 2)],
    ["backend", model.backend],
  ];
  for (const [name, value] of fields) {
    const cell = el("div", "stat");
    cell.append(el("span", "stat-name", name), el("span", "stat-value", value));
    stats.append(cell);
  }
  root.append(stats);

  const bars = el("div", "weight-bars");
  for (const fraction of weightBars(state)) {
    const bar = el("div", "weight-bar");
    bar.style.height = `${Math.max(2, Math.round(fraction * 60))}px`;
    bars.append(bar);
  }
  const barsWrap = el("div", "weights");
  barsWrap.append(el("h4", undefined, "Weight distribution"), bars);
  root.append(barsWrap);

  const sizes = el("div", "sizes", state.sizeHistory.join(" → ") || "—");
  const sizesWrap = el("div", "sizes-wrap");
  sizesWrap.append(el("h4", undefined, "Ensemble size over time"), sizes);
  root.append(sizesWrap);
}
