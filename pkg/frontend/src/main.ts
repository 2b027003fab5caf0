import { ApiError, Client } from "./api.js";
import { DashboardState, emptyDashboard, updateDashboard } from "./dashboard.js";
import { QueueViewModel, reviewAndDecide, whatIfPreview } from "./queue.js";
import { renderDashboard, renderNotice, renderPreview, renderQueue } from "./ui.js";

const client = new Client("");
const queue = new QueueViewModel();
let dashboard: DashboardState = emptyDashboard();

const queueRoot = document.getElementById("queue")!;
const noticeRoot = document.getElementById("notice")!;
const previewRoot = document.getElementById("preview")!;
const dashboardRoot = document.getElementById("dashboard")!;
const actor = "console";

async function refreshQueue(): Promise<void> {
  try {
    queue.load(await client.queue(50, 0));
    queue.notice = null;
  } catch (err) {
    if (err instanceof ApiError && err.status === 409) {
      queue.load([]);
      queue.notice = {
        kind: "info",
        text: "No decision has initialized the model yet; ideas appear after the first one.",
      };
      await showAllIdeasHint();
    } else {
      queue.notice = { kind: "error", text: `queue fetch failed: ${String(err)}` };
    }
  }
  draw();
}

/** Before the model exists the queue endpoint refuses to rank; offer
 * the metrics count so the reviewer knows ingestion worked. */
async function showAllIdeasHint(): Promise<void> {
  try {
    const metrics = await client.metrics();
    if (queue.notice && metrics.pending > 0) {
      queue.notice.text += ` (${metrics.pending} ideas pending)`;
    }
  } catch {
    // leave the basic notice in place
  }
}

async function refreshDashboard(): Promise<void> {
  try {
    const [model, metrics] = await Promise.all([client.model(), client.metrics()]);
    dashboard = updateDashboard(dashboard, model, metrics);
  } catch (err) {
    // dashboard keeps its last state on transient failures
    console.error("dashboard refresh failed", err);
  }
  renderDashboard(dashboardRoot as HTMLElement, dashboard);
}

const handlers = {
  onDecide(ideaId: string, label: 0 | 1): void {
    void (async () => {
      draw();
      await reviewAndDecide(client, queue, ideaId, label, actor);
      draw();
      await Promise.all([refreshQueue(), refreshDashboard()]);
    })();
  },
  onPreview(ideaId: string): void {
    void (async () => {
      const previews = await Promise.all([
        whatIfPreview(client, ideaId, 1, actor),
        whatIfPreview(client, ideaId, 0, actor),
      ]);
      renderPreview(previewRoot as HTMLElement, previews);
    })();
  },
  onRetry(ideaId: string, label: 0 | 1): void {
    handlers.onDecide(ideaId, label);
  },
};

function draw(): void {
  renderQueue(queueRoot as HTMLElement, queue.entries, handlers,
              (id) => queue.isSubmitting(id));
  renderNotice(noticeRoot as HTMLElement, queue.notice, handlers);
}

async function boot(): Promise<void> {
  await Promise.all([refreshQueue(), refreshDashboard()]);
  setInterval(() => void refreshDashboard(), 10_000);
}

void boot();
