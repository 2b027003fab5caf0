/** Dashboard state: ensemble size over time, weight distribution,
 * running accuracy, and the regret-versus-bound track.
 *
 * Every value is copied from the model and metrics endpoints; nothing
 * is recomputed client-side.
 */

import { MetricsInfo, ModelInfo } from "./api.js";

export interface RegretPoint {
  observed: number;
  regret: number | null;
  bound: number | null;
}

export interface DashboardState {
  latestModel: ModelInfo | null;
  latestMetrics: MetricsInfo | null;
  sizeHistory: number[];
  regretTrack: RegretPoint[];
}

export function emptyDashboard(): DashboardState {
  return { latestModel: null, latestMetrics: null, sizeHistory: [], regretTrack: [] };
}

export function updateDashboard(
  state: DashboardState,
  model: ModelInfo,
  metrics: MetricsInfo,
): DashboardState {
  const sizeHistory = state.sizeHistory.slice();
  const regretTrack = state.regretTrack.slice();
  if (model.initialized && typeof model.ensemble_size === "number") {
    sizeHistory.push(model.ensemble_size);
    regretTrack.push({
      observed: model.observed ?? 0,
      regret: model.empirical_regret ?? null,
      bound: model.theory_bound ?? null,
    });
  }
  return { latestModel: model, latestMetrics: metrics, sizeHistory, regretTrack };
}

export function ensembleSize(state: DashboardState): number | null {
  const m = state.latestModel;
  return m && m.initialized ? m.ensemble_size ?? null : null;
}

export function mistakeCount(state: DashboardState): number | null {
  const m = state.latestModel;
  return m && m.initialized ? m.mistake_count ?? null : null;
}

export function runningAccuracy(state: DashboardState): number | null {
  return state.latestMetrics?.prequential.accuracy ?? null;
}

/** Weight histogram buckets as fractions for bar rendering. */
export function weightBars(state: DashboardState): number[] {
  const histogram = state.latestModel?.weights_histogram ?? [];
  const total = histogram.reduce((a, b) => a + b, 0);
  if (total === 0) return histogram.map(() => 0);
  return histogram.map((count) => count / total);
}
