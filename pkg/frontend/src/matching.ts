/** Scene-3 logic: cross-filtered paired histograms over the covariate table. */

import { binIndex } from "./trend.js";
import type { Arm, Bundle, CovariateRow, CovariateVariable } from "./types.js";

export function variableValue(row: CovariateRow, name: string): number {
  if (name === "n_pre") {
    return row.n_pre;
  }
  if (name === "trend") {
    return row.trend;
  }
  const v = row.values[name];
  return v === undefined ? NaN : v;
}

/** Rows passing the matched-only toggle and every active range filter.
 *
 * A filter on one variable removes the failing interventions from every
 * histogram, not just its own.
 */
export function applyFilters(
  rows: readonly CovariateRow[],
  filters: Record<string, [number, number]>,
  matchedOnly: boolean,
): CovariateRow[] {
  return rows.filter((row) => {
    if (matchedOnly && !row.matched) {
      return false;
    }
    for (const [name, range] of Object.entries(filters)) {
      const v = variableValue(row, name);
      if (!(v >= range[0] && v <= range[1])) {
        return false;
      }
    }
    return true;
  });
}

export interface HistogramPair {
  variable: string;
  binCount: number;
  treatment: number[];
  control: number[];
}

/** Per-arm bin counts for one variable using the bundle's coarsening edges. */
export function histogram(
  rows: readonly CovariateRow[],
  variable: CovariateVariable,
): HistogramPair {
  const binCount = variable.kind === "binary" ? 2 : Math.max(1, variable.edges.length - 1);
  const counts: Record<Arm, number[]> = {
    treatment: new Array(binCount).fill(0),
    control: new Array(binCount).fill(0),
  };
  for (const row of rows) {
    const v = variableValue(row, variable.name);
    const idx = variable.kind === "binary"
      ? (v === 1 ? 1 : 0)
      : binIndex(variable.edges, v);
    counts[row.arm][idx] = (counts[row.arm][idx] as number) + 1;
  }
  return {
    variable: variable.name,
    binCount,
    treatment: counts.treatment,
    control: counts.control,
  };
}

export function allHistograms(
  bundle: Bundle,
  filters: Record<string, [number, number]>,
  matchedOnly: boolean,
): HistogramPair[] {
  const table = bundle.data.covariate_table;
  const rows = applyFilters(table.rows, filters, matchedOnly);
  return table.variables.map((v) => histogram(rows, v));
}

export function armTotals(rows: readonly CovariateRow[]): Record<Arm, number> {
  const totals: Record<Arm, number> = { treatment: 0, control: 0 };
  for (const row of rows) {
    totals[row.arm] += 1;
  }
  return totals;
}
