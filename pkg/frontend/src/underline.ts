/** Underline color logic for perturbation views. */

import { rampColor, type Ramp } from "./colorRamp.js";
import type { PerturbationReport, VariantPayload } from "./types.js";

/**
 * The delta with the largest absolute value, sign preserved; ties break to
 * the first occurrence.  Used to color a replaced word's own underline when
 * it has several synonym replacements.
 */
export function wordUnderlineValue(deltas: number[]): number {
  if (deltas.length === 0) {
    throw new Error("deltas must be non-empty");
  }
  let best = deltas[0];
  for (const d of deltas.slice(1)) {
    if (Math.abs(d) > Math.abs(best)) best = d;
  }
  return best;
}

export function domainMax(report: PerturbationReport): number {
  return report.variants.reduce((m, v) => Math.max(m, Math.abs(v.delta)), 0);
}

/** Group word-method variants by the replaced span (start offset). */
export function groupBySpan(report: PerturbationReport): Map<string, VariantPayload[]> {
  const groups = new Map<string, VariantPayload[]>();
  for (const v of report.variants) {
    if (v.span === null) continue;
    const key = `${v.span.start}:${v.span.end}`;
    const list = groups.get(key) ?? [];
    list.push(v);
    groups.set(key, list);
  }
  return groups;
}

export function underlineStyle(delta: number, ramp: Ramp, max: number): string {
  return `border-bottom: 3px solid ${rampColor(delta, ramp, max)}`;
}
