/**
 * Color ramps for score deltas.
 *
 * The diverging red-to-blue ramp maps [-m, +m] with a neutral midpoint at
 * zero (negative deltas toward red, positive toward blue); the linear ramp
 * maps |delta|/m from transparent to purple.  Endpoint and midpoint colors
 * are fixed here and mirrored by the committed fixture lookup table.
 */

export type Ramp = "diverging_red_blue" | "linear_purple";

export interface Rgba {
  r: number;
  g: number;
  b: number;
  a: number;
}

export const DIVERGING_RED: Rgba = { r: 178, g: 24, b: 43, a: 1 };
export const DIVERGING_NEUTRAL: Rgba = { r: 247, g: 247, b: 247, a: 1 };
export const DIVERGING_BLUE: Rgba = { r: 33, g: 102, b: 172, a: 1 };
export const LINEAR_PURPLE: Rgba = { r: 118, g: 42, b: 131, a: 1 };

function mix(from: Rgba, to: Rgba, t: number): Rgba {
  return {
    r: Math.round(from.r + (to.r - from.r) * t),
    g: Math.round(from.g + (to.g - from.g) * t),
    b: Math.round(from.b + (to.b - from.b) * t),
    a: from.a + (to.a - from.a) * t,
  };
}

export function rgbaString(c: Rgba): string {
  return `rgba(${c.r},${c.g},${c.b},${Number(c.a.toFixed(3))})`;
}

/**
 * Map a delta to a color.  `domainMax` is max |delta| over the current
 * report; values clamp at +-domainMax.  A non-positive domain (all deltas
 * zero) renders the neutral color.
 */
export function applyColorRamp(delta: number, ramp: Ramp, domainMax: number): Rgba {
  if (!(domainMax > 0)) {
    return ramp === "diverging_red_blue" ? DIVERGING_NEUTRAL : { ...LINEAR_PURPLE, a: 0 };
  }
  const t = Math.max(-1, Math.min(1, delta / domainMax));
  if (ramp === "diverging_red_blue") {
    if (t === 0) return DIVERGING_NEUTRAL;
    return t < 0
      ? mix(DIVERGING_NEUTRAL, DIVERGING_RED, -t)
      : mix(DIVERGING_NEUTRAL, DIVERGING_BLUE, t);
  }
  return { ...LINEAR_PURPLE, a: Math.abs(t) };
}

export function rampColor(delta: number, ramp: Ramp, domainMax: number): string {
  return rgbaString(applyColorRamp(delta, ramp, domainMax));
}
