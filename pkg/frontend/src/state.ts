/**
 * Session state for the annotation page.
 *
 * All transitions are pure functions so the dirty-flag invariant is easy to
 * test: `dirty` is true exactly when the current slider values differ from
 * the last-saved record.
 */

export interface SliderValues {
  uGlobal: number;
  uInner: number;
  uOuter: number;
  sharpenStrength: number;
  sharpenOrientationDeg: number;
}

export interface AnnotationRecord {
  scan_id: string;
  u_global: number;
  u_inner: number;
  u_outer: number;
  sharpen_strength: number;
  sharpen_orientation_deg: number;
  annotator: string;
  timestamp: string;
}

export interface SessionState {
  scanId: string;
  values: SliderValues;
  lastSaved: AnnotationRecord | null;
  dirty: boolean;
}

/** Defaults for a scan that has never been annotated. */
export const DEFAULT_VALUES: SliderValues = {
  uGlobal: 0.5,
  uInner: 0.5,
  uOuter: 0.5,
  sharpenStrength: 0,
  sharpenOrientationDeg: 0,
};

const RANGES: Record<keyof SliderValues, [number, number]> = {
  uGlobal: [0, 1],
  uInner: [0, 1],
  uOuter: [0, 1],
  sharpenStrength: [0, 1],
  sharpenOrientationDeg: [-90, 90],
};

export interface ClampResult {
  values: SliderValues;
  clamped: boolean;
}

/** Clamp every slider into its documented range; reports whether anything moved. */
export function clampValues(values: SliderValues): ClampResult {
  let clamped = false;
  const out = { ...values };
  for (const key of Object.keys(RANGES) as (keyof SliderValues)[]) {
    const [lo, hi] = RANGES[key];
    const raw = values[key];
    const safe = Number.isFinite(raw) ? Math.min(hi, Math.max(lo, raw)) : DEFAULT_VALUES[key];
    if (safe !== raw) clamped = true;
    out[key] = safe;
  }
  return { values: out, clamped };
}

export function valuesFromRecord(record: AnnotationRecord): SliderValues {
  return {
    uGlobal: record.u_global,
    uInner: record.u_inner,
    uOuter: record.u_outer,
    sharpenStrength: record.sharpen_strength,
    sharpenOrientationDeg: record.sharpen_orientation_deg,
  };
}

export function recordFromValues(
  scanId: string,
  values: SliderValues,
  annotator: string,
  timestamp?: string,
): AnnotationRecord {
  return {
    scan_id: scanId,
    u_global: values.uGlobal,
    u_inner: values.uInner,
    u_outer: values.uOuter,
    sharpen_strength: values.sharpenStrength,
    sharpen_orientation_deg: values.sharpenOrientationDeg,
    annotator,
    timestamp: timestamp ?? new Date().toISOString(),
  };
}

export function sameValues(a: SliderValues, b: SliderValues): boolean {
  return (
    a.uGlobal === b.uGlobal &&
    a.uInner === b.uInner &&
    a.uOuter === b.uOuter &&
    a.sharpenStrength === b.sharpenStrength &&
    a.sharpenOrientationDeg === b.sharpenOrientationDeg
  );
}

/** Fresh state for a scan: saved values when they exist, defaults otherwise. */
export function initSession(scanId: string, saved: AnnotationRecord | null): SessionState {
  return {
    scanId,
    values: saved ? valuesFromRecord(saved) : { ...DEFAULT_VALUES },
    lastSaved: saved,
    dirty: false,
  };
}

export function withSliderChange(state: SessionState, patch: Partial<SliderValues>): SessionState {
  const values = clampValues({ ...state.values, ...patch }).values;
  const dirty = state.lastSaved === null || !sameValues(values, valuesFromRecord(state.lastSaved));
  return { ...state, values, dirty };
}

export function markSaved(state: SessionState, record: AnnotationRecord): SessionState {
  return { ...state, values: valuesFromRecord(record), lastSaved: record, dirty: false };
}
