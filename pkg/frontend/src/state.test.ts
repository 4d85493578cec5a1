import { describe, expect, it } from "vitest";

import {
  clampValues,
  DEFAULT_VALUES,
  initSession,
  markSaved,
  recordFromValues,
  sameValues,
  valuesFromRecord,
  withSliderChange,
  type AnnotationRecord,
} from "./state.js";

const RECORD: AnnotationRecord = {
  scan_id: "scan_0",
  u_global: 0.3,
  u_inner: 0.7,
  u_outer: 0.2,
  sharpen_strength: 0.4,
  sharpen_orientation_deg: 10,
  annotator: "alice",
  timestamp: "2026-08-10T12:00:00+00:00",
};

describe("initSession", () => {
  it("uses saved values when an annotation exists", () => {
    const state = initSession("scan_0", RECORD);
    expect(state.values).toEqual({
      uGlobal: 0.3,
      uInner: 0.7,
      uOuter: 0.2,
      sharpenStrength: 0.4,
      sharpenOrientationDeg: 10,
    });
    expect(state.dirty).toBe(false);
  });

  it("falls back to documented defaults for unannotated scans", () => {
    const state = initSession("scan_1", null);
    expect(state.values).toEqual(DEFAULT_VALUES);
    expect(state.values.uGlobal).toBe(0.5);
    expect(state.values.sharpenStrength).toBe(0);
    expect(state.dirty).toBe(false);
  });
});

describe("dirty flag", () => {
  it("turns on when values differ from the saved record and off when they return", () => {
    let state = initSession("scan_0", RECORD);
    state = withSliderChange(state, { uGlobal: 0.9 });
    expect(state.dirty).toBe(true);
    state = withSliderChange(state, { uGlobal: 0.3 });
    expect(state.dirty).toBe(false);
  });

  it("clears after a successful save", () => {
    let state = initSession("scan_0", RECORD);
    state = withSliderChange(state, { sharpenStrength: 0.8 });
    const stored = recordFromValues("scan_0", state.values, "alice", "2026-08-10T13:00:00+00:00");
    state = markSaved(state, stored);
    expect(state.dirty).toBe(false);
    expect(state.lastSaved).toBe(stored);
  });
});

describe("clamping", () => {
  it("clamps out-of-range values and reports it", () => {
    const { values, clamped } = clampValues({
      uGlobal: 1.7,
      uInner: -0.4,
      uOuter: 0.5,
      sharpenStrength: 0.2,
      sharpenOrientationDeg: 140,
    });
    expect(clamped).toBe(true);
    expect(values).toEqual({
      uGlobal: 1,
      uInner: 0,
      uOuter: 0.5,
      sharpenStrength: 0.2,
      sharpenOrientationDeg: 90,
    });
  });

  it("replaces non-finite values with defaults", () => {
    const { values, clamped } = clampValues({ ...DEFAULT_VALUES, uInner: Number.NaN });
    expect(clamped).toBe(true);
    expect(values.uInner).toBe(DEFAULT_VALUES.uInner);
  });

  it("reports no clamping for in-range values", () => {
    expect(clampValues(DEFAULT_VALUES).clamped).toBe(false);
  });
});

describe("record round trip", () => {
  it("values -> record -> values is the identity", () => {
    const values = valuesFromRecord(RECORD);
    const record = recordFromValues("scan_0", values, "alice", RECORD.timestamp);
    expect(record).toEqual(RECORD);
    expect(sameValues(valuesFromRecord(record), values)).toBe(true);
  });
});
