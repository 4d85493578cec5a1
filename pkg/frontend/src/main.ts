/** Page wiring: scan list, sliders, debounced preview, save flow. */

import { ApiClient, ApiError } from "./api.js";
import { debounce, LatestRequestGate } from "./debounce.js";
import {
  clampValues,
  initSession,
  markSaved,
  recordFromValues,
  withSliderChange,
  type SessionState,
  type SliderValues,
} from "./state.js";
import { Viewer } from "./viewer.js";

const PREVIEW_DEBOUNCE_MS = 120;

const api = new ApiClient("");
const gate = new LatestRequestGate();

const el = {
  scanList: document.getElementById("scan-list") as HTMLUListElement,
  banner: document.getElementById("banner") as HTMLDivElement,
  save: document.getElementById("save") as HTMLButtonElement,
  retry: document.getElementById("retry") as HTMLButtonElement,
  exportBtn: document.getElementById("export") as HTMLButtonElement,
  annotator: document.getElementById("annotator") as HTMLInputElement,
  viewport: document.getElementById("viewport") as HTMLDivElement,
  sliders: {
    uGlobal: document.getElementById("u-global") as HTMLInputElement,
    uInner: document.getElementById("u-inner") as HTMLInputElement,
    uOuter: document.getElementById("u-outer") as HTMLInputElement,
    sharpenStrength: document.getElementById("sharpen-strength") as HTMLInputElement,
    sharpenOrientationDeg: document.getElementById("sharpen-orient") as HTMLInputElement,
  },
  readouts: {
    uGlobal: document.getElementById("u-global-value") as HTMLSpanElement,
    uInner: document.getElementById("u-inner-value") as HTMLSpanElement,
    uOuter: document.getElementById("u-outer-value") as HTMLSpanElement,
    sharpenStrength: document.getElementById("sharpen-strength-value") as HTMLSpanElement,
    sharpenOrientationDeg: document.getElementById("sharpen-orient-value") as HTMLSpanElement,
  },
};

const viewer = new Viewer(el.viewport);
let session: SessionState | null = null;

function showBanner(message: string, withRetry = false): void {
  el.banner.textContent = message;
  el.banner.classList.remove("hidden");
  el.retry.classList.toggle("hidden", !withRetry);
  if (message === "") el.banner.classList.add("hidden");
}

function clearBanner(): void {
  el.banner.classList.add("hidden");
  el.retry.classList.add("hidden");
}

function syncControls(): void {
  if (!session) return;
  for (const key of Object.keys(el.sliders) as (keyof SliderValues)[]) {
    el.sliders[key].value = String(session.values[key]);
    el.readouts[key].textContent = session.values[key].toFixed(3);
  }
  el.save.disabled = !session.dirty;
  el.exportBtn.disabled = session.lastSaved === null;
}

const schedulePreview = debounce((scanId: string, values: SliderValues) => {
  const ticket = gate.issue();
  api
    .preview(scanId, values)
    .then((payload) => {
      if (!gate.isCurrent(ticket)) return; // stale response: a newer request exists
      viewer.setOverlayMesh(payload);
    })
    .catch((err: unknown) => {
      if (!gate.isCurrent(ticket)) return;
      showBanner(`preview failed: ${String(err)}`);
    });
}, PREVIEW_DEBOUNCE_MS);

function requestPreview(): void {
  if (session) schedulePreview.call(session.scanId, session.values);
}

function onSliderInput(key: keyof SliderValues, raw: string): void {
  if (!session) return;
  session = withSliderChange(session, { [key]: Number(raw) } as Partial<SliderValues>);
  syncControls();
  requestPreview();
}

async function selectScan(scanId: string, urlValues: Partial<SliderValues> | null = null): Promise<void> {
  clearBanner();
  try {
    const [scanMesh, saved] = await Promise.all([api.scanMesh(scanId), api.getAnnotation(scanId)]);
    session = initSession(scanId, saved);
    if (urlValues) {
      const merged = { ...session.values, ...urlValues };
      const { values, clamped } = clampValues(merged);
      if (clamped) showBanner("some URL slider values were out of range and were clamped");
      session = withSliderChange(session, values);
    }
    viewer.setScanMesh(scanMesh);
    syncControls();
    requestPreview();
    for (const item of el.scanList.querySelectorAll("li")) {
      item.classList.toggle("selected", item.dataset.scanId === scanId);
    }
  } catch (err) {
    if (err instanceof ApiError && err.status === 404) {
      showBanner(`unknown scan ${scanId}; pick one from the list`);
    } else {
      showBanner(String(err));
    }
  }
}

async function save(): Promise<void> {
  if (!session || !session.dirty) return;
  const record = recordFromValues(session.scanId, session.values, el.annotator.value || "anonymous");
  try {
    const stored = await api.putAnnotation(record);
    session = markSaved(session, stored);
    clearBanner();
    syncControls();
    await refreshScanList();
  } catch (err) {
    // keep dirty state so the user can retry
    showBanner(`save failed: ${String(err)}`, true);
  }
}

async function refreshScanList(): Promise<void> {
  const scans = await api.listScans();
  el.scanList.replaceChildren(
    ...scans.map((scan) => {
      const item = document.createElement("li");
      item.dataset.scanId = scan.scan_id;
      item.textContent = `${scan.display_name}${scan.annotated ? " *" : ""}`;
      item.classList.toggle("selected", session?.scanId === scan.scan_id);
      item.addEventListener("click", () => void selectScan(scan.scan_id));
      return item;
    }),
  );
}

function readUrlState(): { scanId: string | null; values: Partial<SliderValues> } {
  const params = new URLSearchParams(window.location.search);
  const values: Partial<SliderValues> = {};
  const mapping: [string, keyof SliderValues][] = [
    ["u", "uGlobal"],
    ["u_inner", "uInner"],
    ["u_outer", "uOuter"],
    ["sharpen", "sharpenStrength"],
    ["orient", "sharpenOrientationDeg"],
  ];
  for (const [param, key] of mapping) {
    const raw = params.get(param);
    if (raw !== null) values[key] = Number(raw);
  }
  return { scanId: params.get("scan"), values };
}

async function boot(): Promise<void> {
  for (const key of Object.keys(el.sliders) as (keyof SliderValues)[]) {
    el.sliders[key].addEventListener("input", (event) => {
      onSliderInput(key, (event.target as HTMLInputElement).value);
    });
  }
  el.save.addEventListener("click", () => void save());
  el.retry.addEventListener("click", () => void save());
  el.exportBtn.addEventListener("click", () => {
    if (!session) return;
    api
      .exportRetopo(session.scanId)
      .then((res) => showBanner(`exported to ${res.path}`))
      .catch((err: unknown) => showBanner(`export failed: ${String(err)}`));
  });

  try {
    const topology = await api.topology();
    viewer.setTopology(topology);
    await refreshScanList();
    const { scanId, values } = readUrlState();
    const scans = await api.listScans();
    const first = scans[0];
    if (scanId !== null) {
      await selectScan(scanId, values);
    } else if (first !== undefined) {
      await selectScan(first.scan_id, values);
    } else {
      showBanner("no scans in the manifest");
    }
  } catch (err) {
    showBanner(`service unreachable: ${String(err)}`);
  }
}

void boot();
