/**
 * End-to-end round trip against the real annotation service.
 *
 * Spawns the Python service on a throwaway data directory, drives the same
 * api/state modules the page uses (set sliders, save, reload), and checks
 * that the rendered preview payload equals the command-line pipeline's
 * output for identical parameters to 1e-12 per coordinate.
 */

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "./api.js";
import { initSession, markSaved, recordFromValues, withSliderChange } from "./state.js";

const PYTHON = process.env.PYTHON ?? "python3";

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const server = createServer();
    server.once("error", reject);
    server.listen(0, "127.0.0.1", () => {
      const address = server.address();
      if (address === null || typeof address === "string") {
        reject(new Error("no port"));
        return;
      }
      server.close(() => resolve(address.port));
    });
  });
}

function runCli(args: string[]): void {
  const proc = spawnSync(PYTHON, ["-m", "eyefold.cli", ...args], { encoding: "utf-8" });
  if (proc.status !== 0) {
    throw new Error(`eyefold ${args[0]} failed: ${proc.stderr}`);
  }
}

function parseObjVertices(path: string): number[][] {
  const vertices: number[][] = [];
  for (const line of readFileSync(path, "utf-8").split("\n")) {
    if (line.startsWith("v ")) {
      const [, x, y, z] = line.split(" ");
      vertices.push([Number(x), Number(y), Number(z)]);
    }
  }
  return vertices;
}

let dataDir: string;
let workDir: string;
let service: ChildProcess | null = null;
let api: ApiClient;

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), "eyefold-ui-"));
  dataDir = join(workDir, "data");
  runCli(["gen-templates", "--out", dataDir, "--resolution", "12"]);
  writeFileSync(
    join(dataDir, "scans.json"),
    JSON.stringify([
      { scan_id: "scan_0", scan_mesh_path: "partially_hooded.obj", display_name: "Demo scan" },
    ]),
  );

  const port = await freePort();
  service = spawn(
    PYTHON,
    ["-m", "eyefold.cli", "serve", "--data-dir", dataDir, "--listen", "127.0.0.1", "--port", String(port)],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  api = new ApiClient(`http://127.0.0.1:${port}`);

  const deadline = Date.now() + 30_000;
  for (;;) {
    try {
      await api.listScans();
      break;
    } catch {
      if (Date.now() > deadline) throw new Error("service did not come up");
      await new Promise((r) => setTimeout(r, 200));
    }
  }
}, 60_000);

afterAll(() => {
  service?.kill();
  rmSync(workDir, { recursive: true, force: true });
});

describe("annotation round trip through the service", () => {
  const TARGET = {
    uGlobal: 0.3,
    uInner: 0.7,
    uOuter: 0.2,
    sharpenStrength: 0.4,
    sharpenOrientationDeg: 10,
  };

  it(
    "saves slider values and restores them identically on reload",
    async () => {
      // fresh scan: defaults, not dirty
      let session = initSession("scan_0", await api.getAnnotation("scan_0"));
      expect(session.lastSaved).toBeNull();
      expect(session.values.uGlobal).toBe(0.5);

      // user sets the sliders
      session = withSliderChange(session, TARGET);
      expect(session.dirty).toBe(true);

      // save through the same client the page uses
      const stored = await api.putAnnotation(
        recordFromValues(session.scanId, session.values, "it", "2026-08-10T15:00:00+00:00"),
      );
      session = markSaved(session, stored);
      expect(session.dirty).toBe(false);

      // reload the page: state rebuilt from the service
      const reloaded = initSession("scan_0", await api.getAnnotation("scan_0"));
      expect(reloaded.values).toEqual(TARGET);
      expect(reloaded.dirty).toBe(false);
    },
    30_000,
  );

  it(
    "preview payload equals the CLI output for the same parameters to 1e-12",
    async () => {
      const payload = await api.preview("scan_0", TARGET);

      const interpObj = join(workDir, "interp.obj");
      const sharpObj = join(workDir, "sharp.obj");
      runCli([
        "interp",
        "--templates",
        join(dataDir, "templates.json"),
        "--u",
        "0.3",
        "--u-inner",
        "0.7",
        "--u-outer",
        "0.2",
        "--out",
        interpObj,
      ]);
      runCli([
        "sharpen",
        "--mesh",
        interpObj,
        "--topology",
        join(dataDir, "topology.json"),
        "--strength",
        "0.4",
        "--orientation",
        "10",
        "--out",
        sharpObj,
      ]);
      const cliVertices = parseObjVertices(sharpObj);

      expect(payload.vertices.length).toBe(cliVertices.length);
      let worst = 0;
      for (let i = 0; i < cliVertices.length; i++) {
        for (let d = 0; d < 3; d++) {
          worst = Math.max(worst, Math.abs((payload.vertices[i]?.[d] ?? NaN) - (cliVertices[i]?.[d] ?? NaN)));
        }
      }
      expect(worst).toBeLessThanOrEqual(1e-12);
    },
    30_000,
  );

  it(
    "out-of-range slider values are rejected by the service",
    async () => {
      await expect(api.preview("scan_0", { ...TARGET, uGlobal: 1.5 })).rejects.toMatchObject({
        status: 422,
      });
    },
    30_000,
  );
});
