/**
 * Typed client for the annotation service. The UI never computes geometry;
 * every rendered mesh comes from these endpoints.
 */

import type { AnnotationRecord, SliderValues } from "./state.js";

export interface ScanSummary {
  scan_id: string;
  display_name: string;
  annotated: boolean;
}

export interface MeshPayload {
  name: string;
  vertices: number[][];
  faces: number[][];
}

export interface TopologyPayload {
  vertex_count: number;
  margin_loop: number[];
  crease_loop: number[];
  brow_loop: number[];
  inner_mask: number[];
  outer_mask: number[];
  symmetry_map: number[];
  frontal_axis: number[];
  mirror_plane_normal: number[];
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = (await response.json()) as { detail?: unknown };
        if (body.detail !== undefined) detail = JSON.stringify(body.detail);
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(response.status, `${response.status}: ${detail}`);
    }
    return response;
  }

  async listScans(): Promise<ScanSummary[]> {
    return (await this.request("/scans")).json() as Promise<ScanSummary[]>;
  }

  async topology(): Promise<TopologyPayload> {
    return (await this.request("/topology")).json() as Promise<TopologyPayload>;
  }

  async scanMesh(scanId: string): Promise<MeshPayload> {
    return (await this.request(`/scans/${encodeURIComponent(scanId)}/scan-mesh`)).json() as Promise<MeshPayload>;
  }

  previewUrl(scanId: string, values: SliderValues): string {
    const params = new URLSearchParams({
      u: String(values.uGlobal),
      u_inner: String(values.uInner),
      u_outer: String(values.uOuter),
      sharpen: String(values.sharpenStrength),
      orient: String(values.sharpenOrientationDeg),
    });
    return `/scans/${encodeURIComponent(scanId)}/preview?${params.toString()}`;
  }

  async preview(scanId: string, values: SliderValues): Promise<MeshPayload> {
    return (await this.request(this.previewUrl(scanId, values))).json() as Promise<MeshPayload>;
  }

  /** Latest stored record, or null when the scan has none yet. */
  async getAnnotation(scanId: string): Promise<AnnotationRecord | null> {
    try {
      const response = await this.request(`/scans/${encodeURIComponent(scanId)}/annotation`);
      return (await response.json()) as AnnotationRecord;
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) return null;
      throw err;
    }
  }

  async putAnnotation(record: AnnotationRecord): Promise<AnnotationRecord> {
    const response = await this.request(`/scans/${encodeURIComponent(record.scan_id)}/annotation`, {
      method: "PUT",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(record),
    });
    return (await response.json()) as AnnotationRecord;
  }

  async exportRetopo(scanId: string): Promise<{ scan_id: string; path: string }> {
    const response = await this.request(`/scans/${encodeURIComponent(scanId)}/export`, { method: "POST" });
    return (await response.json()) as { scan_id: string; path: string };
  }
}
