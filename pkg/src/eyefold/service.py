"""HTTP annotation service: scans, slider-driven previews, stored records.

The service recomputes every preview from the template set on demand (no
candidate cache), so a preview for given slider values is always
bit-identical to the batch pipeline and CLI computing the same parameters.

Data directory layout::

    data_dir/
      templates.json      template-set manifest (with topology path)
      scans.json          scan manifest
      annotations.ndjson  append-only annotation log (created on first save)
      exports/            final retopo OBJ files

Endpoints: ``GET /scans``, ``GET /topology``, ``GET /scans/{id}/scan-mesh``,
``GET /scans/{id}/preview``, ``PUT/GET /scans/{id}/annotation``,
``POST /scans/{id}/export``.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles

from .annotations import AnnotationRecord, AnnotationStore, ScanEntry, load_scan_manifest
from .blendshape import TemplateSet, load_template_set
from .errors import EyefoldError
from .mesh import Mesh, TopologyDescriptor, load_obj, save_obj, topology_to_dict
from .pipeline import annotated_retopo


class ServiceState:
    """Loaded manifests plus the annotation store for one data directory."""

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        templates_manifest = self.data_dir / "templates.json"
        scans_manifest = self.data_dir / "scans.json"
        if not templates_manifest.exists():
            raise FileNotFoundError(f"no template manifest at {templates_manifest}")
        if not scans_manifest.exists():
            raise FileNotFoundError(f"no scan manifest at {scans_manifest}")
        self.templates: TemplateSet
        self.topology: TopologyDescriptor
        self.templates, self.topology = load_template_set(templates_manifest)
        self.scans: dict[str, ScanEntry] = {
            entry.scan_id: entry for entry in load_scan_manifest(scans_manifest)
        }
        self.store = AnnotationStore(self.data_dir / "annotations.ndjson")
        self.export_dir = self.data_dir / "exports"

    def scan(self, scan_id: str) -> ScanEntry:
        if scan_id not in self.scans:
            raise HTTPException(status_code=404, detail=f"unknown scan id {scan_id!r}")
        return self.scans[scan_id]


def mesh_payload(mesh: Mesh) -> dict:
    return {
        "name": mesh.name,
        "vertices": mesh.vertices.tolist(),
        "faces": mesh.faces.tolist(),
    }


def create_app(data_dir: str | Path, ui_dir: str | Path | None = None) -> FastAPI:
    """Build the FastAPI app for one data directory.

    ``ui_dir`` optionally mounts a built browser UI at the web root.
    """
    state = ServiceState(data_dir)
    app = FastAPI(title="eyefold annotation service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.eyefold = state

    @app.get("/scans")
    def list_scans() -> list[dict]:
        return [
            {
                "scan_id": entry.scan_id,
                "display_name": entry.display_name,
                "annotated": state.store.latest(entry.scan_id) is not None,
            }
            for entry in state.scans.values()
        ]

    @app.get("/topology")
    def get_topology() -> dict:
        return topology_to_dict(state.topology)

    @app.get("/scans/{scan_id}/scan-mesh")
    def get_scan_mesh(scan_id: str) -> dict:
        entry = state.scan(scan_id)
        return mesh_payload(load_obj(entry.scan_mesh_path))

    @app.get("/scans/{scan_id}/preview")
    def get_preview(
        scan_id: str,
        u: float = Query(ge=0.0, le=1.0),
        u_inner: float | None = Query(default=None, ge=0.0, le=1.0),
        u_outer: float | None = Query(default=None, ge=0.0, le=1.0),
        sharpen: float = Query(default=0.0, ge=0.0, le=1.0),
        orient: float = Query(default=0.0, ge=-90.0, le=90.0),
    ) -> dict:
        state.scan(scan_id)
        record = AnnotationRecord(
            scan_id=scan_id,
            u_global=u,
            u_inner=u if u_inner is None else u_inner,
            u_outer=u if u_outer is None else u_outer,
            sharpen_strength=sharpen,
            sharpen_orientation_deg=orient,
        )
        return mesh_payload(annotated_retopo(state.templates, state.topology, record))

    @app.put("/scans/{scan_id}/annotation")
    def put_annotation(scan_id: str, record: AnnotationRecord) -> AnnotationRecord:
        state.scan(scan_id)
        if record.scan_id != scan_id:
            raise HTTPException(
                status_code=422,
                detail=f"record scan_id {record.scan_id!r} does not match path {scan_id!r}",
            )
        return state.store.append(record)

    @app.get("/scans/{scan_id}/annotation")
    def get_annotation(scan_id: str) -> AnnotationRecord:
        state.scan(scan_id)
        record = state.store.latest(scan_id)
        if record is None:
            raise HTTPException(status_code=404, detail=f"scan {scan_id!r} has no annotation")
        return record

    @app.post("/scans/{scan_id}/export")
    def export_retopo(scan_id: str) -> dict:
        state.scan(scan_id)
        record = state.store.latest(scan_id)
        if record is None:
            raise HTTPException(status_code=409, detail=f"scan {scan_id!r} has no annotation")
        try:
            mesh = annotated_retopo(state.templates, state.topology, record)
        except EyefoldError as exc:
            raise HTTPException(status_code=500, detail=str(exc)) from exc
        state.export_dir.mkdir(parents=True, exist_ok=True)
        path = state.export_dir / f"{scan_id}_retopo.obj"
        save_obj(mesh, path)
        return {"scan_id": scan_id, "path": str(path)}

    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
