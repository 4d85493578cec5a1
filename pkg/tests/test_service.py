import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from eyefold import SharpenParams, load_obj, path_interpolate, regional_interpolate, save_obj, sharpen_crease
from eyefold.annotations import AnnotationRecord, AnnotationStore, ScanEntry, save_scan_manifest
from eyefold.errors import SchemaError
from eyefold.service import create_app
from eyefold.templates import gen_templates


@pytest.fixture
def data_dir(tmp_path, template_bundle):
    """Service data directory with templates and three synthetic scans."""
    data = tmp_path / "data"
    data.mkdir()
    gen_templates(data, 16)
    from eyefold import load_template_set

    templates, _ = load_template_set(data / "templates.json")
    entries = []
    for i, u in enumerate((0.0, 0.5, 1.0)):
        mesh = path_interpolate(templates, u)
        path = data / f"scan_{i}.obj"
        save_obj(mesh, path)
        entries.append(ScanEntry(scan_id=f"scan_{i}", scan_mesh_path=path, display_name=f"Scan {i}"))
    save_scan_manifest(entries, data / "scans.json")
    return data


@pytest.fixture
def client(data_dir):
    return TestClient(create_app(data_dir))


RECORD = {
    "scan_id": "scan_0",
    "u_global": 0.3,
    "u_inner": 0.7,
    "u_outer": 0.2,
    "sharpen_strength": 0.4,
    "sharpen_orientation_deg": 10.0,
    "annotator": "alice",
    "timestamp": "2026-08-10T12:00:00+00:00",
}


class TestScanListing:
    def test_lists_all_scans_in_order(self, client):
        scans = client.get("/scans").json()
        assert [s["scan_id"] for s in scans] == ["scan_0", "scan_1", "scan_2"]

    def test_empty_manifest(self, tmp_path, data_dir):
        (data_dir / "scans.json").write_text("[]")
        empty_client = TestClient(create_app(data_dir))
        assert empty_client.get("/scans").json() == []

    def test_duplicate_scan_id_fails_startup(self, data_dir):
        doc = json.loads((data_dir / "scans.json").read_text())
        doc.append(doc[0])
        (data_dir / "scans.json").write_text(json.dumps(doc))
        with pytest.raises(SchemaError):
            create_app(data_dir)

    def test_missing_scan_mesh_fails_startup(self, data_dir):
        (data_dir / "scan_1.obj").unlink()
        with pytest.raises(SchemaError):
            create_app(data_dir)


class TestPreview:
    def test_all_zero_sliders_return_non_hooded(self, client, data_dir):
        from eyefold import load_template_set

        templates, _ = load_template_set(data_dir / "templates.json")
        payload = client.get("/scans/scan_0/preview", params={"u": 0.0, "sharpen": 0.0}).json()
        assert np.array_equal(np.asarray(payload["vertices"]), templates.non_hooded.vertices)

    def test_matches_direct_library_call(self, client, data_dir):
        from eyefold import load_template_set

        templates, topo = load_template_set(data_dir / "templates.json")
        params = {"u": 0.3, "u_inner": 0.7, "u_outer": 0.2, "sharpen": 0.4, "orient": 10.0}
        payload = client.get("/scans/scan_0/preview", params=params).json()
        expect = sharpen_crease(
            regional_interpolate(templates, topo, 0.3, 0.7, 0.2),
            topo,
            SharpenParams(strength=0.4, orientation_deg=10.0),
        )
        got = np.asarray(payload["vertices"])
        assert np.max(np.abs(got - expect.vertices)) <= 1e-12

    def test_preview_is_deterministic(self, client):
        params = {"u": 0.61, "u_inner": 0.2, "u_outer": 0.8, "sharpen": 0.5, "orient": -30.0}
        a = client.get("/scans/scan_1/preview", params=params).json()
        b = client.get("/scans/scan_1/preview", params=params).json()
        assert a == b

    def test_out_of_range_slider_rejected(self, client):
        assert client.get("/scans/scan_0/preview", params={"u": 1.5}).status_code == 422
        assert client.get("/scans/scan_0/preview", params={"u": 0.5, "orient": 95}).status_code == 422

    def test_unknown_scan(self, client):
        assert client.get("/scans/missing/preview", params={"u": 0.5}).status_code == 404

    def test_scan_mesh_payload(self, client, data_dir):
        payload = client.get("/scans/scan_1/scan-mesh").json()
        mesh = load_obj(data_dir / "scan_1.obj")
        assert np.array_equal(np.asarray(payload["vertices"]), mesh.vertices)
        assert np.array_equal(np.asarray(payload["faces"]), mesh.faces)

    def test_topology_payload(self, client, data_dir):
        doc = client.get("/topology").json()
        expect = json.loads((data_dir / "topology.json").read_text())
        assert doc == expect


class TestAnnotations:
    def test_save_and_read_back(self, client):
        saved = client.put("/scans/scan_0/annotation", json=RECORD)
        assert saved.status_code == 200
        read = client.get("/scans/scan_0/annotation")
        assert read.json() == saved.json() == RECORD

    def test_last_write_wins(self, client):
        client.put("/scans/scan_0/annotation", json=RECORD)
        second = dict(RECORD, u_global=0.9)
        client.put("/scans/scan_0/annotation", json=second)
        assert client.get("/scans/scan_0/annotation").json()["u_global"] == 0.9

    def test_out_of_range_rejected(self, client):
        bad = dict(RECORD, u_inner=-0.1)
        assert client.put("/scans/scan_0/annotation", json=bad).status_code == 422

    def test_mismatched_path_rejected(self, client):
        assert client.put("/scans/scan_1/annotation", json=RECORD).status_code == 422

    def test_unknown_scan(self, client):
        assert client.put("/scans/missing/annotation", json=dict(RECORD, scan_id="missing")).status_code == 404

    def test_no_annotation_is_404(self, client):
        assert client.get("/scans/scan_2/annotation").status_code == 404

    def test_survives_restart(self, client, data_dir):
        client.put("/scans/scan_0/annotation", json=RECORD)
        fresh = TestClient(create_app(data_dir))
        assert fresh.get("/scans/scan_0/annotation").json() == RECORD


class TestExport:
    def test_export_roundtrip_validates(self, client, data_dir, template_bundle):
        from eyefold import load_template_set, validate_topology

        client.put("/scans/scan_0/annotation", json=RECORD)
        result = client.post("/scans/scan_0/export")
        assert result.status_code == 200
        mesh = load_obj(result.json()["path"])
        _, topo = load_template_set(data_dir / "templates.json")
        assert validate_topology(mesh, topo) == []

    def test_export_without_annotation(self, client):
        assert client.post("/scans/scan_1/export").status_code == 409

    def test_export_twice_byte_identical(self, client):
        client.put("/scans/scan_0/annotation", json=RECORD)
        from pathlib import Path

        first = Path(client.post("/scans/scan_0/export").json()["path"]).read_bytes()
        second = Path(client.post("/scans/scan_0/export").json()["path"]).read_bytes()
        assert first == second


class TestStore:
    def test_append_and_latest(self, tmp_path):
        store = AnnotationStore(tmp_path / "log.ndjson")
        record = AnnotationRecord(scan_id="s", u_global=0.1, u_inner=0.2, u_outer=0.3)
        store.append(record)
        assert store.latest("s") == record
        assert store.latest("other") is None

    def test_replay_after_restart(self, tmp_path):
        path = tmp_path / "log.ndjson"
        store = AnnotationStore(path)
        store.append(AnnotationRecord(scan_id="s", u_global=0.1, u_inner=0.2, u_outer=0.3))
        store.append(AnnotationRecord(scan_id="s", u_global=0.9, u_inner=0.2, u_outer=0.3))
        again = AnnotationStore(path)
        assert again.latest("s").u_global == 0.9
        assert again.annotated_scan_ids() == ["s"]

    def test_corrupt_log_rejected(self, tmp_path):
        path = tmp_path / "log.ndjson"
        path.write_text('{"scan_id": "s", "u_global": 5.0, "u_inner": 0, "u_outer": 0}\n')
        with pytest.raises(SchemaError):
            AnnotationStore(path)
