"""Acceptance gate: every criterion at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -s`` to see one PASS/FAIL line
per criterion.
"""

import contextlib
import time

import numpy as np

from eyefold import (
    SharpenParams,
    crease_adjacent_vertices,
    error_cdf,
    generate_candidates,
    gmm_fit,
    gmm_sample,
    hoodedness_profile,
    load_obj,
    load_template_set,
    mirror_augment_dataset,
    mirror_mesh,
    path_interpolate,
    profile_from_projected,
    profile_stats,
    projected_loop_curves,
    save_obj,
    sharpen_crease,
    validate_topology,
)
from eyefold.annotations import AnnotationRecord, AnnotationStore, ScanEntry, save_scan_manifest
from eyefold.metric import HoodednessProfile
from eyefold.pipeline import PipelineConfig, run_batch_pipeline
from eyefold.stats import diversity_report
from eyefold.tables import read_profiles_csv
from eyefold.templates import gen_templates


@contextlib.contextmanager
def criterion(num: int, description: str):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {num:2d} FAIL  {description}")
        raise
    else:
        print(f"ACCEPTANCE {num:2d} PASS  {description}")


def test_criterion_1_metric_endpoints(line_eyelid):
    with criterion(1, "h=0 at the brow and h=1 at the margin, K=32, tol 1e-9, <1s"):
        start = time.perf_counter()
        mesh_zero, topo = line_eyelid(brow_y=1.0, crease_y=1.0, margin_y=0.0)
        profile_zero = hoodedness_profile(mesh_zero, topo, 32)
        mesh_one, topo = line_eyelid(brow_y=1.0, crease_y=0.0, margin_y=0.0)
        profile_one = hoodedness_profile(mesh_one, topo, 32)
        elapsed = time.perf_counter() - start
        assert profile_zero.sample_count == 32
        assert np.max(np.abs(profile_zero.h_values - 0.0)) <= 1e-9
        assert np.max(np.abs(profile_one.h_values - 1.0)) <= 1e-9
        assert elapsed < 1.0


def test_criterion_2_over_margin(line_eyelid):
    with criterion(2, "crease 10% past the margin gives h=1.1 +/- 1e-9, <1s"):
        start = time.perf_counter()
        mesh, topo = line_eyelid(brow_y=1.0, crease_y=-0.1, margin_y=0.0)
        profile = hoodedness_profile(mesh, topo, 32)
        elapsed = time.perf_counter() - start
        assert np.max(np.abs(profile.h_values - 1.1)) <= 1e-9
        assert elapsed < 1.0


def test_criterion_3_similarity_invariance(template_bundle):
    with criterion(3, "100 random 2D similarity transforms leave every h(t_k) within 1e-9"):
        margin, crease, brow = projected_loop_curves(
            template_bundle.templates.hooded_epicanthal, template_bundle.topo, 32
        )
        baseline = profile_from_projected(margin, crease, brow).h_values
        rng = np.random.default_rng(2026)
        for _ in range(100):
            theta = rng.uniform(-np.pi, np.pi)
            scale = rng.uniform(0.2, 5.0)
            rot = scale * np.array(
                [[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]]
            )
            shift = rng.uniform(-10.0, 10.0, size=2)
            transformed = profile_from_projected(
                margin @ rot.T + shift, crease @ rot.T + shift, brow @ rot.T + shift
            ).h_values
            assert np.max(np.abs(transformed - baseline)) <= 1e-9


def test_criterion_4_candidate_structure(template_bundle):
    with criterion(4, "20 candidates at spacing 1/19, bit-equal endpoints, knot between 9 and 10"):
        ts = template_bundle.templates
        candidates = generate_candidates(ts, 20)
        assert len(candidates) == 20
        for k, mesh in enumerate(candidates):
            expect = path_interpolate(ts, k / 19)
            assert np.array_equal(mesh.vertices, expect.vertices)
        assert np.array_equal(candidates[0].vertices, ts.non_hooded.vertices)
        assert np.array_equal(candidates[19].vertices, ts.hooded_epicanthal.vertices)
        assert not np.array_equal(candidates[10].vertices, ts.partially_hooded.vertices)
        triple = generate_candidates(ts, 3)
        assert np.array_equal(triple[0].vertices, ts.non_hooded.vertices)
        assert np.array_equal(triple[1].vertices, ts.partially_hooded.vertices)
        assert np.array_equal(triple[2].vertices, ts.hooded_epicanthal.vertices)


def test_criterion_5_sharpening_monotonicity(template_bundle):
    with criterion(5, "pinch distance strictly decreases over strengths 0..1, crease fixed bit-exactly"):
        topo = template_bundle.topo
        for mesh in (
            template_bundle.templates.non_hooded,
            template_bundle.templates.partially_hooded,
            template_bundle.templates.hooded_epicanthal,
        ):
            adjacent = crease_adjacent_vertices(mesh, topo)
            means = []
            for strength in np.arange(0.0, 1.01, 0.1):
                out = sharpen_crease(mesh, topo, SharpenParams(strength=float(strength)))
                if strength == 0.0:
                    assert np.max(np.abs(out.vertices - mesh.vertices)) <= 1e-12
                assert np.array_equal(out.vertices[topo.crease_loop], mesh.vertices[topo.crease_loop])
                gaps = np.sqrt(
                    np.sum(
                        (out.vertices[adjacent][:, None, :] - out.vertices[topo.crease_loop][None, :, :]) ** 2,
                        axis=2,
                    ).min(axis=1)
                )
                means.append(float(gaps.mean()))
            assert all(later < earlier for earlier, later in zip(means, means[1:]))


def test_criterion_6_mirror_augmentation(template_bundle, perturbed_meshes):
    with criterion(6, "M meshes become 2M; involution within 1e-12; eye profiles swap within 1e-9"):
        topo = template_bundle.topo
        meshes = perturbed_meshes(5)
        augmented = mirror_augment_dataset(meshes, topo)
        assert len(augmented) == 2 * len(meshes)
        for mesh in meshes:
            twice = mirror_mesh(mirror_mesh(mesh, topo), topo)
            assert np.max(np.abs(twice.vertices - mesh.vertices)) <= 1e-12
            mirrored = mirror_mesh(mesh, topo)
            left_of_mirror = hoodedness_profile(mirrored, topo, 32).h_values
            right_of_input = hoodedness_profile(mesh, topo.mirrored(), 32).h_values
            assert np.max(np.abs(left_of_mirror - right_of_input)) <= 1e-9


def test_criterion_7_gmm_recovery():
    with criterion(7, "2-component recovery within 0.05, monotone EM, 3-sigma sampling bound, <5s"):
        start = time.perf_counter()
        rng = np.random.default_rng(1234)
        true_centers = np.array([[0.0, 0.0], [10.0, 0.0]])
        data = np.concatenate(
            [
                rng.normal(true_centers[0], 0.5, size=(1400, 2)),
                rng.normal(true_centers[1], 0.5, size=(600, 2)),
            ]
        )
        model = gmm_fit(data, 2, seed=42)

        order = np.argmin(
            np.linalg.norm(model.means[:, None, :] - true_centers[None, :, :], axis=2), axis=1
        )
        assert sorted(order.tolist()) == [0, 1]
        for fitted_mean, j in zip(model.means, order):
            assert np.linalg.norm(fitted_mean - true_centers[j]) < 0.05

        assert model.ll_trace.size >= 2
        assert np.all(np.diff(model.ll_trace) >= 0.0)

        samples = gmm_sample(model, 1000, seed=7)
        assign = np.argmin(
            np.linalg.norm(samples[:, None, :] - model.means[None, :, :], axis=2), axis=1
        )
        for j in range(2):
            expected = 1000 * model.weights[j]
            sigma = np.sqrt(1000 * model.weights[j] * (1.0 - model.weights[j]))
            assert abs(np.sum(assign == j) - expected) <= 3.0 * sigma
        assert time.perf_counter() - start < 5.0


def test_criterion_8_diversity_ordering():
    with criterion(8, "doubling deviations doubles std at all t within 1e-9 and sets the flag"):
        rng = np.random.default_rng(99)
        t = np.linspace(0.0, 1.0, 32)
        matrix = rng.uniform(0.3, 0.7, size=(50, 32))
        mean = matrix.mean(axis=0)
        doubled = mean + 2.0 * (matrix - mean)
        set_a = [HoodednessProfile(t_samples=t, h_values=row) for row in matrix]
        set_b = [HoodednessProfile(t_samples=t, h_values=row) for row in doubled]
        report = diversity_report(profile_stats(set_a), profile_stats(set_b))
        assert np.max(np.abs(report.std_b - 2.0 * report.std_a)) <= 1e-9
        assert report.all_points_greater is True


def test_criterion_9_cdf_against_oracle():
    with criterion(9, "CDFs match an O(N^2) counting oracle exactly on 100 random error lists"):
        rng = np.random.default_rng(7)
        for _ in range(100):
            n = int(rng.integers(1, 60))
            errors = np.round(rng.uniform(0.0, 0.5, n), 2)
            cdf = error_cdf(errors)
            for thr, frac in zip(cdf.thresholds, cdf.cumulative_fraction):
                count = sum(1 for e in errors if e <= thr)  # brute-force count
                assert frac == count / n
            assert np.all(np.diff(cdf.cumulative_fraction) >= 0.0)
            assert cdf.cumulative_fraction[-1] == 1.0


def test_criterion_10_pipeline_end_to_end(tmp_path):
    with criterion(10, "10 annotated scans -> 20 validated meshes + 640-row profile CSV, twice, <10s"):
        start = time.perf_counter()
        data = tmp_path / "data"
        data.mkdir()
        manifest_path = gen_templates(data, 24)
        templates, topo = load_template_set(manifest_path)

        entries = []
        store = AnnotationStore(data / "annotations.ndjson")
        rng = np.random.default_rng(11)
        for i in range(10):
            u = i / 9
            scan_path = data / f"scan_{i:02d}.obj"
            save_obj(path_interpolate(templates, u), scan_path)
            entries.append(ScanEntry(scan_id=f"scan_{i:02d}", scan_mesh_path=scan_path, display_name=f"scan {i}"))
            store.append(
                AnnotationRecord(
                    scan_id=f"scan_{i:02d}",
                    u_global=round(float(rng.uniform(0, 1)), 3),
                    u_inner=round(float(rng.uniform(0, 1)), 3),
                    u_outer=round(float(rng.uniform(0, 1)), 3),
                    sharpen_strength=round(float(rng.uniform(0, 1)), 3),
                    sharpen_orientation_deg=round(float(rng.uniform(-90, 90)), 2),
                )
            )
        save_scan_manifest(entries, data / "scans.json")

        manifests = []
        for run in ("run1", "run2"):
            config = PipelineConfig(
                template_manifest=manifest_path,
                scan_manifest=data / "scans.json",
                annotation_log=data / "annotations.ndjson",
                output_dir=tmp_path / run,
                k=32,
                mirror_augment=True,
            )
            manifests.append(run_batch_pipeline(config))

        assert manifests[0] == manifests[1]
        assert len(manifests[0]["outputs"]) == 20
        for out in manifests[0]["outputs"]:
            mesh = load_obj(tmp_path / "run1" / out["path"])
            assert validate_topology(mesh, topo) == []
            first = (tmp_path / "run1" / out["path"]).read_bytes()
            second = (tmp_path / "run2" / out["path"]).read_bytes()
            assert first == second

        profiles = read_profiles_csv(tmp_path / "run1" / "profiles.csv")
        assert len(profiles) == 20
        assert all(p.sample_count == 32 for p in profiles.values())
        rows = (tmp_path / "run1" / "profiles.csv").read_text().strip().splitlines()
        assert len(rows) == 20 * 32 + 1
        assert (tmp_path / "run1" / "profiles.csv").read_bytes() == (
            tmp_path / "run2" / "profiles.csv"
        ).read_bytes()
        assert time.perf_counter() - start < 10.0
