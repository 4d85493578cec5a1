"""CSV readers and writers for the toolkit's tabular interchange formats.

All floats are written with shortest round-trip formatting so files are
byte-deterministic and reload to the exact same values.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import SchemaError
from .metric import ErrorCdf, GroupErrorRow, HoodednessProfile
from .stats import DiversityReport, ProfileStats


def _fmt(x: float) -> str:
    return repr(float(x))


def _open_reader(path: str | Path, expected_header: Sequence[str]):
    fh = open(path, "r", encoding="utf-8", newline="")
    reader = csv.reader(fh)
    header = next(reader, None)
    if header != list(expected_header):
        fh.close()
        raise SchemaError(f"{path}: expected header {','.join(expected_header)}, got {header}")
    return fh, reader


def write_profiles_csv(profiles: Iterable[HoodednessProfile], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["mesh_id", "t", "h"])
        for profile in profiles:
            for t, h in zip(profile.t_samples, profile.h_values):
                writer.writerow([profile.mesh_id, _fmt(t), _fmt(h)])


def read_profiles_csv(path: str | Path) -> dict[str, HoodednessProfile]:
    """Profiles keyed by mesh id, in file order."""
    fh, reader = _open_reader(path, ["mesh_id", "t", "h"])
    rows: dict[str, list[tuple[float, float]]] = {}
    with fh:
        for row in reader:
            if len(row) != 3:
                raise SchemaError(f"{path}: malformed profile row {row}")
            rows.setdefault(row[0], []).append((float(row[1]), float(row[2])))
    return {
        mesh_id: HoodednessProfile(
            t_samples=np.array([t for t, _ in samples]),
            h_values=np.array([h for _, h in samples]),
            mesh_id=mesh_id,
        )
        for mesh_id, samples in rows.items()
    }


def write_errors_csv(errors: dict[str, float], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["mesh_id", "error"])
        for mesh_id in sorted(errors):
            writer.writerow([mesh_id, _fmt(errors[mesh_id])])


def read_errors_csv(path: str | Path) -> dict[str, float]:
    fh, reader = _open_reader(path, ["mesh_id", "error"])
    with fh:
        return {row[0]: float(row[1]) for row in reader}


def read_metadata_csv(path: str | Path) -> dict[str, str]:
    fh, reader = _open_reader(path, ["mesh_id", "group"])
    with fh:
        return {row[0]: row[1] for row in reader}


def write_cdf_csv(cdf: ErrorCdf, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["threshold", "cumulative_fraction"])
        for thr, frac in zip(cdf.thresholds, cdf.cumulative_fraction):
            writer.writerow([_fmt(thr), _fmt(frac)])


def write_group_errors_csv(rows: Sequence[GroupErrorRow], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["group", "mean_error", "count"])
        for row in rows:
            writer.writerow([row.label, _fmt(row.mean_error), row.count])


def write_profile_stats_csv(stats: ProfileStats, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "mean", "std"])
        for t, m, s in zip(stats.t_samples, stats.mean, stats.std):
            writer.writerow([_fmt(t), _fmt(m), _fmt(s)])


def read_profile_stats_csv(path: str | Path) -> ProfileStats:
    fh, reader = _open_reader(path, ["t", "mean", "std"])
    with fh:
        rows = [(float(t), float(m), float(s)) for t, m, s in reader]
    if not rows:
        raise SchemaError(f"{path}: empty stats table")
    return ProfileStats(
        t_samples=np.array([r[0] for r in rows]),
        mean=np.array([r[1] for r in rows]),
        std=np.array([r[2] for r in rows]),
    )


def write_diversity_csv(report: DiversityReport, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "mean_a", "std_a", "mean_b", "std_b", "std_delta"])
        for i in range(report.t_samples.size):
            writer.writerow(
                [
                    _fmt(report.t_samples[i]),
                    _fmt(report.mean_a[i]),
                    _fmt(report.std_a[i]),
                    _fmt(report.mean_b[i]),
                    _fmt(report.std_b[i]),
                    _fmt(report.std_delta[i]),
                ]
            )


def write_matrix_csv(matrix: np.ndarray, path: str | Path) -> None:
    """Headerless numeric matrix, one row per line."""
    matrix = np.asarray(matrix, dtype=np.float64)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        for row in matrix:
            writer.writerow([_fmt(x) for x in row])


def read_matrix_csv(path: str | Path) -> np.ndarray:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = [[float(x) for x in row] for row in csv.reader(fh) if row]
    if not rows:
        raise SchemaError(f"{path}: empty matrix")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise SchemaError(f"{path}: ragged matrix rows")
    return np.asarray(rows, dtype=np.float64)
