"""Quantitative eyelid-shape metric and its evaluation statistics.

The hoodedness of an eyelid at lateral position ``t`` (0 = temporal/outer
end, 1 = nasal/inner end) measures how far down the brow-to-margin span the
eyelid crease sits. With the margin, crease, and brow feature curves
resampled by arc length and orthographically projected to the frontal
plane, define per sample::

    v(t) = margin(t) - brow(t)
    h(t) = |(crease(t) - brow(t)) . v(t)| / |v(t)|^2

which is the magnitude of the scalar projection of the brow-to-crease
vector onto the span, as a fraction of the span. So ``h = 0`` is the brow
line, ``h = 1`` the eyelid margin, and ``h > 1`` occurs where the fold
passes in front of the margin. ``h`` is invariant under 2D similarity
transforms of the projected curves.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    DegenerateCurve,
    DegenerateFrame,
    DomainError,
    EmptyInput,
    MissingMetadata,
    SampleMismatch,
)
from .mesh import Mesh, TopologyDescriptor, extract_loop_curve

DEFAULT_PROFILE_SAMPLES = 32
_SPAN_EPS = 1e-9


@dataclass(frozen=True)
class HoodednessProfile:
    """Sampled hoodedness values over t in [0, 1] for one eyelid."""

    t_samples: np.ndarray
    h_values: np.ndarray
    mesh_id: str = ""

    def __post_init__(self):
        t = np.asarray(self.t_samples, dtype=np.float64)
        h = np.asarray(self.h_values, dtype=np.float64)
        if t.ndim != 1 or t.size < 2 or t.shape != h.shape:
            raise DomainError("profile needs matching 1D t/h arrays with at least 2 samples")
        if t[0] != 0.0 or t[-1] != 1.0 or np.any(np.diff(t) <= 0):
            raise DomainError("t_samples must increase strictly from 0 to 1")
        if not np.isfinite(h).all() or h.min() < 0.0:
            raise DomainError("h values must be finite and nonnegative")
        t.setflags(write=False)
        h.setflags(write=False)
        object.__setattr__(self, "t_samples", t)
        object.__setattr__(self, "h_values", h)

    @property
    def sample_count(self) -> int:
        return self.t_samples.size


@dataclass(frozen=True)
class ShapeError:
    """Mean absolute hoodedness difference between two profiles."""

    value: float
    mesh_id_a: str = ""
    mesh_id_b: str = ""


@dataclass(frozen=True)
class ErrorCdf:
    """Empirical cumulative distribution of shape errors."""

    thresholds: np.ndarray
    cumulative_fraction: np.ndarray

    def __post_init__(self):
        thr = np.asarray(self.thresholds, dtype=np.float64)
        frac = np.asarray(self.cumulative_fraction, dtype=np.float64)
        if thr.shape != frac.shape or thr.ndim != 1 or thr.size == 0:
            raise DomainError("thresholds and fractions must be matching nonempty 1D arrays")
        if np.any(np.diff(thr) < 0) or np.any(np.diff(frac) < 0):
            raise DomainError("CDF must be sorted and nondecreasing")
        if frac[-1] != 1.0:
            raise DomainError("CDF must terminate at exactly 1.0")
        thr.setflags(write=False)
        frac.setflags(write=False)
        object.__setattr__(self, "thresholds", thr)
        object.__setattr__(self, "cumulative_fraction", frac)


@dataclass(frozen=True)
class GroupErrorRow:
    label: str
    mean_error: float
    count: int


def resample_by_arclength(curve: np.ndarray, k: int) -> np.ndarray:
    """Resample a polyline to ``k`` points uniformly spaced in arc length.

    Works for ``(N, 2)`` and ``(N, 3)`` polylines. Points land at arc
    lengths ``i * L / (k - 1)`` with linear interpolation inside segments;
    the endpoints are preserved exactly.
    """
    pts = np.asarray(curve, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise DomainError(f"curve must be (N>=2, d), got {pts.shape}")
    if k < 2:
        raise DomainError(f"need at least 2 samples, got {k}")
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    total = s[-1]
    if total <= 0.0:
        raise DegenerateCurve("polyline has zero total arc length")
    targets = np.linspace(0.0, total, k)
    out = np.column_stack([np.interp(targets, s, pts[:, d]) for d in range(pts.shape[1])])
    out[0] = pts[0]
    out[-1] = pts[-1]
    return out


def _projection_basis(axis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic right-handed 2D basis of the plane orthogonal to ``axis``.

    Uses the canonical up vector (0, 1, 0) unless the axis is nearly
    parallel to it, in which case (0, 0, 1) is used; ``e1 x e2 = axis``.
    The default frontal axis (0, 0, 1) yields e1=(1,0,0), e2=(0,1,0), i.e.
    plain (x, y) coordinates.
    """
    up = np.array([0.0, 1.0, 0.0])
    if abs(float(np.dot(up, axis))) > 0.9:
        up = np.array([0.0, 0.0, 1.0])
    e1 = np.cross(up, axis)
    e1 = e1 / np.linalg.norm(e1)
    e2 = np.cross(axis, e1)
    e2 = e2 / np.linalg.norm(e2)
    return e1, e2


def project_frontal(curve: np.ndarray, frontal_axis: np.ndarray) -> np.ndarray:
    """Orthographic projection of a 3D polyline onto the frontal plane."""
    pts = np.asarray(curve, dtype=np.float64)
    axis = np.asarray(frontal_axis, dtype=np.float64)
    if axis.shape != (3,) or abs(float(np.linalg.norm(axis)) - 1.0) > 1e-6:
        raise DomainError("frontal_axis must be a unit 3-vector")
    e1, e2 = _projection_basis(axis)
    return np.column_stack([pts @ e1, pts @ e2])


def profile_from_projected(
    margin: np.ndarray,
    crease: np.ndarray,
    brow: np.ndarray,
    mesh_id: str = "",
) -> HoodednessProfile:
    """Hoodedness profile from three already-resampled, projected 2D curves.

    All three curves must share the same sample count; sample ``i``
    corresponds to ``t = i / (K - 1)``.
    """
    m = np.asarray(margin, dtype=np.float64)
    c = np.asarray(crease, dtype=np.float64)
    b = np.asarray(brow, dtype=np.float64)
    if not (m.shape == c.shape == b.shape) or m.ndim != 2 or m.shape[1] != 2:
        raise SampleMismatch("margin/crease/brow curves must share one (K, 2) shape")
    k = m.shape[0]
    t = np.linspace(0.0, 1.0, k)
    v = m - b
    x = c - b
    vv = np.sum(v * v, axis=1)
    small = vv <= _SPAN_EPS * _SPAN_EPS
    if np.any(small):
        raise DegenerateFrame(float(t[int(np.argmax(small))]))
    h = np.abs(np.sum(x * v, axis=1)) / vv
    return HoodednessProfile(t_samples=t, h_values=h, mesh_id=mesh_id)


def projected_loop_curves(
    mesh: Mesh, topo: TopologyDescriptor, k: int = DEFAULT_PROFILE_SAMPLES
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Margin, crease, brow curves: arc-length resampled, then projected to 2D."""
    curves = []
    for loop in (topo.margin_loop, topo.crease_loop, topo.brow_loop):
        c3 = resample_by_arclength(extract_loop_curve(mesh, loop), k)
        curves.append(project_frontal(c3, topo.frontal_axis))
    return curves[0], curves[1], curves[2]


def hoodedness_profile(
    mesh: Mesh, topo: TopologyDescriptor, k: int = DEFAULT_PROFILE_SAMPLES
) -> HoodednessProfile:
    """Hoodedness profile of one eyelid of a mesh.

    The descriptor's loops select the eyelid (use ``topo.mirrored()`` to
    sample the opposite eye).
    """
    margin, crease, brow = projected_loop_curves(mesh, topo, k)
    return profile_from_projected(margin, crease, brow, mesh_id=mesh.name)


def _check_same_grid(a, b) -> None:
    # duck-typed: anything with a t_samples array
    if a.t_samples.shape != b.t_samples.shape or not np.allclose(
        a.t_samples, b.t_samples, rtol=0.0, atol=1e-12
    ):
        raise SampleMismatch("profiles are sampled on different t grids")


def shape_error(a: HoodednessProfile, b: HoodednessProfile) -> ShapeError:
    """Mean absolute difference between two profiles, in hoodedness units."""
    _check_same_grid(a, b)
    value = float(np.mean(np.abs(a.h_values - b.h_values)))
    return ShapeError(value=value, mesh_id_a=a.mesh_id, mesh_id_b=b.mesh_id)


def error_cdf(errors: Sequence[float] | np.ndarray) -> ErrorCdf:
    """Empirical CDF of a list of shape errors.

    Thresholds are the sorted unique error values; the fraction at each
    threshold counts errors less than or equal to it, ending at exactly 1.
    """
    values = np.asarray(errors, dtype=np.float64)
    if values.size == 0:
        raise EmptyInput("no errors to aggregate")
    if not np.isfinite(values).all():
        raise DomainError("errors must be finite")
    sorted_values = np.sort(values)
    thresholds = np.unique(sorted_values)
    counts = np.searchsorted(sorted_values, thresholds, side="right")
    fractions = counts / values.size
    return ErrorCdf(thresholds=thresholds, cumulative_fraction=fractions)


def group_errors(
    errors: Mapping[str, float], metadata: Mapping[str, str]
) -> list[GroupErrorRow]:
    """Mean shape error and count per group label, labels sorted lexicographically."""
    if not errors:
        raise EmptyInput("no errors to group")
    buckets: dict[str, list[float]] = {}
    for mesh_id, value in errors.items():
        if mesh_id not in metadata:
            raise MissingMetadata(mesh_id)
        buckets.setdefault(metadata[mesh_id], []).append(float(value))
    return [
        GroupErrorRow(label=label, mean_error=float(np.mean(vals)), count=len(vals))
        for label, vals in sorted(buckets.items())
    ]
