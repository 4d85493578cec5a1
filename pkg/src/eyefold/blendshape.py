"""Blendshape deltas, template-path interpolation, crease sharpening, mirroring.

The three archetype eyelid templates (non-hooded, partially hooded, hooded
with epicanthal fold) span a piecewise-linear path with knots at
``u = 0, 0.5, 1``. Candidate retopos are generated by walking that path; the
inner and outer eyelid regions can be steered independently through the
per-vertex blend masks of the shared topology descriptor.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CountMismatch, DomainError, SchemaError, TopologyError
from .mesh import Mesh, TopologyDescriptor, load_obj, load_topology, mirror_mesh, validate_topology


@dataclass(frozen=True)
class BlendshapeDelta:
    """Per-vertex displacement field between two meshes of one topology."""

    offsets: np.ndarray

    def __post_init__(self):
        offs = np.asarray(self.offsets, dtype=np.float64)
        if offs.ndim != 2 or offs.shape[1] != 3:
            raise DomainError(f"offsets must be (V, 3), got {offs.shape}")
        if not np.isfinite(offs).all():
            raise DomainError("offsets must be finite")
        offs.setflags(write=False)
        object.__setattr__(self, "offsets", offs)


@dataclass(frozen=True)
class TemplateSet:
    """The three archetype eyelid meshes spanning the interpolation family."""

    non_hooded: Mesh
    partially_hooded: Mesh
    hooded_epicanthal: Mesh

    def __post_init__(self):
        nh, ph, he = self.non_hooded, self.partially_hooded, self.hooded_epicanthal
        if not (nh.vertex_count == ph.vertex_count == he.vertex_count):
            raise CountMismatch(nh.vertex_count, ph.vertex_count, "template vertex count")
        if not (np.array_equal(nh.faces, ph.faces) and np.array_equal(nh.faces, he.faces)):
            raise SchemaError("templates do not share one triangulation")

    @property
    def vertex_count(self) -> int:
        return self.non_hooded.vertex_count


@dataclass(frozen=True)
class SharpenParams:
    """Strength and orientation of the crease-pinching blendshape."""

    strength: float = 0.0
    orientation_deg: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.strength <= 1.0):
            raise DomainError(f"strength must be in [0, 1], got {self.strength}")
        if not (-90.0 <= self.orientation_deg <= 90.0):
            raise DomainError(f"orientation_deg must be in [-90, 90], got {self.orientation_deg}")


def compute_delta(base: Mesh, target: Mesh) -> BlendshapeDelta:
    """Displacement field taking ``base`` onto ``target``."""
    if base.vertex_count != target.vertex_count:
        raise CountMismatch(base.vertex_count, target.vertex_count)
    return BlendshapeDelta(offsets=target.vertices - base.vertices)


def apply_delta(mesh: Mesh, delta: BlendshapeDelta, weight: float) -> Mesh:
    """Add ``weight`` times a displacement field to a mesh; faces unchanged."""
    if mesh.vertex_count != delta.offsets.shape[0]:
        raise CountMismatch(mesh.vertex_count, delta.offsets.shape[0])
    return mesh.with_vertices(mesh.vertices + float(weight) * delta.offsets)


def _check_unit_interval(value: float, name: str) -> float:
    value = float(value)
    if not (0.0 <= value <= 1.0) or math.isnan(value):
        raise DomainError(f"{name} must be in [0, 1], got {value}")
    return value


def path_interpolate(templates: TemplateSet, u: float) -> Mesh:
    """Evaluate the template path at ``u``.

    Piecewise linear with knots at u=0 (non-hooded), u=0.5 (partially
    hooded), u=1 (hooded with epicanthal fold). Knot values return the
    template positions bit-exactly.
    """
    u = _check_unit_interval(u, "u")
    nh, ph, he = templates.non_hooded, templates.partially_hooded, templates.hooded_epicanthal
    if u == 0.0:
        return nh.with_vertices(nh.vertices, name=f"interp_u{u:g}")
    if u == 0.5:
        return ph.with_vertices(ph.vertices, name=f"interp_u{u:g}")
    if u == 1.0:
        return he.with_vertices(he.vertices, name=f"interp_u{u:g}")
    if u < 0.5:
        a, b, w = nh, ph, 2.0 * u
    else:
        a, b, w = ph, he, 2.0 * u - 1.0
    verts = (1.0 - w) * a.vertices + w * b.vertices
    return nh.with_vertices(verts, name=f"interp_u{u:g}")


def regional_interpolate(
    templates: TemplateSet,
    topo: TopologyDescriptor,
    u_global: float,
    u_inner: float,
    u_outer: float,
) -> Mesh:
    """Evaluate the template path with per-vertex parameters.

    Each vertex gets ``u(v) = (1 - wi - wo) * u_global + wi * u_inner +
    wo * u_outer`` from the inner/outer masks and the path is evaluated at
    ``u(v)`` per vertex, so 0/1-mask regions match plain path interpolation
    exactly and mask falloffs blend the parameter, not the positions.
    """
    u_global = _check_unit_interval(u_global, "u_global")
    u_inner = _check_unit_interval(u_inner, "u_inner")
    u_outer = _check_unit_interval(u_outer, "u_outer")
    if templates.vertex_count != topo.vertex_count:
        raise CountMismatch(topo.vertex_count, templates.vertex_count)
    wi, wo = topo.inner_mask, topo.outer_mask
    u = (1.0 - wi - wo) * u_global + wi * u_inner + wo * u_outer

    nh = templates.non_hooded.vertices
    ph = templates.partially_hooded.vertices
    he = templates.hooded_epicanthal.vertices
    below = u <= 0.5
    w = np.where(below, 2.0 * u, 2.0 * u - 1.0)[:, None]
    a = np.where(below[:, None], nh, ph)
    b = np.where(below[:, None], ph, he)
    verts = (1.0 - w) * a + w * b
    return templates.non_hooded.with_vertices(
        verts, name=f"interp_g{u_global:g}_i{u_inner:g}_o{u_outer:g}"
    )


def generate_candidates(templates: TemplateSet, n: int = 20) -> list[Mesh]:
    """``n`` uniformly spaced path samples, from non-hooded to hooded-epicanthal."""
    if n < 2:
        raise DomainError(f"need at least 2 candidates, got {n}")
    out = []
    for k in range(n):
        mesh = path_interpolate(templates, k / (n - 1))
        out.append(mesh.with_vertices(mesh.vertices, name=f"candidate_{k:02d}"))
    return out


def crease_adjacent_vertices(mesh: Mesh, topo: TopologyDescriptor) -> np.ndarray:
    """Vertices sharing a mesh edge with the crease loop, excluding the loop itself.

    These are the vertices on the edge-loops immediately surrounding the
    eyelid fold. Raises :class:`TopologyError` when some crease vertex has
    no non-crease neighbor, since then no surrounding loop exists.
    """
    crease = set(int(i) for i in topo.crease_loop)
    neighbors: dict[int, set[int]] = {c: set() for c in crease}
    adjacent: set[int] = set()
    faces = mesh.faces
    edges = np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]], axis=0)
    for p, q in edges:
        p, q = int(p), int(q)
        if p in crease and q not in crease:
            neighbors[p].add(q)
            adjacent.add(q)
        elif q in crease and p not in crease:
            neighbors[q].add(p)
            adjacent.add(p)
    starved = [c for c, ns in neighbors.items() if not ns]
    if starved:
        raise TopologyError(f"crease vertex {starved[0]} has no non-crease neighbor")
    return np.array(sorted(adjacent), dtype=np.int64)


def _crease_tangents(crease_points: np.ndarray) -> np.ndarray:
    """Unit tangents of the crease polyline (central differences, one-sided at ends)."""
    tangents = np.empty_like(crease_points)
    tangents[1:-1] = crease_points[2:] - crease_points[:-2]
    tangents[0] = crease_points[1] - crease_points[0]
    tangents[-1] = crease_points[-1] - crease_points[-2]
    norms = np.linalg.norm(tangents, axis=1, keepdims=True)
    safe = np.where(norms > 1e-12, norms, 1.0)
    return tangents / safe


def _rotate_about_axes(vectors: np.ndarray, axes: np.ndarray, angle_rad: float) -> np.ndarray:
    """Rodrigues rotation of each vector about its own unit axis."""
    cos_a = math.cos(angle_rad)
    sin_a = math.sin(angle_rad)
    cross = np.cross(axes, vectors)
    dot = np.sum(axes * vectors, axis=1, keepdims=True)
    return vectors * cos_a + cross * sin_a + axes * dot * (1.0 - cos_a)


def sharpen_crease(mesh: Mesh, topo: TopologyDescriptor, params: SharpenParams) -> Mesh:
    """Pinch the edge-loops surrounding the eyelid fold toward the crease.

    Each vertex adjacent to the crease loop moves toward its nearest crease
    vertex by ``strength`` of the separation; a nonzero orientation rotates
    that displacement about the local crease tangent. Crease vertices and
    all non-adjacent vertices are untouched.
    """
    if mesh.vertex_count != topo.vertex_count:
        raise CountMismatch(topo.vertex_count, mesh.vertex_count)
    if params.strength == 0.0:
        return mesh.with_vertices(mesh.vertices)

    adjacent = crease_adjacent_vertices(mesh, topo)
    crease_points = mesh.vertices[topo.crease_loop]
    moving = mesh.vertices[adjacent]

    # nearest crease-loop vertex per adjacent vertex
    d2 = np.sum((moving[:, None, :] - crease_points[None, :, :]) ** 2, axis=2)
    nearest = np.argmin(d2, axis=1)
    separation = crease_points[nearest] - moving
    displacement = params.strength * separation
    if params.orientation_deg != 0.0:
        tangents = _crease_tangents(crease_points)[nearest]
        displacement = _rotate_about_axes(displacement, tangents, math.radians(params.orientation_deg))

    verts = mesh.vertices.copy()
    verts[adjacent] += displacement
    return mesh.with_vertices(verts)


def mirror_augment_dataset(meshes: list[Mesh], topo: TopologyDescriptor) -> list[Mesh]:
    """Input meshes followed by the horizontal mirror of each; length doubles."""
    return list(meshes) + [mirror_mesh(m, topo) for m in meshes]


def load_template_set(manifest_path: str | Path) -> tuple[TemplateSet, TopologyDescriptor]:
    """Load a template-set manifest and its topology descriptor.

    The manifest is a JSON object with keys ``non_hooded``,
    ``partially_hooded``, ``hooded_epicanthal`` and ``topology``; relative
    paths resolve against the manifest's directory. Every template is
    validated against the descriptor.
    """
    manifest_path = Path(manifest_path)
    with open(manifest_path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"not valid JSON: {exc}") from exc
    required = ("non_hooded", "partially_hooded", "hooded_epicanthal", "topology")
    missing = [k for k in required if k not in doc]
    if missing:
        raise SchemaError(f"template manifest is missing fields: {', '.join(missing)}")
    base = manifest_path.parent

    def _resolve(p: str) -> Path:
        path = Path(p)
        return path if path.is_absolute() else base / path

    topo = load_topology(_resolve(doc["topology"]))
    meshes = {}
    for key in ("non_hooded", "partially_hooded", "hooded_epicanthal"):
        mesh = load_obj(_resolve(doc[key]))
        problems = validate_topology(mesh, topo)
        if problems:
            raise SchemaError(f"template {key!r} fails validation: {problems[0]}")
        meshes[key] = mesh
    return TemplateSet(**meshes), topo


def save_template_manifest(
    path: str | Path,
    non_hooded: str,
    partially_hooded: str,
    hooded_epicanthal: str,
    topology: str,
) -> None:
    doc = {
        "non_hooded": non_hooded,
        "partially_hooded": partially_hooded,
        "hooded_epicanthal": hooded_epicanthal,
        "topology": topology,
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
