"""Triangle-mesh data model, OBJ I/O, topology descriptors, and mirroring.

Every mesh in a dataset shares one fixed triangulation; the
:class:`TopologyDescriptor` names the feature curves (eyelid margin, eyelid
crease, brow) as ordered vertex-index loops on that triangulation, carries
the inner/outer blend masks, and records the left/right vertex
correspondence used for horizontal mirroring.

All types are immutable after construction (arrays are made read-only), so
they are safe to share across threads. Operations are pure functions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    CountMismatch,
    IndexOutOfRange,
    InvariantViolation,
    MalformedLine,
    NonTriangleFace,
    SchemaError,
)


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Mesh:
    """Vertex positions plus triangle faces in a fixed shared topology.

    ``vertices`` is ``(V, 3)`` float64, ``faces`` is ``(F, 3)`` int64 with
    0-based indices. Construction only enforces array shape; value-level
    checks (finiteness, index range) are reported by
    :func:`validate_topology` so that broken meshes can be diagnosed.
    """

    vertices: np.ndarray
    faces: np.ndarray
    name: str = ""

    def __post_init__(self):
        verts = np.asarray(self.vertices, dtype=np.float64)
        faces = np.asarray(self.faces, dtype=np.int64)
        if verts.ndim != 2 or verts.shape[1] != 3:
            raise InvariantViolation(f"vertices must be (V, 3), got {verts.shape}")
        if faces.size == 0:
            faces = faces.reshape(0, 3)
        if faces.ndim != 2 or faces.shape[1] != 3:
            raise InvariantViolation(f"faces must be (F, 3) triangles, got {faces.shape}")
        object.__setattr__(self, "vertices", _frozen(verts))
        object.__setattr__(self, "faces", _frozen(faces))

    @property
    def vertex_count(self) -> int:
        return self.vertices.shape[0]

    def with_vertices(self, vertices: np.ndarray, name: str | None = None) -> "Mesh":
        """New mesh with replaced positions, sharing this mesh's faces."""
        return Mesh(vertices=vertices, faces=self.faces, name=self.name if name is None else name)


@dataclass(frozen=True)
class TopologyDescriptor:
    """Named feature loops, blend masks, and symmetry map for one topology.

    Loops are ordered temporal-to-nasal: index 0 is the temporal (outer)
    end. ``symmetry_map`` is an involutive permutation pairing each vertex
    with its horizontal mirror partner; ``mirror_plane_normal`` is the unit
    normal of the mirror plane through the origin. ``frontal_axis`` is the
    viewing direction dropped by the 2D projection of the shape metric.
    """

    vertex_count: int
    margin_loop: np.ndarray
    crease_loop: np.ndarray
    brow_loop: np.ndarray
    inner_mask: np.ndarray
    outer_mask: np.ndarray
    symmetry_map: np.ndarray
    frontal_axis: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    mirror_plane_normal: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 0.0]))

    def __post_init__(self):
        v = int(self.vertex_count)
        object.__setattr__(self, "vertex_count", v)
        for attr in ("margin_loop", "crease_loop", "brow_loop", "symmetry_map"):
            object.__setattr__(self, attr, _frozen(np.asarray(getattr(self, attr), dtype=np.int64)))
        for attr in ("inner_mask", "outer_mask", "frontal_axis", "mirror_plane_normal"):
            object.__setattr__(self, attr, _frozen(np.asarray(getattr(self, attr), dtype=np.float64)))
        self._check_invariants()

    def _check_invariants(self):
        v = self.vertex_count
        if v <= 0:
            raise InvariantViolation("vertex_count must be positive")
        for name in ("margin_loop", "crease_loop", "brow_loop"):
            loop = getattr(self, name)
            if loop.ndim != 1:
                raise InvariantViolation(f"{name} must be a flat index list")
            if loop.size and (loop.min() < 0 or loop.max() >= v):
                raise InvariantViolation(f"{name} contains out-of-range vertex indices")
            if np.unique(loop).size < 2:
                raise InvariantViolation(f"{name} needs at least 2 distinct vertices")
        for name in ("inner_mask", "outer_mask"):
            mask = getattr(self, name)
            if mask.shape != (v,):
                raise InvariantViolation(f"{name} must have one weight per vertex")
            if np.any(~np.isfinite(mask)) or mask.min() < 0.0 or mask.max() > 1.0:
                raise InvariantViolation(f"{name} weights must be finite and in [0, 1]")
        if np.any(self.inner_mask + self.outer_mask > 1.0 + 1e-12):
            raise InvariantViolation("inner_mask + outer_mask exceeds 1 for some vertex")
        sym = self.symmetry_map
        if sym.shape != (v,):
            raise InvariantViolation("symmetry_map must have one entry per vertex")
        if sym.min() < 0 or sym.max() >= v:
            raise InvariantViolation("symmetry_map contains out-of-range vertex indices")
        if not np.array_equal(sym[sym], np.arange(v)):
            raise InvariantViolation("symmetry_map is not an involution")
        for name in ("frontal_axis", "mirror_plane_normal"):
            axis = getattr(self, name)
            if axis.shape != (3,) or abs(float(np.linalg.norm(axis)) - 1.0) > 1e-6:
                raise InvariantViolation(f"{name} must be a unit 3-vector")

    def mirrored(self) -> "TopologyDescriptor":
        """Descriptor as seen through the symmetry map.

        Feature loops point at the mirror-partner vertices (the other eye)
        while keeping the temporal-to-nasal ordering; masks are permuted
        accordingly. Useful for sampling the opposite eyelid of a mesh.
        """
        sym = self.symmetry_map
        return replace(
            self,
            margin_loop=sym[self.margin_loop],
            crease_loop=sym[self.crease_loop],
            brow_loop=sym[self.brow_loop],
            inner_mask=self.inner_mask[sym],
            outer_mask=self.outer_mask[sym],
        )


@dataclass(frozen=True)
class Violation:
    """One validation finding; ``kind`` is a stable machine-readable tag."""

    kind: str
    message: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.message}"


def load_obj(path: str | Path) -> Mesh:
    """Parse an ASCII OBJ file into a :class:`Mesh`.

    Only ``v`` and ``f`` records are honored; normals, texcoords, groups and
    comments are ignored. OBJ's 1-based face indices are converted to
    0-based. Faces must be triangles.
    """
    path = Path(path)
    vertices: list[tuple[float, float, float]] = []
    faces: list[tuple[int, int, int]] = []
    face_lines: list[int] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            tokens = line.split()
            rec = tokens[0]
            if rec == "v":
                if len(tokens) != 4:
                    raise MalformedLine(line_no, f"vertex record needs 3 coordinates, got {len(tokens) - 1}")
                try:
                    vertices.append((float(tokens[1]), float(tokens[2]), float(tokens[3])))
                except ValueError:
                    raise MalformedLine(line_no, "vertex coordinates are not numbers") from None
            elif rec == "f":
                if len(tokens) < 4:
                    raise MalformedLine(line_no, f"face record needs 3 vertices, got {len(tokens) - 1}")
                if len(tokens) > 4:
                    raise NonTriangleFace(line_no, len(tokens) - 1)
                idx = []
                for tok in tokens[1:]:
                    head = tok.split("/")[0]
                    try:
                        i = int(head)
                    except ValueError:
                        raise MalformedLine(line_no, f"bad face index {tok!r}") from None
                    if i < 1:
                        raise MalformedLine(line_no, f"face index {i} is not a positive 1-based index")
                    idx.append(i - 1)
                faces.append(tuple(idx))
                face_lines.append(line_no)
            # anything else (vn, vt, o, g, s, usemtl, ...) is ignored
    nv = len(vertices)
    for (a, b, c), line_no in zip(faces, face_lines):
        if max(a, b, c) >= nv:
            raise MalformedLine(line_no, f"face references vertex {max(a, b, c) + 1} of {nv}")
    verts = np.asarray(vertices, dtype=np.float64).reshape(nv, 3)
    return Mesh(vertices=verts, faces=np.asarray(faces, dtype=np.int64).reshape(len(faces), 3), name=path.stem)


def save_obj(mesh: Mesh, path: str | Path) -> None:
    """Write a mesh as ASCII OBJ.

    Coordinates are written with shortest round-trip float formatting, so
    ``load_obj(save_obj(m))`` reproduces positions exactly and the output is
    byte-deterministic for identical input.
    """
    path = Path(path)
    lines = []
    for x, y, z in mesh.vertices:
        lines.append(f"v {float(x)!r} {float(y)!r} {float(z)!r}")
    for a, b, c in mesh.faces:
        lines.append(f"f {int(a) + 1} {int(b) + 1} {int(c) + 1}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


_REQUIRED_TOPOLOGY_FIELDS = (
    "vertex_count",
    "margin_loop",
    "crease_loop",
    "brow_loop",
    "inner_mask",
    "outer_mask",
    "symmetry_map",
)


def topology_to_dict(topo: TopologyDescriptor) -> dict:
    return {
        "vertex_count": topo.vertex_count,
        "margin_loop": topo.margin_loop.tolist(),
        "crease_loop": topo.crease_loop.tolist(),
        "brow_loop": topo.brow_loop.tolist(),
        "inner_mask": topo.inner_mask.tolist(),
        "outer_mask": topo.outer_mask.tolist(),
        "symmetry_map": topo.symmetry_map.tolist(),
        "frontal_axis": topo.frontal_axis.tolist(),
        "mirror_plane_normal": topo.mirror_plane_normal.tolist(),
    }


def topology_from_dict(doc: dict) -> TopologyDescriptor:
    if not isinstance(doc, dict):
        raise SchemaError("topology descriptor must be a JSON object")
    missing = [k for k in _REQUIRED_TOPOLOGY_FIELDS if k not in doc]
    if missing:
        raise SchemaError(f"topology descriptor is missing fields: {', '.join(missing)}")
    kwargs = {k: doc[k] for k in _REQUIRED_TOPOLOGY_FIELDS}
    for optional in ("frontal_axis", "mirror_plane_normal"):
        if optional in doc:
            kwargs[optional] = doc[optional]
    try:
        return TopologyDescriptor(**kwargs)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InvariantViolation):
            raise
        raise SchemaError(f"malformed topology descriptor: {exc}") from exc


def load_topology(path: str | Path) -> TopologyDescriptor:
    """Load a topology descriptor JSON document, validating all invariants."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"not valid JSON: {exc}") from exc
    return topology_from_dict(doc)


def save_topology(topo: TopologyDescriptor, path: str | Path) -> None:
    Path(path).write_text(json.dumps(topology_to_dict(topo), indent=2, sort_keys=True) + "\n", encoding="utf-8")


def validate_topology(mesh: Mesh, topo: TopologyDescriptor) -> list[Violation]:
    """Check a mesh against its descriptor; returns findings instead of raising.

    Empty result means the vertex counts agree and all mesh invariants
    (finite coordinates, in-range triangle indices) hold.
    """
    violations: list[Violation] = []
    if mesh.vertex_count != topo.vertex_count:
        violations.append(
            Violation("count_mismatch", f"expected {topo.vertex_count} vertices, got {mesh.vertex_count}")
        )
    bad = np.nonzero(~np.isfinite(mesh.vertices).all(axis=1))[0]
    for v in bad:
        violations.append(Violation("non_finite_vertex", f"vertex {int(v)} has a non-finite coordinate"))
    if mesh.faces.size:
        out = np.nonzero((mesh.faces < 0) | (mesh.faces >= mesh.vertex_count))[0]
        for f in np.unique(out):
            violations.append(Violation("face_index_out_of_range", f"face {int(f)} references a missing vertex"))
    return violations


def extract_loop_curve(mesh: Mesh, loop: Sequence[int] | np.ndarray) -> np.ndarray:
    """Mesh positions along an ordered vertex-index loop, as an ``(L, 3)`` polyline."""
    idx = np.asarray(loop, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= mesh.vertex_count):
        raise IndexOutOfRange(f"loop index outside [0, {mesh.vertex_count})")
    return mesh.vertices[idx]


def reflect_points(points: np.ndarray, plane_normal: np.ndarray) -> np.ndarray:
    """Reflect points across the plane through the origin with the given unit normal."""
    n = np.asarray(plane_normal, dtype=np.float64)
    return points - 2.0 * (points @ n)[:, None] * n


def mirror_mesh(mesh: Mesh, topo: TopologyDescriptor) -> Mesh:
    """Horizontally mirrored copy of a mesh, in the same shared topology.

    Vertex ``v`` of the output takes the reflected position of its symmetry
    partner, so feature loops keep their anatomical meaning (the left-eye
    loops of the output show the mirrored right eye). Triangle winding is
    flipped to preserve surface orientation.
    """
    if mesh.vertex_count != topo.vertex_count:
        raise CountMismatch(topo.vertex_count, mesh.vertex_count)
    sym = topo.symmetry_map
    verts = reflect_points(mesh.vertices[sym], topo.mirror_plane_normal)
    flipped = mesh.faces[:, [0, 2, 1]]
    return Mesh(vertices=verts, faces=flipped, name=f"{mesh.name}_mirrored" if mesh.name else "mirrored")
