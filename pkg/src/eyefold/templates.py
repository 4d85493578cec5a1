"""Procedural generation of synthetic eyelid template meshes.

Real template sculpts are artist work; for tests, demos, and pipeline
development this module builds a deterministic stand-in family: a two-eye
grid patch whose rows follow the eyelid margin (bottom), crease (middle),
and brow (top). The three generated templates share one triangulation and
differ only in where the crease sits between margin and brow:

* non-hooded          - crease well above the margin,
* partially hooded    - crease noticeably lower everywhere,
* hooded + epicanthal - crease low, dipping past the margin at the nasal
                        corner (hoodedness above 1 there).

The crease height orderings are pointwise, so walking the template path
monotonically increases hoodedness. No randomness anywhere; two runs write
byte-identical files.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .blendshape import TemplateSet, save_template_manifest
from .errors import DomainError
from .mesh import Mesh, TopologyDescriptor, save_obj, save_topology

# left eye spans x in [0.1, 1.1] with the temporal (outer) end at x = 1.1;
# the right eye is its reflection across the x = 0 plane
_X_TEMPORAL = 1.1
_X_NASAL = 0.1
_DEPTH_BULGE = 0.12


def _smoothstep(edge0: float, edge1: float, x: np.ndarray) -> np.ndarray:
    t = np.clip((x - edge0) / (edge1 - edge0), 0.0, 1.0)
    return t * t * (3.0 - 2.0 * t)


def _crease_height(kind: str, t: np.ndarray) -> np.ndarray:
    """Crease height as a fraction of the margin-to-brow span, per column.

    Heights are ordered non_hooded > partially_hooded > hooded_epicanthal at
    every t; the epicanthal variant drops below 0 near the nasal corner so
    its fold passes in front of the margin.
    """
    if kind == "non_hooded":
        return 0.62 + 0.04 * np.cos(np.pi * t)
    if kind == "partially_hooded":
        return 0.38 + 0.04 * np.cos(np.pi * t)
    if kind == "hooded_epicanthal":
        return 0.16 - 0.02 * np.cos(np.pi * t) - 0.24 * _smoothstep(0.6, 1.0, t)
    raise DomainError(f"unknown template kind {kind!r}")


def _eye_grid_vertices(kind: str, rows: int, cols: int) -> np.ndarray:
    """Left-eye grid positions, row-major from margin row 0 to brow row rows-1."""
    t = np.linspace(0.0, 1.0, cols)
    x = _X_TEMPORAL + (_X_NASAL - _X_TEMPORAL) * t
    z = _DEPTH_BULGE * np.sin(np.pi * t)
    y_crease = _crease_height(kind, t)

    crease_row = rows // 2
    verts = np.empty((rows, cols, 3))
    for i in range(rows):
        if i <= crease_row:
            y = (i / crease_row) * y_crease
        else:
            y = y_crease + ((i - crease_row) / (rows - 1 - crease_row)) * (1.0 - y_crease)
        verts[i, :, 0] = x
        verts[i, :, 1] = y
        verts[i, :, 2] = z
    return verts.reshape(rows * cols, 3)


def _grid_faces(rows: int, cols: int, offset: int, flip: bool) -> list[tuple[int, int, int]]:
    faces = []
    for i in range(rows - 1):
        for j in range(cols - 1):
            v00 = offset + i * cols + j
            v01 = v00 + 1
            v10 = v00 + cols
            v11 = v10 + 1
            if flip:
                faces.append((v00, v11, v01))
                faces.append((v00, v10, v11))
            else:
                faces.append((v00, v01, v11))
                faces.append((v00, v11, v10))
    return faces


def synthesize_topology(grid_resolution: int = 24) -> TopologyDescriptor:
    """Descriptor for the two-eye grid family at the given resolution."""
    if grid_resolution < 8:
        raise DomainError(f"grid resolution must be >= 8, got {grid_resolution}")
    rows = cols = grid_resolution
    per_eye = rows * cols
    crease_row = rows // 2
    t = np.linspace(0.0, 1.0, cols)

    def row_loop(row: int) -> np.ndarray:
        return np.arange(row * cols, row * cols + cols, dtype=np.int64)

    inner_col = _smoothstep(0.60, 0.85, t)
    outer_col = 1.0 - _smoothstep(0.15, 0.40, t)
    inner_mask = np.tile(inner_col, rows)
    outer_mask = np.tile(outer_col, rows)

    sym = np.concatenate([np.arange(per_eye) + per_eye, np.arange(per_eye)])
    return TopologyDescriptor(
        vertex_count=2 * per_eye,
        margin_loop=row_loop(0),
        crease_loop=row_loop(crease_row),
        brow_loop=row_loop(rows - 1),
        inner_mask=np.concatenate([inner_mask, inner_mask]),
        outer_mask=np.concatenate([outer_mask, outer_mask]),
        symmetry_map=sym,
    )


def synthesize_template(kind: str, grid_resolution: int = 24) -> Mesh:
    """One synthetic two-eye template mesh."""
    if grid_resolution < 8:
        raise DomainError(f"grid resolution must be >= 8, got {grid_resolution}")
    rows = cols = grid_resolution
    left = _eye_grid_vertices(kind, rows, cols)
    right = left.copy()
    right[:, 0] = -right[:, 0]
    verts = np.concatenate([left, right])
    faces = _grid_faces(rows, cols, 0, flip=False) + _grid_faces(rows, cols, rows * cols, flip=True)
    return Mesh(vertices=verts, faces=np.asarray(faces, dtype=np.int64), name=kind)


def synthesize_template_set(grid_resolution: int = 24) -> tuple[TemplateSet, TopologyDescriptor]:
    templates = TemplateSet(
        non_hooded=synthesize_template("non_hooded", grid_resolution),
        partially_hooded=synthesize_template("partially_hooded", grid_resolution),
        hooded_epicanthal=synthesize_template("hooded_epicanthal", grid_resolution),
    )
    return templates, synthesize_topology(grid_resolution)


def gen_templates(output_dir: str | Path, grid_resolution: int = 24) -> Path:
    """Write the synthetic template family plus descriptor and manifest.

    Returns the manifest path. Deterministic: repeated runs produce
    byte-identical files.
    """
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    templates, topo = synthesize_template_set(grid_resolution)

    save_obj(templates.non_hooded, output_dir / "non_hooded.obj")
    save_obj(templates.partially_hooded, output_dir / "partially_hooded.obj")
    save_obj(templates.hooded_epicanthal, output_dir / "hooded_epicanthal.obj")
    save_topology(topo, output_dir / "topology.json")
    manifest = output_dir / "templates.json"
    save_template_manifest(
        manifest,
        non_hooded="non_hooded.obj",
        partially_hooded="partially_hooded.obj",
        hooded_epicanthal="hooded_epicanthal.obj",
        topology="topology.json",
    )
    return manifest
