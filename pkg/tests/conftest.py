from types import SimpleNamespace

import numpy as np
import pytest

from eyefold import Mesh, TopologyDescriptor, load_template_set
from eyefold.templates import gen_templates


@pytest.fixture(scope="session")
def template_bundle(tmp_path_factory):
    """Synthetic template family written once per session."""
    out = tmp_path_factory.mktemp("templates")
    manifest = gen_templates(out, 16)
    templates, topo = load_template_set(manifest)
    return SimpleNamespace(manifest=manifest, dir=out, templates=templates, topo=topo)


@pytest.fixture
def line_eyelid():
    """Factory for minimal eyelid meshes made of three straight parallel lines.

    Rows run temporal-to-nasal along x; brow, crease, and margin sit at
    given y heights. Ideal for checking the metric against hand-computed
    values.
    """

    def build(brow_y: float, crease_y: float, margin_y: float, n: int = 12) -> tuple[Mesh, TopologyDescriptor]:
        t = np.linspace(0.0, 1.0, n)
        margin = np.column_stack([t, np.full(n, margin_y), np.zeros(n)])
        crease = np.column_stack([t, np.full(n, crease_y), np.zeros(n)])
        brow = np.column_stack([t, np.full(n, brow_y), np.zeros(n)])
        mesh = Mesh(
            vertices=np.concatenate([margin, crease, brow]),
            faces=np.empty((0, 3), dtype=np.int64),
            name="lines",
        )
        topo = TopologyDescriptor(
            vertex_count=3 * n,
            margin_loop=np.arange(0, n),
            crease_loop=np.arange(n, 2 * n),
            brow_loop=np.arange(2 * n, 3 * n),
            inner_mask=np.zeros(3 * n),
            outer_mask=np.zeros(3 * n),
            symmetry_map=np.arange(3 * n),
        )
        return mesh, topo

    return build


@pytest.fixture
def perturbed_meshes(template_bundle):
    """Deterministically asymmetric meshes sharing the template topology."""

    def build(count: int, scale: float = 0.01) -> list[Mesh]:
        rng = np.random.default_rng(2024)
        base = template_bundle.templates.partially_hooded
        half = template_bundle.topo.vertex_count // 2
        out = []
        for i in range(count):
            verts = base.vertices.copy()
            verts[:half, 1] += scale * rng.standard_normal(half)
            out.append(base.with_vertices(verts, name=f"mesh_{i}"))
        return out

    return build
