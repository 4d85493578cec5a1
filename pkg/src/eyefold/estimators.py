"""Scikit-learn style estimators wrapping the core geometry operations.

These adapters let the eyelid tooling compose with the wider sklearn
ecosystem (``Pipeline``, ``get_params``/``set_params``, grid search over
sharpening strength, and so on). ``X`` is a list of :class:`Mesh` for the
mesh-to-mesh transformers, a parameter array for the interpolator, and a
numeric matrix for the mixture model. All transformers are stateless:
``fit`` only validates and returns ``self``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .blendshape import (
    SharpenParams,
    TemplateSet,
    mirror_augment_dataset,
    path_interpolate,
    regional_interpolate,
    sharpen_crease,
)
from .errors import DomainError
from .mesh import Mesh, TopologyDescriptor
from .metric import DEFAULT_PROFILE_SAMPLES, hoodedness_profile
from .stats import Gmm, gmm_fit, gmm_sample


def _as_mesh_list(X) -> list[Mesh]:
    meshes = list(X)
    if not all(isinstance(m, Mesh) for m in meshes):
        raise DomainError("X must be a sequence of Mesh objects")
    return meshes


class HoodednessProfiler(TransformerMixin, BaseEstimator):
    """Transform meshes into rows of hoodedness values.

    ``transform`` returns an ``(n_meshes, k)`` array; feed it straight into
    :class:`DiagonalGmm` or any sklearn estimator.
    """

    def __init__(self, topology: TopologyDescriptor | None = None, k: int = DEFAULT_PROFILE_SAMPLES):
        self.topology = topology
        self.k = k

    def fit(self, X, y=None):
        if self.topology is None:
            raise DomainError("topology is required")
        return self

    def transform(self, X) -> np.ndarray:
        self.fit(X)
        meshes = _as_mesh_list(X)
        return np.stack([hoodedness_profile(m, self.topology, self.k).h_values for m in meshes])


class CreaseSharpener(TransformerMixin, BaseEstimator):
    """Apply the crease-pinching blendshape to every mesh."""

    def __init__(
        self,
        topology: TopologyDescriptor | None = None,
        strength: float = 0.0,
        orientation_deg: float = 0.0,
    ):
        self.topology = topology
        self.strength = strength
        self.orientation_deg = orientation_deg

    def fit(self, X, y=None):
        if self.topology is None:
            raise DomainError("topology is required")
        return self

    def transform(self, X) -> list[Mesh]:
        self.fit(X)
        params = SharpenParams(strength=self.strength, orientation_deg=self.orientation_deg)
        return [sharpen_crease(m, self.topology, params) for m in _as_mesh_list(X)]


class MirrorAugmenter(TransformerMixin, BaseEstimator):
    """Double a mesh list with horizontal mirrors."""

    def __init__(self, topology: TopologyDescriptor | None = None):
        self.topology = topology

    def fit(self, X, y=None):
        if self.topology is None:
            raise DomainError("topology is required")
        return self

    def transform(self, X) -> list[Mesh]:
        self.fit(X)
        return mirror_augment_dataset(_as_mesh_list(X), self.topology)


class TemplateInterpolator(TransformerMixin, BaseEstimator):
    """Evaluate the template path for rows of slider parameters.

    Input rows are either a single path parameter ``u`` (shape ``(n,)`` or
    ``(n, 1)``) or regional triples ``(u_global, u_inner, u_outer)`` of
    shape ``(n, 3)``; output is the corresponding list of meshes.
    """

    def __init__(
        self,
        templates: TemplateSet | None = None,
        topology: TopologyDescriptor | None = None,
    ):
        self.templates = templates
        self.topology = topology

    def fit(self, X, y=None):
        if self.templates is None:
            raise DomainError("templates are required")
        return self

    def transform(self, X) -> list[Mesh]:
        self.fit(X)
        params = np.asarray(X, dtype=np.float64)
        if params.ndim == 1:
            return [path_interpolate(self.templates, float(u)) for u in params]
        if params.ndim == 2 and params.shape[1] == 1:
            return [path_interpolate(self.templates, float(u)) for u in params[:, 0]]
        if params.ndim == 2 and params.shape[1] == 3:
            if self.topology is None:
                raise DomainError("topology is required for regional parameters")
            return [
                regional_interpolate(self.templates, self.topology, float(g), float(i), float(o))
                for g, i, o in params
            ]
        raise DomainError(f"expected (n,), (n, 1) or (n, 3) parameters, got {params.shape}")


class DiagonalGmm(BaseEstimator):
    """Diagonal-covariance Gaussian mixture with seeded, reproducible EM.

    After ``fit``: ``weights_``, ``means_``, ``variances_``,
    ``log_likelihood_trace_``, and ``model_`` (the plain :class:`Gmm`).
    """

    def __init__(self, n_components: int = 3, seed: int = 0, tol: float = 1e-6, max_iter: int = 500):
        self.n_components = n_components
        self.seed = seed
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y=None):
        model = gmm_fit(np.asarray(X, dtype=np.float64), self.n_components, self.seed,
                        tol=self.tol, max_iter=self.max_iter)
        self.model_: Gmm = model
        self.weights_ = model.weights
        self.means_ = model.means
        self.variances_ = model.variances
        self.log_likelihood_trace_ = model.ll_trace
        return self

    def _fitted(self) -> Gmm:
        if not hasattr(self, "model_"):
            raise NotFittedError("DiagonalGmm is not fitted")
        return self.model_

    def sample(self, n: int, seed: int | None = None) -> np.ndarray:
        model = self._fitted()
        return gmm_sample(model, n, self.seed if seed is None else seed)

    def score_samples(self, X) -> np.ndarray:
        from .stats import _log_gaussian_diag, _logsumexp_rows

        model = self._fitted()
        x = np.asarray(X, dtype=np.float64)
        log_joint = _log_gaussian_diag(x, model.means, model.variances) + np.log(model.weights)[None, :]
        return _logsumexp_rows(log_joint)

    def score(self, X, y=None) -> float:
        return float(np.mean(self.score_samples(X)))
