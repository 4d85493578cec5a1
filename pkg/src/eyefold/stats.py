"""Gaussian-mixture modeling and per-sample profile statistics.

The mixture model here is deliberately small: diagonal covariances,
expectation-maximization with k-means++ style seeded initialization, and a
recorded per-iteration log-likelihood trace so monotone convergence can be
asserted. Profile vectors (one hoodedness profile per row) are the natural
feature space for sampling and diversity comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import json
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DegenerateData, DomainError, EmptyInput, SampleMismatch, SchemaError
from .metric import HoodednessProfile, _check_same_grid

VARIANCE_FLOOR = 1e-8
DEFAULT_COMPONENTS = 3
EM_TOL = 1e-6
EM_MAX_ITER = 500


@dataclass(frozen=True)
class Gmm:
    """Diagonal-covariance Gaussian mixture.

    ``weights`` is (k,), ``means`` and ``variances`` are (k, D).
    ``ll_trace`` holds the log-likelihood after each EM iteration of the fit
    that produced the model (empty for models built directly or loaded).
    """

    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray
    ll_trace: np.ndarray = field(default_factory=lambda: np.empty(0), compare=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        m = np.asarray(self.means, dtype=np.float64)
        v = np.asarray(self.variances, dtype=np.float64)
        trace = np.asarray(self.ll_trace, dtype=np.float64)
        if w.ndim != 1 or m.ndim != 2 or v.shape != m.shape or w.size != m.shape[0]:
            raise DomainError("inconsistent mixture shapes")
        if not (np.isfinite(w).all() and np.isfinite(m).all() and np.isfinite(v).all()):
            raise DomainError("mixture parameters must be finite")
        if w.min() < 0.0 or abs(float(w.sum()) - 1.0) > 1e-9:
            raise DomainError("weights must be nonnegative and sum to 1")
        if v.min() < VARIANCE_FLOOR * (1.0 - 1e-12):
            raise DomainError(f"variances must be at least the floor {VARIANCE_FLOOR}")
        for arr in (w, m, v, trace):
            arr.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "means", m)
        object.__setattr__(self, "variances", v)
        object.__setattr__(self, "ll_trace", trace)

    @property
    def k(self) -> int:
        return self.weights.size

    @property
    def dimension(self) -> int:
        return self.means.shape[1]


@dataclass(frozen=True)
class ProfileStats:
    """Per-t mean and population standard deviation over a set of profiles."""

    t_samples: np.ndarray
    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t_samples, dtype=np.float64)
        m = np.asarray(self.mean, dtype=np.float64)
        s = np.asarray(self.std, dtype=np.float64)
        if not (t.shape == m.shape == s.shape) or t.ndim != 1:
            raise DomainError("stats arrays must share one 1D shape")
        if s.min() < 0.0:
            raise DomainError("standard deviations must be nonnegative")
        for arr in (t, m, s):
            arr.setflags(write=False)
        object.__setattr__(self, "t_samples", t)
        object.__setattr__(self, "mean", m)
        object.__setattr__(self, "std", s)


@dataclass(frozen=True)
class DiversityReport:
    """Pointwise comparison of two profile-statistics tables."""

    t_samples: np.ndarray
    mean_a: np.ndarray
    std_a: np.ndarray
    mean_b: np.ndarray
    std_b: np.ndarray
    std_delta: np.ndarray
    all_points_greater: bool


def _log_gaussian_diag(data: np.ndarray, means: np.ndarray, variances: np.ndarray) -> np.ndarray:
    """(N, k) log densities of diagonal Gaussians."""
    n, d = data.shape
    out = np.empty((n, means.shape[0]))
    for j in range(means.shape[0]):
        diff2 = (data - means[j]) ** 2
        out[:, j] = -0.5 * (np.sum(diff2 / variances[j], axis=1) + np.sum(np.log(2.0 * np.pi * variances[j])))
    return out


def _logsumexp_rows(log_values: np.ndarray) -> np.ndarray:
    m = np.max(log_values, axis=1, keepdims=True)
    return (m + np.log(np.sum(np.exp(log_values - m), axis=1, keepdims=True)))[:, 0]


def _kmeans_pp_centers(data: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding: first center random, later ones distance^2 weighted."""
    n = data.shape[0]
    centers = np.empty((k, data.shape[1]))
    centers[0] = data[rng.integers(n)]
    d2 = np.sum((data - centers[0]) ** 2, axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            centers[j] = data[rng.integers(n)]
            continue
        centers[j] = data[rng.choice(n, p=d2 / total)]
        d2 = np.minimum(d2, np.sum((data - centers[j]) ** 2, axis=1))
    return centers


def gmm_fit(
    data: np.ndarray,
    k: int,
    seed: int,
    tol: float = EM_TOL,
    max_iter: int = EM_MAX_ITER,
) -> Gmm:
    """Fit a diagonal-covariance GMM with EM; deterministic for a fixed seed.

    Initialization assigns each point to its nearest k-means++ center.
    Iteration stops when the log-likelihood improves by less than ``tol`` or
    after ``max_iter`` rounds; the per-iteration log-likelihoods are kept on
    the returned model as ``ll_trace``.
    """
    x = np.asarray(data, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
        raise DomainError(f"data must be (N, D), got {x.shape}")
    if not np.isfinite(x).all():
        raise DomainError("data must be finite")
    n, d = x.shape
    if k < 1:
        raise DomainError(f"component count must be >= 1, got {k}")
    if k > n:
        raise DomainError(f"cannot fit {k} components to {n} points")
    spread = x.max(axis=0) - x.min(axis=0)
    if k > 1 and np.any(spread == 0.0):
        raise DegenerateData("some dimension has zero spread; cannot separate components")

    rng = np.random.default_rng(seed)
    centers = _kmeans_pp_centers(x, k, rng)

    # hard assignment to the seeded centers gives the initial parameters
    d2 = np.sum((x[:, None, :] - centers[None, :, :]) ** 2, axis=2)
    assign = np.argmin(d2, axis=1)
    weights = np.empty(k)
    means = np.empty((k, d))
    variances = np.empty((k, d))
    global_var = np.maximum(x.var(axis=0), VARIANCE_FLOOR)
    for j in range(k):
        members = x[assign == j]
        if members.shape[0] == 0:
            weights[j] = 1.0 / n
            means[j] = centers[j]
            variances[j] = global_var
        else:
            weights[j] = members.shape[0] / n
            means[j] = members.mean(axis=0)
            variances[j] = np.maximum(members.var(axis=0), VARIANCE_FLOOR)
    weights = weights / weights.sum()

    trace: list[float] = []
    prev_ll = -np.inf
    for _ in range(max_iter):
        # E step
        log_joint = _log_gaussian_diag(x, means, variances) + np.log(weights)[None, :]
        log_norm = _logsumexp_rows(log_joint)
        ll = float(np.sum(log_norm))
        assert not trace or ll >= trace[-1] - 1e-9 * max(1.0, abs(trace[-1])), "EM log-likelihood decreased"
        trace.append(ll)
        resp = np.exp(log_joint - log_norm[:, None])
        if ll - prev_ll < tol:
            break
        prev_ll = ll
        # M step
        nk = resp.sum(axis=0)
        nk = np.maximum(nk, 1e-300)
        weights = nk / n
        means = (resp.T @ x) / nk[:, None]
        for j in range(k):
            diff2 = (x - means[j]) ** 2
            variances[j] = np.maximum((resp[:, j] @ diff2) / nk[j], VARIANCE_FLOOR)
        weights = weights / weights.sum()

    return Gmm(weights=weights, means=means, variances=variances, ll_trace=np.array(trace))


def gmm_sample(model: Gmm, n: int, seed: int) -> np.ndarray:
    """Draw ``n`` samples; component by weight, then a diagonal Gaussian draw."""
    if n < 1:
        raise DomainError(f"sample count must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    components = rng.choice(model.k, size=n, p=model.weights)
    noise = rng.standard_normal((n, model.dimension))
    return model.means[components] + np.sqrt(model.variances[components]) * noise


def gmm_to_dict(model: Gmm) -> dict:
    return {
        "k": model.k,
        "dimension": model.dimension,
        "weights": model.weights.tolist(),
        "means": model.means.tolist(),
        "variances": model.variances.tolist(),
    }


def gmm_from_dict(doc: dict) -> Gmm:
    for key in ("k", "dimension", "weights", "means", "variances"):
        if key not in doc:
            raise SchemaError(f"mixture document is missing {key!r}")
    model = Gmm(weights=doc["weights"], means=doc["means"], variances=doc["variances"])
    if model.k != doc["k"] or model.dimension != doc["dimension"]:
        raise SchemaError("mixture document shape fields disagree with the arrays")
    return model


def save_gmm(model: Gmm, path: str | Path) -> None:
    Path(path).write_text(json.dumps(gmm_to_dict(model), indent=2, sort_keys=True) + "\n", encoding="utf-8")


def load_gmm(path: str | Path) -> Gmm:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"not valid JSON: {exc}") from exc
    return gmm_from_dict(doc)


def profiles_matrix(profiles: Sequence[HoodednessProfile]) -> np.ndarray:
    """Stack profiles into an (N, K) matrix, verifying a shared t grid."""
    if not profiles:
        raise EmptyInput("no profiles")
    first = profiles[0]
    for p in profiles[1:]:
        _check_same_grid(first, p)
    return np.stack([p.h_values for p in profiles])


def profile_stats(profiles: Sequence[HoodednessProfile]) -> ProfileStats:
    """Per-t mean and population standard deviation over a profile set."""
    matrix = profiles_matrix(profiles)
    return ProfileStats(
        t_samples=profiles[0].t_samples,
        mean=matrix.mean(axis=0),
        std=matrix.std(axis=0, ddof=0),
    )


def diversity_report(stats_a: ProfileStats, stats_b: ProfileStats) -> DiversityReport:
    """Pointwise diversity comparison of two profile populations.

    ``all_points_greater`` is true when set B's standard deviation strictly
    exceeds set A's at every sample.
    """
    _check_same_grid(stats_a, stats_b)
    delta = stats_b.std - stats_a.std
    return DiversityReport(
        t_samples=stats_a.t_samples,
        mean_a=stats_a.mean,
        std_a=stats_a.std,
        mean_b=stats_b.mean,
        std_b=stats_b.std,
        std_delta=delta,
        all_points_greater=bool(np.all(stats_b.std > stats_a.std)),
    )
