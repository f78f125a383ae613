"""Dimensionality reduction and deterministic K-means for candidate embeddings.

PCA is the default, fully specified reduction. A UMAP backend with the
conventional neighbor-embedding hyperparameters (n_neighbors=15, min_dist=0.1)
is available when the optional ``umap`` extra is installed; its stochastic
optimization resists exact cross-implementation checks, which is why PCA is
the default everywhere that determinism is asserted.

K-means is written here rather than delegated: the contract pins kmeans++
initialization from a named PRNG (PCG64), first-index tie-breaking, the
empty-cluster repair rule, and per-iteration inertia telemetry.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .core import ValidationError

log = logging.getLogger(__name__)

#: Name of the seeded generator recorded in output metadata, so "seed 42"
#: reproduces across builds of this package.
RNG_NAME = "numpy-pcg64"


class BackendUnavailableError(RuntimeError):
    """An optional reduction backend is not installed."""


@dataclass
class ReducedMatrix:
    """Words with their reduced coordinates, one row per word."""

    words: list[str]
    coords: np.ndarray
    method: str  # "pca" | "umap"
    d: int
    params: dict = field(default_factory=dict)
    explained_variance: np.ndarray | None = None

    def __post_init__(self):
        if self.coords.shape[0] != len(self.words):
            raise ValidationError(
                f"coords rows {self.coords.shape[0]} do not align with {len(self.words)} words"
            )


@dataclass
class Clustering:
    """A hard partition of words into k clusters with its quality telemetry."""

    assignments: dict[str, int]
    centroids: np.ndarray
    inertia: float
    seed: int
    iterations: int
    inertia_history: list[float]
    rng: str = RNG_NAME

    @property
    def k(self) -> int:
        return self.centroids.shape[0]

    def members(self) -> dict[int, list[str]]:
        """Cluster id -> member words, in assignment-insertion order."""
        out: dict[int, list[str]] = {c: [] for c in range(self.k)}
        for word, c in self.assignments.items():
            out[c].append(word)
        return out

    def recompute_inertia(self, reduced: ReducedMatrix) -> float:
        """Independent recomputation of inertia from (assignments, centroids)."""
        total = 0.0
        for i, word in enumerate(reduced.words):
            c = self.assignments[word]
            diff = reduced.coords[i] - self.centroids[c]
            total += float(diff @ diff)
        return total


def reduce_pca(words: list[str], matrix: np.ndarray, d: int = 50) -> ReducedMatrix:
    """Project mean-centered vectors onto the top-d principal components.

    Components are ordered by descending eigenvalue and sign-fixed so each
    component's largest-magnitude coordinate is positive. If d exceeds
    min(N, D) it is lowered with a warning.
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    n = matrix.shape[0]
    if n == 0:
        raise ValidationError("reduce_pca: empty input")
    if len(words) != n:
        raise ValidationError("reduce_pca: words do not align with matrix rows")
    if d < 1:
        raise ValidationError(f"reduce_pca: d must be >= 1, got {d}")
    dim = matrix.shape[1]
    d_eff = min(d, n, dim)
    if d_eff < d:
        log.warning("reduce_pca: lowering d from %d to min(N=%d, D=%d)=%d", d, n, dim, d_eff)

    centered = matrix - matrix.mean(axis=0)
    # SVD of the centered data: rows of vt are orthonormal right singular
    # vectors ordered by descending singular value.
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    components = vt[:d_eff]
    # Sign convention: largest-|coordinate| entry of each component is positive.
    flip = np.sign(components[np.arange(d_eff), np.argmax(np.abs(components), axis=1)])
    flip[flip == 0] = 1.0
    components = components * flip[:, None]
    coords = centered @ components.T
    variance = (s[:d_eff] ** 2) / max(n - 1, 1)

    return ReducedMatrix(
        words=list(words),
        coords=coords,
        method="pca",
        d=d_eff,
        params={"requested_d": d},
        explained_variance=variance,
    )


def reduce_umap(
    words: list[str],
    matrix: np.ndarray,
    d: int = 50,
    n_neighbors: int = 15,
    min_dist: float = 0.1,
    seed: int = 42,
) -> ReducedMatrix:
    """Neighbor-embedding reduction via the optional umap-learn backend.

    Reproducible for a fixed seed within one installed build of the backend.
    Raises BackendUnavailableError when umap-learn is not installed.
    """
    try:
        import umap  # type: ignore
    except ImportError as exc:
        raise BackendUnavailableError(
            "the umap backend is not installed; install the 'umap' extra "
            "(pip install nounclass[umap]) or use the 'pca' reduction"
        ) from exc

    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.shape[0] == 0:
        raise ValidationError("reduce_umap: empty input")
    reducer = umap.UMAP(
        n_components=d, n_neighbors=n_neighbors, min_dist=min_dist, random_state=seed
    )
    coords = np.asarray(reducer.fit_transform(matrix), dtype=np.float64)
    return ReducedMatrix(
        words=list(words),
        coords=coords,
        method="umap",
        d=d,
        params={"n_neighbors": n_neighbors, "min_dist": min_dist, "seed": seed},
    )


def _kmeans_pp_init(coords: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """kmeans++ seeding: spread initial centers by squared-distance weighting."""
    n = coords.shape[0]
    centers = np.empty((k, coords.shape[1]))
    chosen = np.zeros(n, dtype=bool)

    first = int(rng.integers(n))
    centers[0] = coords[first]
    chosen[first] = True
    d2 = np.sum((coords - centers[0]) ** 2, axis=1)

    for j in range(1, k):
        total = float(d2.sum())
        if total > 0.0:
            idx = int(rng.choice(n, p=d2 / total))
            if chosen[idx]:  # duplicate point drawn; fall back to an unchosen one
                idx = int(np.flatnonzero(~chosen)[0])
        else:
            # All remaining points coincide with chosen centers.
            idx = int(np.flatnonzero(~chosen)[0])
        centers[j] = coords[idx]
        chosen[idx] = True
        d2 = np.minimum(d2, np.sum((coords - centers[j]) ** 2, axis=1))
    return centers


def _assign(coords: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Nearest-center labels; exact ties go to the lower cluster id (argmin)."""
    # |x - c|^2 = |x|^2 - 2 x.c + |c|^2; |x|^2 is constant per row.
    d2 = -2.0 * (coords @ centers.T) + np.sum(centers**2, axis=1)[None, :]
    return np.argmin(d2, axis=1)


def _lloyd(
    coords: np.ndarray, centers: np.ndarray, k: int, max_iter: int, tol: float
) -> tuple[np.ndarray, np.ndarray, list[float], int]:
    """Lloyd iterations from the given initial centers until convergence."""
    history: list[float] = []
    labels = np.zeros(coords.shape[0], dtype=int)
    iterations = 0

    for iterations in range(1, max_iter + 1):
        labels = _assign(coords, centers)

        # Repair empty clusters before the centroid update: seize the point
        # farthest from its assigned centroid. Points that are their cluster's
        # sole member stay put, so the repair cannot create a new empty cluster.
        counts = np.bincount(labels, minlength=k)
        for empty in np.flatnonzero(counts == 0):
            point_d2 = np.sum((coords - centers[labels]) ** 2, axis=1)
            singleton = np.flatnonzero(np.bincount(labels, minlength=k) == 1)
            point_d2[np.isin(labels, singleton)] = -1.0
            victim = int(np.argmax(point_d2))
            labels[victim] = empty
            centers[empty] = coords[victim]

        new_centers = np.empty_like(centers)
        for c in range(k):
            new_centers[c] = coords[labels == c].mean(axis=0)

        movement = float(np.max(np.linalg.norm(new_centers - centers, axis=1)))
        centers = new_centers
        inertia = float(np.sum((coords - centers[labels]) ** 2))
        history.append(inertia)
        if movement < tol:
            break
    return labels, centers, history, iterations


def kmeans(
    reduced: ReducedMatrix,
    k: int = 12,
    seed: int = 42,
    max_iter: int = 300,
    tol: float = 1e-6,
    n_init: int = 10,
) -> Clustering:
    """K-means: kmeans++ init from a seeded PCG64 generator, then Lloyd iterations.

    Runs ``n_init`` restarts (all drawn sequentially from the one seeded
    generator) and keeps the lowest-inertia solution, ties going to the
    earlier restart; a single kmeans++ seeding misplaces centers often enough
    that restarts are standard practice. Each run iterates until the max
    centroid movement drops below ``tol`` or ``max_iter`` is reached; an
    empty cluster is repaired by seizing the point currently farthest from
    its assigned centroid, which keeps the objective non-increasing.
    Same seed and input give identical output.
    """
    coords = np.asarray(reduced.coords, dtype=np.float64)
    n = coords.shape[0]
    if n < k:
        raise ValidationError(f"kmeans: too few points ({n}) for k={k}")
    if k < 1:
        raise ValidationError(f"kmeans: k must be >= 1, got {k}")
    if n_init < 1:
        raise ValidationError(f"kmeans: n_init must be >= 1, got {n_init}")

    rng = np.random.default_rng(seed)
    best: tuple[np.ndarray, np.ndarray, list[float], int] | None = None
    for _ in range(n_init):
        centers0 = _kmeans_pp_init(coords, k, rng)
        labels, centers, history, iterations = _lloyd(coords, centers0, k, max_iter, tol)
        if best is None or history[-1] < best[2][-1]:
            best = (labels, centers, history, iterations)

    labels, centers, history, iterations = best
    assignments = {word: int(labels[i]) for i, word in enumerate(reduced.words)}
    return Clustering(
        assignments=assignments,
        centroids=centers,
        inertia=history[-1],
        seed=seed,
        iterations=iterations,
        inertia_history=history,
    )
