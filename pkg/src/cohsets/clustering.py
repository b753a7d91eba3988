"""k-means over eigenfunction embeddings and a coherence diagnostic."""

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError

_MAX_ITER = 300


@dataclass
class Embedding:
    """n x m matrix of dominant eigenfunction evaluations per sample."""

    points: np.ndarray
    source: dict = field(default_factory=dict)

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        if self.points.shape[1] < 1:
            raise InputError("embedding needs at least one column", "clustering")
        if not np.all(np.isfinite(self.points)):
            raise InputError("non-finite embedding entries", "clustering")


@dataclass
class Partition:
    labels: np.ndarray
    centers: np.ndarray
    inertia: float


def _kmeans_pp_init(P, k, rng):
    n = P.shape[0]
    centers = np.empty((k, P.shape[1]))
    centers[0] = P[rng.integers(n)]
    d2 = np.sum((P - centers[0]) ** 2, axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total <= 0:
            centers[j] = P[rng.integers(n)]
            continue
        centers[j] = P[rng.choice(n, p=d2 / total)]
        d2 = np.minimum(d2, np.sum((P - centers[j]) ** 2, axis=1))
    return centers


def _assign(P, centers):
    d2 = (
        np.sum(P * P, axis=1)[:, None]
        - 2.0 * P @ centers.T
        + np.sum(centers * centers, axis=1)[None, :]
    )
    return np.argmin(d2, axis=1), d2


def _lloyd(P, k, rng):
    centers = _kmeans_pp_init(P, k, rng)
    labels = None
    for _ in range(_MAX_ITER):
        new_labels, d2 = _assign(P, centers)
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for j in range(k):
            mask = labels == j
            if not np.any(mask):
                # reseed an empty cluster from the farthest point
                far = np.argmax(np.min(d2, axis=1))
                centers[j] = P[far]
                labels[far] = j
                mask = labels == j
            centers[j] = P[mask].mean(axis=0)
    labels, d2 = _assign(P, centers)
    inertia = float(np.sum(d2[np.arange(P.shape[0]), labels]))
    return labels, centers, inertia


def kmeans(emb, k, seed=0, restarts=10):
    """Best-of-restarts Lloyd's algorithm with k-means++ seeding.

    Deterministic for a given seed: restart r uses the substream (seed, r) and
    the winner is chosen by (inertia, restart index).
    """
    P = emb.points if isinstance(emb, Embedding) else Embedding(emb).points
    n = P.shape[0]
    if k > n:
        raise InputError(f"k = {k} exceeds the sample count {n}", "clustering", "kmeans")
    if k < 1:
        raise InputError("k must be >= 1", "clustering", "kmeans")
    best = None
    for r in range(max(1, restarts)):
        rng = np.random.default_rng([seed, r])
        labels, centers, inertia = _lloyd(P, k, rng)
        if best is None or inertia < best[0]:
            best = (inertia, labels, centers)
    inertia, labels, centers = best
    return Partition(labels=labels, centers=centers, inertia=inertia)


def coherence_score(pairs, labels, radius_quantile=0.5, periods=None):
    """Cluster-size-weighted fraction of within-cluster endpoint pairs that
    stay within the given quantile of all endpoint pair distances.

    periods: optional per-dimension periods for wrapped coordinates (None
    entries mean non-periodic). Singleton clusters contribute 1.
    """
    labels = np.asarray(labels)
    Y = np.asarray(pairs.Y, dtype=float)
    n = Y.shape[0]
    if labels.shape[0] != n:
        raise InputError("labels must align with the sample pairs", "clustering")
    diff = Y[:, None, :] - Y[None, :, :]
    if periods is not None:
        for dim, period in enumerate(periods):
            if period:
                diff[:, :, dim] -= period * np.round(diff[:, :, dim] / period)
    dist = np.sqrt(np.sum(diff * diff, axis=2))
    iu = np.triu_indices(n, k=1)
    threshold = np.quantile(dist[iu], radius_quantile)
    score = 0.0
    for lab in np.unique(labels):
        idx = np.where(labels == lab)[0]
        if idx.size == 1:
            score += 1.0 / n
            continue
        sub = dist[np.ix_(idx, idx)]
        su = np.triu_indices(idx.size, k=1)
        frac = float(np.mean(sub[su] <= threshold))
        score += frac * idx.size / n
    return score
