"""Sparse local-scaling similarity matrix and link-based kernel editing.

The similarity between samples i and j is ``exp(-||x_i - x_j||^2 / (2 s_i s_j))``
where ``s_i`` is the distance from x_i to its t-th nearest neighbor, and the
entry is kept only when i is among the t nearest neighbors of j or vice versa.
Must-links overwrite entries with 1, cannot-links with 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .data import ConstraintSet


@dataclass(frozen=True)
class KernelMatrix:
    """Symmetric similarity matrix with entries in [0, 1] and unit diagonal."""

    entries: np.ndarray
    t: int
    modified: bool = False

    @property
    def n(self) -> int:
        return self.entries.shape[0]


def nearest_neighbors(features, t: int) -> tuple[np.ndarray, np.ndarray]:
    """Indices of the t nearest neighbors of every point plus local scales.

    Neighbors are ordered by Euclidean distance, excluding the point itself;
    ties are broken by lower sample index.  The scale ``sigma[i]`` is the
    distance from point i to its t-th nearest neighbor (may be 0 when
    duplicates are present; the kernel handles that case).

    Returns
    -------
    neighbors : int ndarray of shape (n, t)
    sigma : float ndarray of shape (n,)
    """
    features = np.asarray(features, dtype=float)
    n = features.shape[0]
    if not 1 <= t <= n - 1:
        raise ValueError(f"t must be in 1..{n - 1}, got {t}")
    dist = cdist(features, features)
    np.fill_diagonal(dist, np.inf)
    # Stable sort keeps ascending index order among equal distances.
    order = np.argsort(dist, axis=1, kind="stable")
    neighbors = order[:, :t]
    sigma = dist[np.arange(n), neighbors[:, t - 1]]
    return neighbors, sigma


def local_scaling_kernel(features, t: int) -> KernelMatrix:
    """Sparse local-scaling similarity matrix.

    Entry (i, j) is ``exp(-d_ij^2 / (2 sigma_i sigma_j))`` when the
    t-nearest-neighbor condition holds and 0 otherwise.  The diagonal is 1.
    Coincident points connected by the neighborhood condition get similarity 1
    regardless of their scales, so zero scales from duplicates never divide.
    """
    features = np.asarray(features, dtype=float)
    n = features.shape[0]
    neighbors, sigma = nearest_neighbors(features, t)
    dist = cdist(features, features)

    mask = np.zeros((n, n), dtype=bool)
    rows = np.repeat(np.arange(n), t)
    mask[rows, neighbors.ravel()] = True
    mask |= mask.T

    scale = sigma[:, None] * sigma[None, :]
    entries = np.zeros((n, n))
    with np.errstate(divide="ignore", invalid="ignore"):
        values = np.exp(-(dist**2) / (2.0 * scale))
    regular = mask & (dist > 0) & (scale > 0)
    entries[regular] = values[regular]
    entries[mask & (dist == 0)] = 1.0
    np.fill_diagonal(entries, 1.0)
    return KernelMatrix(entries=entries, t=t)


def apply_constraints(kernel: KernelMatrix, cs: ConstraintSet) -> KernelMatrix:
    """Overwrite similarities for linked pairs: must-links to 1, cannot-links to 0."""
    if cs.n != kernel.n:
        raise ValueError(f"constraint set is over n={cs.n} samples, kernel over n={kernel.n}")
    entries = kernel.entries.copy()
    for i, j in cs.must_links:
        entries[i, j] = entries[j, i] = 1.0
    for i, j in cs.cannot_links:
        entries[i, j] = entries[j, i] = 0.0
    return KernelMatrix(entries=entries, t=kernel.t, modified=True)
