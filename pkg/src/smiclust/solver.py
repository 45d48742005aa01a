"""Analytic clustering solver.

The clustering objective is a quadratic form ``sum_y a_y' U a_y`` over
orthonormal coefficient vectors, with

    U = K' (2 I + 2 g M + g^2 M^2 - 2 e C + e^2 C^2) K'

where K' is the link-edited kernel, M/C the must-/cannot-link matrices and
g, e >= 0 the link strengths.  The global maximizer is the matrix of top-c
eigenvectors of U; assignments come from the sign-fixed, clipped and
normalized eigenvectors.  Out-of-sample points are labeled through the
unmodified kernel against the training set.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.spatial.distance import cdist

from .data import ConstraintSet, Dataset, empty_constraints
from .kernel import KernelMatrix, apply_constraints, local_scaling_kernel, nearest_neighbors

MODEL_SCHEMA = "smiclust-model-v1"


class PredictionError(RuntimeError):
    """Out-of-sample prediction was refused (non-positive leading eigenvalue)."""


@dataclass(frozen=True)
class ObjectiveMatrix:
    """The symmetric matrix of the clustering objective's quadratic form."""

    entries: np.ndarray
    gamma: float
    eta: float

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class ClusterModel:
    """Eigenpairs and kernel settings retained for out-of-sample prediction.

    ``phi`` holds the sign-fixed top-c eigenvectors (orthonormal columns),
    ``lam`` the matching eigenvalues in descending order.
    """

    phi: np.ndarray
    lam: np.ndarray
    c: int
    t: int
    gamma: float
    eta: float
    train_features: np.ndarray
    train_sigma: np.ndarray

    def __post_init__(self):
        phi = np.asarray(self.phi, dtype=float)
        lam = np.asarray(self.lam, dtype=float)
        if phi.shape[1] != self.c or lam.shape != (self.c,):
            raise ValueError("phi must be n x c and lam length c")
        gram = phi.T @ phi
        if not np.allclose(gram, np.eye(self.c), atol=1e-8):
            raise ValueError("phi columns must be orthonormal")
        if np.any(np.diff(lam) > 1e-10):
            raise ValueError("lam must be sorted in descending order")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "lam", lam)


def _entries(matrix) -> np.ndarray:
    return np.asarray(getattr(matrix, "entries", matrix), dtype=float)


def objective_matrix(
    kernel: KernelMatrix, cs: ConstraintSet, gamma: float, eta: float, c: int
) -> ObjectiveMatrix:
    """Build U = K'(2I + 2g M + g^2 M^2 - 2e C + e^2 C^2)K'.

    ``eta`` must be 0 for more than two clusters: the enemy-of-my-enemy
    squared term in C^2 only encodes a must-link when c = 2.
    """
    if gamma < 0 or eta < 0:
        raise ValueError("gamma and eta must be non-negative")
    if c > 2 and eta != 0:
        raise ValueError(f"eta must be 0 when c > 2 (got eta={eta}, c={c})")
    k = _entries(kernel)
    if cs.n != k.shape[0]:
        raise ValueError(f"constraint set n={cs.n} does not match kernel n={k.shape[0]}")
    m = cs.must_link_matrix()
    inner = 2.0 * np.eye(cs.n) + 2.0 * gamma * m + gamma**2 * (m @ m)
    if eta != 0:
        cmat = cs.cannot_link_matrix()
        inner += -2.0 * eta * cmat + eta**2 * (cmat @ cmat)
    u = k @ inner @ k
    u = (u + u.T) / 2.0
    return ObjectiveMatrix(entries=u, gamma=float(gamma), eta=float(eta))


def _canonical_eigenbasis(block: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of a degenerate eigenspace.

    Gram-Schmidt over the projections of the standard basis vectors, taken in
    ascending sample-index order, so repeated eigenvalues yield the same
    eigenvectors on every run and platform.
    """
    n, m = block.shape
    accepted: list[np.ndarray] = []
    for k in range(n):
        v = block[k, :].copy()  # coordinates of P e_k in the eigenspace basis
        for a in accepted:
            v -= (a @ v) * a
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            accepted.append(v / norm)
        if len(accepted) == m:
            break
    return block @ np.column_stack(accepted)


def top_eigenpairs(matrix, c: int) -> tuple[np.ndarray, np.ndarray]:
    """Largest-c eigenvalues (algebraic order, descending) and eigenvectors.

    Within groups of (numerically) repeated eigenvalues the eigenbasis is
    canonicalized so the result is deterministic.
    """
    u = _entries(matrix)
    n = u.shape[0]
    if not 1 <= c <= n:
        raise ValueError(f"c must be in 1..{n}, got {c}")
    w, v = np.linalg.eigh(u)
    w = w[::-1].copy()
    v = v[:, ::-1].copy()
    tol = 1e-9 * max(1.0, float(np.abs(w).max()))
    start = 0
    while start < c:
        stop = start + 1
        while stop < n and w[stop - 1] - w[stop] <= tol:
            stop += 1
        if stop - start > 1:
            v[:, start:stop] = _canonical_eigenbasis(v[:, start:stop])
        start = stop
    return w[:c], v[:, :c]


def fix_signs(phi: np.ndarray) -> np.ndarray:
    """Resolve each eigenvector's sign so its entry sum is non-negative.

    A column summing to exactly zero is oriented by its first nonzero entry.
    """
    phi = np.asarray(phi, dtype=float)
    out = phi.copy()
    for y in range(phi.shape[1]):
        s = phi[:, y].sum()
        if s == 0:
            nonzero = np.flatnonzero(phi[:, y])
            if nonzero.size == 0:
                continue
            s = phi[nonzero[0], y]
        if s < 0:
            out[:, y] = -out[:, y]
    return out


def assign_clusters(phi_tilde: np.ndarray) -> np.ndarray:
    """Cluster labels in ``{1, ..., c}`` from sign-fixed eigenvectors.

    Sample i goes to ``argmax_y [max(0, phi_y)]_i / (max(0, phi_y)' 1)``; a
    column whose clipped vector is all zero falls back to its absolute values.
    Ties go to the smallest label.
    """
    phi_tilde = np.asarray(phi_tilde, dtype=float)
    clipped = np.maximum(phi_tilde, 0.0)
    dead = ~clipped.any(axis=0)
    clipped[:, dead] = np.abs(phi_tilde[:, dead])
    sums = clipped.sum(axis=0)
    sums[sums == 0] = 1.0  # entirely-zero column: scores stay 0
    scores = clipped / sums
    return np.argmax(scores, axis=1) + 1


def smi_score(kernel, alpha: np.ndarray, c: int) -> float:
    """Estimated squared-loss mutual information of an assignment matrix.

    Computes ``(c / 2n) * sum_y alpha_y' K^2 alpha_y - 1/2`` for a symmetric
    kernel matrix K; the quadratic form is evaluated as ``||K alpha_y||^2``.
    """
    k = _entries(kernel)
    alpha = np.asarray(alpha, dtype=float)
    n = k.shape[0]
    return float(c / (2.0 * n) * np.sum((k @ alpha) ** 2) - 0.5)


def cluster(
    ds: Dataset,
    cs: ConstraintSet | None,
    t: int,
    gamma: float,
    eta: float,
    c: int,
) -> tuple[np.ndarray, ClusterModel]:
    """Full pipeline: kernel, link editing, eigensolve, assignment.

    Returns the label vector (values ``1..c``) and a :class:`ClusterModel`
    carrying everything needed for out-of-sample prediction.
    """
    if cs is None:
        cs = empty_constraints(ds.n)
    base = local_scaling_kernel(ds.features, t)
    edited = apply_constraints(base, cs)
    u = objective_matrix(edited, cs, gamma, eta, c)
    lam, phi = top_eigenpairs(u, c)
    phi_tilde = fix_signs(phi)
    labels = assign_clusters(phi_tilde)
    _, sigma = nearest_neighbors(ds.features, t)
    model = ClusterModel(
        phi=phi_tilde,
        lam=lam,
        c=c,
        t=t,
        gamma=float(gamma),
        eta=float(eta),
        train_features=ds.features,
        train_sigma=sigma,
    )
    return labels, model


def cluster_unsupervised(ds: Dataset, t: int, c: int) -> tuple[np.ndarray, ClusterModel]:
    """Reference unsupervised path: eigenvectors of the kernel matrix itself."""
    base = local_scaling_kernel(ds.features, t)
    lam, phi = top_eigenpairs(base, c)
    phi_tilde = fix_signs(phi)
    labels = assign_clusters(phi_tilde)
    _, sigma = nearest_neighbors(ds.features, t)
    model = ClusterModel(
        phi=phi_tilde,
        lam=lam,
        c=c,
        t=t,
        gamma=0.0,
        eta=0.0,
        train_features=ds.features,
        train_sigma=sigma,
    )
    return labels, model


def _query_kernel(model: ClusterModel, x: np.ndarray) -> np.ndarray:
    """Unmodified local-scaling kernel rows between query points and training set.

    The query scale is the distance to its t-th nearest training point; a
    training point participates when it is among the query's t nearest or the
    query falls inside that point's own neighborhood radius.
    """
    train = model.train_features
    t = model.t
    dist = cdist(x, train)
    order = np.argsort(dist, axis=1, kind="stable")
    sigma_new = dist[np.arange(x.shape[0]), order[:, t - 1]]
    mask = np.zeros_like(dist, dtype=bool)
    rows = np.repeat(np.arange(x.shape[0]), t)
    mask[rows, order[:, :t].ravel()] = True
    mask |= dist <= model.train_sigma[None, :]
    scale = sigma_new[:, None] * model.train_sigma[None, :]
    entries = np.zeros_like(dist)
    with np.errstate(divide="ignore", invalid="ignore"):
        values = np.exp(-(dist**2) / (2.0 * scale))
    regular = mask & (dist > 0) & (scale > 0)
    entries[regular] = values[regular]
    entries[mask & (dist == 0)] = 1.0
    return entries


def predict(model: ClusterModel, x) -> int | np.ndarray:
    """Out-of-sample labels for one point or a batch of points.

    Scores each cluster as ``max(0, sum_i K(x', x_i) phi_y[i])`` normalized by
    ``lam_y * max(0, phi_y)' 1`` and returns the argmax (ties to the smallest
    label).  Refuses to predict when any retained eigenvalue is non-positive,
    since the score normalization is then meaningless.
    """
    if np.any(model.lam <= 0):
        raise PredictionError(
            "cannot predict: non-positive eigenvalue among the top-c "
            f"(eigenvalues: {model.lam.tolist()}); the objective matrix is "
            "indefinite for this constraint set"
        )
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.shape[1] != model.train_features.shape[1]:
        raise ValueError(
            f"query dimension {x.shape[1]} does not match training dimension "
            f"{model.train_features.shape[1]}"
        )
    k_new = _query_kernel(model, x)
    numer = np.maximum(k_new @ model.phi, 0.0)
    denom = model.lam * np.maximum(model.phi, 0.0).sum(axis=0)
    scores = np.where(denom > 0, numer / np.where(denom > 0, denom, 1.0), -np.inf)
    labels = np.argmax(scores, axis=1) + 1
    return int(labels[0]) if single else labels


def save_model(model: ClusterModel, path) -> None:
    """Persist a model as a versioned JSON document."""
    doc = {
        "schema": MODEL_SCHEMA,
        "c": model.c,
        "t": model.t,
        "gamma": model.gamma,
        "eta": model.eta,
        "eigenvalues": model.lam.tolist(),
        "phi": model.phi.tolist(),
        "train_features": model.train_features.tolist(),
        "train_sigma": model.train_sigma.tolist(),
    }
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def load_model(path) -> ClusterModel:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    schema = doc.get("schema")
    if schema != MODEL_SCHEMA:
        raise ValueError(f"unsupported model schema {schema!r}, expected {MODEL_SCHEMA!r}")
    return ClusterModel(
        phi=np.array(doc["phi"], dtype=float),
        lam=np.array(doc["eigenvalues"], dtype=float),
        c=int(doc["c"]),
        t=int(doc["t"]),
        gamma=float(doc["gamma"]),
        eta=float(doc["eta"]),
        train_features=np.array(doc["train_features"], dtype=float),
        train_sigma=np.array(doc["train_sigma"], dtype=float),
    )
