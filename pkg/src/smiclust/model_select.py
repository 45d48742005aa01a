"""Hyperparameter search scored by normalized LSMI minus link violations.

Candidates over the (t, gamma, eta) grid are clustered, their LSMI is
estimated from the resulting labels (with its own cross-validated kappa and
delta), and each candidate is scored as

    lsmi / max_lsmi - n_v / max_nv

where n_v counts links the candidate's labeling violates.  The highest score
wins.
"""

from __future__ import annotations

import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import lsmi as lsmi_mod
from . import solver
from .data import ConstraintSet, Dataset

DEFAULT_T_GRID = tuple(range(1, 11))
DEFAULT_GAMMA_GRID = (0.0, 0.25, 0.5, 1.0, 2.0, 4.0)
DEFAULT_ETA_GRID = (0.0, 0.25, 0.5, 1.0, 2.0, 4.0)


@dataclass
class Candidate:
    """One (t, gamma, eta) grid point with its clustering and score."""

    t: int
    gamma: float
    eta: float
    labels: np.ndarray | None = None
    lsmi: float = math.nan
    n_v: int = 0
    score: float = math.nan
    seconds: float = 0.0
    error: str | None = None


@dataclass(frozen=True)
class LsmiConfig:
    """LSMI settings used when scoring candidates."""

    center_cap: int = lsmi_mod.DEFAULT_CENTER_CAP
    folds: int = 5
    kappa_grid: tuple[float, ...] | None = None
    delta_grid: tuple[float, ...] | None = None


@dataclass(frozen=True)
class GridSearchResult:
    best: Candidate
    model: solver.ClusterModel
    candidates: list[Candidate] = field(repr=False)


def count_violations(labels, cs: ConstraintSet) -> int:
    """Must-links with differing labels plus cannot-links with equal labels."""
    labels = np.asarray(labels)
    if labels.shape[0] != cs.n:
        raise ValueError(f"labels length {labels.shape[0]} does not match cs.n={cs.n}")
    violated = sum(1 for i, j in cs.must_links if labels[i] != labels[j])
    violated += sum(1 for i, j in cs.cannot_links if labels[i] == labels[j])
    return violated


def score_candidates(candidates: list[Candidate]) -> list[Candidate]:
    """Fill in scores; candidates that failed evaluation are skipped.

    The LSMI term is normalized by the largest LSMI when that is positive;
    otherwise (degenerate run) scores fall back to the shifted difference
    ``lsmi - max_lsmi`` and a warning is emitted.  The violation penalty
    vanishes when no candidate violates anything.
    """
    if not candidates:
        raise ValueError("no candidates to score")
    scorable = [cand for cand in candidates if cand.error is None]
    if not scorable:
        raise ValueError("all candidates failed; nothing to score")
    max_lsmi = max(cand.lsmi for cand in scorable)
    max_nv = max(cand.n_v for cand in scorable)
    if max_lsmi <= 0:
        warnings.warn(
            f"largest candidate LSMI is non-positive ({max_lsmi}); using shifted "
            "scores instead of ratio normalization",
            RuntimeWarning,
            stacklevel=2,
        )
    for cand in scorable:
        lsmi_term = cand.lsmi / max_lsmi if max_lsmi > 0 else cand.lsmi - max_lsmi
        penalty = cand.n_v / max_nv if max_nv > 0 else 0.0
        cand.score = lsmi_term - penalty
    return candidates


def _evaluate_candidate(job) -> Candidate:
    ds, cs, t, gamma, eta, c, cfg, seed = job
    cand = Candidate(t=t, gamma=gamma, eta=eta)
    start = time.perf_counter()
    try:
        labels, _ = solver.cluster(ds, cs, t, gamma, eta, c)
        kappa, delta, _ = lsmi_mod.cross_validate(
            ds.features,
            labels,
            kappa_grid=cfg.kappa_grid,
            delta_grid=cfg.delta_grid,
            folds=cfg.folds,
            center_cap=cfg.center_cap,
            seed=seed,
        )
        model = lsmi_mod.fit_ratio_model(
            ds.features, labels, kappa, delta, center_cap=cfg.center_cap, seed=seed
        )
        cand.labels = labels
        cand.lsmi = lsmi_mod.lsmi_value(model, ds.features, labels)
        cand.n_v = count_violations(labels, cs)
    except Exception as exc:  # candidate failure is data, not a crash
        cand.error = f"{type(exc).__name__}: {exc}"
    cand.seconds = time.perf_counter() - start
    return cand


def grid_search(
    ds: Dataset,
    cs: ConstraintSet,
    c: int,
    t_grid=None,
    gamma_grid=None,
    eta_grid=None,
    lsmi_cfg: LsmiConfig | None = None,
    seed: int = 0,
    jobs: int = 1,
) -> GridSearchResult:
    """Search the full (t, gamma, eta) Cartesian grid.

    Ties on the score are broken by smaller violation count, larger LSMI,
    then smaller t, gamma, eta.  With more than two clusters the eta grid is
    forced to {0}.  Raises if every candidate fails.
    """
    t_grid = tuple(int(t) for t in (DEFAULT_T_GRID if t_grid is None else t_grid))
    gamma_grid = tuple(float(g) for g in (DEFAULT_GAMMA_GRID if gamma_grid is None else gamma_grid))
    eta_grid = tuple(float(e) for e in (DEFAULT_ETA_GRID if eta_grid is None else eta_grid))
    if not t_grid or not gamma_grid or not eta_grid:
        raise ValueError("grids must be nonempty")
    if c > 2 and any(e != 0 for e in eta_grid):
        warnings.warn(
            f"eta grid forced to {{0}} because c={c} > 2 (cannot-link squares "
            "only encode must-links for binary problems)",
            RuntimeWarning,
            stacklevel=2,
        )
        eta_grid = (0.0,)
    cfg = lsmi_cfg or LsmiConfig()
    jobs = max(1, int(jobs))
    work = [
        (ds, cs, t, gamma, eta, c, cfg, seed)
        for t in t_grid
        for gamma in gamma_grid
        for eta in eta_grid
    ]
    if jobs == 1 or len(work) == 1:
        candidates = [_evaluate_candidate(job) for job in work]
    else:
        with ProcessPoolExecutor(max_workers=min(jobs, len(work))) as pool:
            candidates = list(pool.map(_evaluate_candidate, work))

    failures = [cand for cand in candidates if cand.error is not None]
    if len(failures) == len(candidates):
        detail = "; ".join(
            f"(t={cand.t}, gamma={cand.gamma}, eta={cand.eta}): {cand.error}"
            for cand in failures
        )
        raise RuntimeError(f"all {len(candidates)} grid candidates failed: {detail}")

    score_candidates(candidates)
    best = min(
        (cand for cand in candidates if cand.error is None),
        key=lambda cand: (-cand.score, cand.n_v, -cand.lsmi, cand.t, cand.gamma, cand.eta),
    )
    _, model = solver.cluster(ds, cs, best.t, best.gamma, best.eta, c)
    return GridSearchResult(best=best, model=model, candidates=candidates)
