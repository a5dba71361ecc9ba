"""Minimum violation rankings and the prestige scores averaged over them."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .graph import HiringNetwork, InvariantError
from .parallel import pmap


@dataclass(frozen=True)
class MVRConfig:
    restarts: int = 100
    steps_per_restart: int = 50_000
    seed: int = 0


@dataclass(frozen=True)
class PrestigeScores:
    """Per-node mean rank (1 = most prestigious)."""

    mean_rank: np.ndarray
    samples_used: int
    best_violations: int | None = None

    def check(self, require_permutation_sum=True):
        n = self.mean_rank.size
        if np.any(self.mean_rank < 1 - 1e-9) or np.any(self.mean_rank > n + 1e-9):
            raise InvariantError("mean_rank outside [1, N]")
        if require_permutation_sum and not np.isclose(self.mean_rank.sum(), n * (n + 1) / 2):
            raise InvariantError("mean_rank does not sum to N(N+1)/2")
        return self


@dataclass(frozen=True)
class MVRSamples:
    """Distinct lowest-violation rankings found; rows are 1-based rank vectors."""

    rankings: np.ndarray
    violations: int
    per_restart: np.ndarray


def _nonloop_counts(net):
    c = net.counts.copy()
    np.fill_diagonal(c, 0)
    return c


def count_violations(net: HiringNetwork, pi) -> int:
    """Edges (u, v), with multiplicity, whose head outranks the tail."""
    pi = np.asarray(pi)
    if pi.shape != (net.N,):
        raise ValueError("ranking must cover every node")
    mask = (net.src != net.dst) & (pi[net.dst] < pi[net.src])
    return int(mask.sum())


def _restart(counts, n, steps, seed, index):
    rng = np.random.default_rng([seed, index])
    pi = rng.permutation(n).astype(np.int64)
    if n < 2 or steps == 0:
        return pi, int(_kernels.count_violations_dense(counts, pi))
    codes = rng.integers(0, n * (n - 1), size=steps, dtype=np.int64)
    viol = _kernels.mvr_walk(counts, pi, codes)
    return pi, int(viol)


def minimize_violations(net: HiringNetwork, restarts=100, steps_per_restart=50_000,
                        seed=0, workers=1) -> MVRSamples:
    """Zero-temperature rank-swap search with random restarts.

    Each restart starts from a uniformly random permutation and proposes
    swaps of two nodes' ranks, keeping any swap that does not add
    violations.  Restart ``i`` draws only from a stream seeded by
    ``(seed, i)``, so output is independent of ``workers``.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    n = net.N
    counts = _nonloop_counts(net)
    results = pmap(lambda i: _restart(counts, n, steps_per_restart, seed, i),
                   range(restarts), workers)
    per_restart = np.array([v for _, v in results], dtype=np.int64)
    best = int(per_restart.min())
    distinct = {tuple((pi + 1).tolist()) for pi, v in results if v == best}
    rankings = np.array(sorted(distinct), dtype=np.int64).reshape(len(distinct), n)
    return MVRSamples(rankings, best, per_restart)


def average_prestige(samples) -> PrestigeScores:
    """Arithmetic mean of each node's rank across the sampled rankings."""
    if isinstance(samples, MVRSamples):
        best = samples.violations
        samples = samples.rankings
    else:
        best = None
    arr = np.asarray(samples, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.size == 0 or arr.shape[0] == 0:
        raise ValueError("cannot average an empty set of rankings")
    return PrestigeScores(arr.mean(axis=0), arr.shape[0], best)


def rank_network(net: HiringNetwork, config: MVRConfig = MVRConfig(), workers=1) -> PrestigeScores:
    samples = minimize_violations(net, config.restarts, config.steps_per_restart,
                                  config.seed, workers)
    return average_prestige(samples).check()


def scores_from_vertex_pi(net: HiringNetwork) -> PrestigeScores:
    if net.vertex_pi is None:
        raise ValueError("network has no precomputed pi column")
    return PrestigeScores(np.asarray(net.vertex_pi, dtype=float), 0).check(False)


def upward_fraction(net: HiringNetwork, scores) -> float:
    """Share of non-self-loop hires placed above their doctoral institution."""
    mean_rank = np.asarray(getattr(scores, "mean_rank", scores), dtype=float)
    keep = net.src != net.dst
    if not keep.any():
        return float("nan")
    up = mean_rank[net.dst[keep]] < mean_rank[net.src[keep]]
    return float(up.mean())
