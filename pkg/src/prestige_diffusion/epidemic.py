"""SI and SI-with-jump cascades on a hiring network, plus Monte Carlo sweeps.

Randomness model
----------------
A trial is identified by a 64-bit stream key.  Inside a trial, the
Bernoulli trial on the k-th parallel copy of edge (u, v) succeeds iff
``U(key, edge, u, v, k) < p``, and node u's jump fires iff
``U(key, jump, u) < q``; the jump target is picked by a third uniform.
Because these uniforms do not depend on p or q, runs sharing a key are
coupled: the infected set is monotone in both parameters.

Monte Carlo trial ``i`` from seed node ``s`` uses the key derived from
``(master_seed, s, i)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

import numpy as np

from . import _kernels
from .graph import HiringNetwork, eccentricity, mean_geodesic_length
from .parallel import pmap


@dataclass(frozen=True)
class EpidemicConfig:
    p: float
    q: float = 0.0
    trials: int = 1000
    master_seed: int = 0

    def __post_init__(self):
        _check_prob(self.p, "p")
        _check_prob(self.q, "q")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        _check_seed(self.master_seed)


@dataclass(frozen=True)
class EpidemicOutcome:
    infected: frozenset
    size_Y: int
    length_L: int
    jumps_taken: int
    infection_step: dict


@dataclass(frozen=True)
class CellSummary:
    node: int
    p: float
    q: float
    trials: int
    mean_size_frac: float
    mean_length: float
    mean_length_norm: float | None
    sd_size_frac: float
    sd_length: float
    mean_jumps: float


@dataclass(frozen=True)
class SweepResult:
    N: int
    rows: tuple

    def filter(self, q=None, p=None):
        rows = [r for r in self.rows
                if (q is None or r.q == q) and (p is None or r.p == p)]
        return SweepResult(self.N, tuple(rows))

    def p_values(self):
        return sorted({r.p for r in self.rows})


def _check_prob(x, name):
    if not (0.0 <= float(x) <= 1.0):
        raise ValueError(f"{name} must lie in [0, 1], got {x}")


def _check_seed(seed):
    if not (0 <= int(seed) < 2 ** 64):
        raise ValueError("master_seed must be a non-negative 64-bit integer")


def trial_stream(master_seed, seed_node, trial) -> int:
    """Stream key of Monte Carlo trial ``trial`` seeded at ``seed_node``."""
    _check_seed(master_seed)
    return int(_kernels.stream_key(np.uint64(master_seed), np.uint64(seed_node),
                                   np.uint64(trial)))


def _as_key(rng):
    if isinstance(rng, np.random.Generator):
        return int(rng.integers(0, 2 ** 63))
    key = int(rng)
    if not 0 <= key < 2 ** 64:
        raise ValueError("stream key must be a non-negative 64-bit integer")
    return key


_NO_JUMPS = (np.zeros(1, dtype=np.int64), np.zeros(0, dtype=np.int64))


def _run(net, seed_node, p, q, key, unreachable):
    if not 0 <= int(seed_node) < net.N:
        raise IndexError(f"seed node {seed_node} outside [0, {net.N})")
    _check_prob(p, "p")
    _check_prob(q, "q")
    indptr, heads, copy_idx = net.csr
    if unreachable is None:
        unr_ptr = np.zeros(net.N + 1, dtype=np.int64)
        unr_nodes = _NO_JUMPS[1]
    else:
        unr_ptr, unr_nodes = unreachable
    step = np.full(net.N, -1, dtype=np.int64)
    queue = np.empty(net.N, dtype=np.int64)
    y, length, jumps = _kernels.si_trial(indptr, heads, copy_idx, unr_ptr, unr_nodes,
                                         int(seed_node), float(p), float(q),
                                         np.uint64(key), step, queue)
    members = queue[:y].tolist()
    return EpidemicOutcome(frozenset(members), int(y), int(length), int(jumps),
                           {v: int(step[v]) for v in members})


def run_si(net: HiringNetwork, seed_node, p, rng) -> EpidemicOutcome:
    """One SI cascade from ``seed_node``.

    Each newly infected node tries every outgoing edge copy once, at the
    step after its own infection.  ``rng`` is a stream key (see
    :func:`trial_stream`) or a ``numpy.random.Generator`` to draw one from.
    """
    return _run(net, seed_node, p, 0.0, _as_key(rng), None)


def run_si_jump(net: HiringNetwork, seed_node, p, q, rng, unreachable=None) -> EpidemicOutcome:
    """SI cascade where each infected node also makes one jump attempt.

    With probability q the attempt infects a node drawn uniformly from the
    nodes that are statically unreachable from it.  ``unreachable`` is the
    (indptr, nodes) pair from ``net.unreachable``; computed when omitted.
    """
    if unreachable is None:
        unreachable = net.unreachable
    return _run(net, seed_node, p, q, _as_key(rng), unreachable)


def _cell(net, seed_node, p, q, trials, master_seed, ell):
    indptr, heads, copy_idx = net.csr
    unr_ptr, unr_nodes = _jump_lists(net, q)
    sy, sy2, sl, sl2, sj = _kernels.mc_cell(indptr, heads, copy_idx, unr_ptr, unr_nodes,
                                            net.N, int(seed_node), float(p), float(q),
                                            np.uint64(master_seed), int(trials))
    n, t = net.N, trials
    # integer accumulators; divide once
    var_y = max(t * sy2 - sy * sy, 0) / (t * t)
    var_l = max(t * sl2 - sl * sl, 0) / (t * t)
    mean_l = sl / t
    return CellSummary(
        node=int(seed_node), p=float(p), q=float(q), trials=int(trials),
        mean_size_frac=sy / (t * n),
        mean_length=mean_l,
        mean_length_norm=None if ell is None else mean_l / ell,
        sd_size_frac=float(np.sqrt(var_y)) / n,
        sd_length=float(np.sqrt(var_l)),
        mean_jumps=sj / t,
    )


def sample_outcomes(net: HiringNetwork, seed_node, config: EpidemicConfig):
    """Per-trial (Y, L, jumps) integer arrays for the trials behind :func:`mc_summary`."""
    indptr, heads, copy_idx = net.csr
    unr_ptr, unr_nodes = _jump_lists(net, config.q)
    return _kernels.trial_outcomes(indptr, heads, copy_idx, unr_ptr, unr_nodes, net.N,
                                   int(seed_node), float(config.p), float(config.q),
                                   np.uint64(config.master_seed), int(config.trials))


def _jump_lists(net, q):
    if q > 0:
        return net.unreachable
    return np.zeros(net.N + 1, dtype=np.int64), _NO_JUMPS[1]


def seed_geodesic(net: HiringNetwork, seed_node):
    """Mean hop distance over the seed's reachable set (None if it reaches nobody)."""
    return mean_geodesic_length(net, seed_node)


def mc_summary(net: HiringNetwork, seed_node, config: EpidemicConfig):
    """(mean Y/N, mean L, mean L/ell) over ``config.trials`` independent runs."""
    if config.trials < 1:
        raise ValueError("trials must be >= 1")
    c = _cell(net, seed_node, config.p, config.q, config.trials, config.master_seed,
              seed_geodesic(net, seed_node))
    return c.mean_size_frac, c.mean_length, c.mean_length_norm


def mc_cell(net: HiringNetwork, seed_node, config: EpidemicConfig) -> CellSummary:
    return _cell(net, seed_node, config.p, config.q, config.trials, config.master_seed,
                 seed_geodesic(net, seed_node))


def sweep(net: HiringNetwork, seeds: Sequence[int], p_grid, q_grid, trials,
          master_seed, workers=1) -> SweepResult:
    """One row per (seed, p, q), in seed-major, then p, then q order."""
    p_grid = [float(p) for p in p_grid]
    q_grid = [float(q) for q in q_grid]
    if not p_grid or not q_grid:
        raise ValueError("p_grid and q_grid must be nonempty")
    for p in p_grid:
        _check_prob(p, "p")
    for q in q_grid:
        _check_prob(q, "q")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    _check_seed(master_seed)
    seeds = [int(s) for s in seeds]
    ells = {s: seed_geodesic(net, s) for s in seeds}
    net.csr  # build cached structures once, before threads fan out
    if any(q > 0 for q in q_grid):
        net.unreachable
    cells = list(product(seeds, p_grid, q_grid))
    rows = pmap(lambda c: _cell(net, c[0], c[1], c[2], trials, master_seed, ells[c[0]]),
                cells, workers)
    return SweepResult(net.N, tuple(rows))


def percolation_reference(net: HiringNetwork, seed_node):
    """(|reachable set|, eccentricity): the p = 1, q = 0 outcome."""
    return int(net.reachability[seed_node].sum()), eccentricity(net, seed_node)
