"""Compiled inner loops: counter-based uniforms, SI cascades, MVR swap walks.

Every random number used by the epidemic engine is a pure function of a
64-bit stream key and a small tuple of integers naming the decision it
drives (which edge copy, which node's jump).  Nothing is drawn
sequentially, so outcomes do not depend on scheduling, and two runs that
share a key share every decision (coupling across p and q).
"""

import numpy as np
from numba import njit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0

TAG_EDGE = 1
TAG_JUMP = 2
TAG_TARGET = 3


@njit(cache=True, nogil=True)
def mix64(z):
    # splitmix64 finalizer
    z = np.uint64(z)
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(cache=True, nogil=True)
def combine(h, x):
    return mix64(np.uint64(h) ^ mix64(np.uint64(x) + _GOLDEN))


@njit(cache=True, nogil=True)
def stream_key(master_seed, seed_node, trial):
    h = mix64(np.uint64(master_seed) + _GOLDEN)
    h = combine(h, np.uint64(seed_node))
    return combine(h, np.uint64(trial))


@njit(cache=True, nogil=True)
def uniform(key, tag, a, b, c):
    h = combine(np.uint64(key), np.uint64(tag))
    h = combine(h, np.uint64(a))
    h = combine(h, np.uint64(b))
    h = combine(h, np.uint64(c))
    return np.float64(h >> _S11) * _INV53


@njit(cache=True, nogil=True)
def si_trial(indptr, heads, copy_idx, unr_ptr, unr_nodes, seed, p, q, key,
             infect_step, queue):
    """One discrete-time cascade.

    infect_step must be all -1 on entry and is left holding the step at
    which each infected node was infected; queue must have length >= N.
    Returns (size, length, jumps); queue[:size] lists the infected nodes.
    """
    infect_step[seed] = 0
    queue[0] = seed
    head = 0
    tail = 1
    length = 0
    jumps = 0
    while head < tail:
        u = queue[head]
        head += 1
        t_next = infect_step[u] + 1
        for e in range(indptr[u], indptr[u + 1]):
            v = heads[e]
            if v == u or infect_step[v] >= 0:
                continue
            if uniform(key, TAG_EDGE, u, v, copy_idx[e]) < p:
                infect_step[v] = t_next
                queue[tail] = v
                tail += 1
                if t_next > length:
                    length = t_next
        n_unr = unr_ptr[u + 1] - unr_ptr[u]
        if q > 0.0 and n_unr > 0:
            if uniform(key, TAG_JUMP, u, 0, 0) < q:
                jumps += 1
                r = uniform(key, TAG_TARGET, u, 0, 0)
                j = int(r * n_unr)
                if j >= n_unr:
                    j = n_unr - 1
                v = unr_nodes[unr_ptr[u] + j]
                if infect_step[v] < 0:
                    infect_step[v] = t_next
                    queue[tail] = v
                    tail += 1
                    if t_next > length:
                        length = t_next
    return tail, length, jumps


@njit(cache=True, nogil=True)
def mc_cell(indptr, heads, copy_idx, unr_ptr, unr_nodes, n_nodes, seed, p, q,
            master_seed, n_trials):
    """Integer accumulators over trials 0..n_trials-1 of one (seed, p, q) cell.

    Returns (sum Y, sum Y^2, sum L, sum L^2, sum jumps).
    """
    infect_step = np.full(n_nodes, -1, dtype=np.int64)
    queue = np.empty(n_nodes, dtype=np.int64)
    sy = 0
    sy2 = 0
    sl = 0
    sl2 = 0
    sj = 0
    for i in range(n_trials):
        key = stream_key(master_seed, seed, i)
        y, l, jmp = si_trial(indptr, heads, copy_idx, unr_ptr, unr_nodes,
                           seed, p, q, key, infect_step, queue)
        for k in range(y):
            infect_step[queue[k]] = -1
        sy += y
        sy2 += y * y
        sl += l
        sl2 += l * l
        sj += jmp
    return sy, sy2, sl, sl2, sj


@njit(cache=True, nogil=True)
def count_violations_dense(counts, pi):
    n = counts.shape[0]
    total = 0
    for u in range(n):
        for v in range(n):
            if u != v and pi[v] < pi[u]:
                total += counts[u, v]
    return total


@njit(cache=True, nogil=True)
def mvr_walk(counts, pi, codes):
    """Zero-temperature rank-swap walk; mutates pi (0-based ranks) in place.

    codes encode ordered pairs a != b as a * (n - 1) + b', b' in [0, n - 1).
    A swap is kept iff it does not increase the violation count.
    """
    n = counts.shape[0]
    order = np.empty(n, dtype=np.int64)
    for v in range(n):
        order[pi[v]] = v
    viol = count_violations_dense(counts, pi)
    for s in range(codes.shape[0]):
        a = codes[s] // (n - 1)
        b = codes[s] % (n - 1)
        if b >= a:
            b += 1
        if pi[a] > pi[b]:
            a, b = b, a
        ra = pi[a]
        rb = pi[b]
        delta = counts[a, b] - counts[b, a]
        for r in range(ra + 1, rb):
            w = order[r]
            delta += counts[a, w] - counts[w, a] - counts[b, w] + counts[w, b]
        if delta <= 0:
            pi[a] = rb
            pi[b] = ra
            order[rb] = a
            order[ra] = b
            viol += delta
    return viol


@njit(cache=True, nogil=True)
def trial_outcomes(indptr, heads, copy_idx, unr_ptr, unr_nodes, n_nodes, seed, p, q,
                   master_seed, n_trials):
    """Per-trial (Y, L, jumps) arrays for trials 0..n_trials-1."""
    infect_step = np.full(n_nodes, -1, dtype=np.int64)
    queue = np.empty(n_nodes, dtype=np.int64)
    ys = np.empty(n_trials, dtype=np.int64)
    ls = np.empty(n_trials, dtype=np.int64)
    js = np.empty(n_trials, dtype=np.int64)
    for i in range(n_trials):
        key = stream_key(master_seed, seed, i)
        y, l, jmp = si_trial(indptr, heads, copy_idx, unr_ptr, unr_nodes,
                             seed, p, q, key, infect_step, queue)
        for k in range(y):
            infect_step[queue[k]] = -1
        ys[i] = y
        ls[i] = l
        js[i] = jmp
    return ys, ls, js
