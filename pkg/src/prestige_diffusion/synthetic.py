"""Seeded generators: random digraphs, core-periphery hiring hierarchies, careers corpora."""

from __future__ import annotations

import numpy as np

from .adoption import HIRING, NON_HIRING, NULL, FacultyCareer, TopicSpec
from .graph import HiringNetwork

DEMO_TOPIC = TopicSpec("topic modeling", ("topic modeling", "topic model", "latent dirichlet allocation"))


def random_digraph(n, m, seed=0, self_loops=False, multi=True) -> HiringNetwork:
    """``m`` edges with uniformly random endpoints (parallel edges allowed when ``multi``)."""
    rng = np.random.default_rng(seed)
    edges = []
    seen = set()
    max_simple = n * n if self_loops else n * (n - 1)
    if not multi and m > max_simple:
        raise ValueError("too many edges for a simple digraph")
    while len(edges) < m:
        u, v = rng.integers(0, n, size=2).tolist()
        if u == v and not self_loops:
            continue
        if not multi and (u, v) in seen:
            continue
        seen.add((u, v))
        edges.append((u, v))
    return HiringNetwork.from_edges(n, edges)


def core_periphery_hierarchy(n=205, n_edges=5032, up_fraction=0.23, self_loop_fraction=0.08,
                             production_exponent=0.5, production_cutoff=3.0, seed=0):
    """Hiring network with a planted prestige order and steep placement inequality.

    Doctoral production falls off as
    ``(rank + 1) ** -production_exponent * exp(-production_cutoff * rank / n)``,
    so the least prestigious departments place almost nobody;
    a placement goes to the doctoral institution itself with probability
    ``self_loop_fraction``, above it with probability ``up_fraction`` among
    the rest, and otherwise below it.  Hiring departments are drawn with
    weight decaying mildly in rank.  Node ids are a random relabelling of
    the planted order.

    Returns ``(net, true_rank)`` where ``true_rank[id]`` is 1-based.
    """
    rng = np.random.default_rng(seed)
    rank = np.arange(n)
    produce = (rank + 1.0) ** -production_exponent * np.exp(-production_cutoff * rank / n)
    produce /= produce.sum()
    size = np.exp(-rank / n)
    src_rank = rng.choice(n, size=n_edges, p=produce)
    dst_rank = np.empty(n_edges, dtype=np.int64)
    for i, r in enumerate(src_rank):
        u = rng.random()
        if u < self_loop_fraction:
            dst_rank[i] = r
            continue
        above = rng.random() < up_fraction
        pool = np.arange(0, r) if above else np.arange(r + 1, n)
        if pool.size == 0:
            pool = np.arange(r + 1, n) if above else np.arange(0, r)
        w = size[pool]
        dst_rank[i] = rng.choice(pool, p=w / w.sum())
    ids = rng.permutation(n)  # ids[planted rank] -> node id
    true_rank = np.empty(n, dtype=np.int64)
    true_rank[ids] = rank + 1
    labels = [f"U{i:03d}" for i in range(n)]
    net = HiringNetwork.from_edges(n, zip(ids[src_rank].tolist(), ids[dst_rank].tolist()), labels)
    return net, true_rank


# ---------------------------------------------------------------- careers


def _title(rng, on_topic):
    if on_topic:
        heads = ["Scalable topic modeling for", "A topic model of", "Latent Dirichlet allocation in"]
    else:
        heads = ["Fast algorithms for", "Verified compilation of", "Secure protocols for",
                 "Learning representations of", "Energy-aware scheduling in"]
    tails = ["streams", "graphs", "sensor networks", "text corpora", "databases", "robots"]
    return f"{heads[rng.integers(len(heads))]} {tails[rng.integers(len(tails))]} {rng.integers(10**6)}"


def planted_department(rng, dept, kind, n_faculty=6, n_institutions=50, fid_prefix=None):
    """Careers at one department whose correct label is ``kind``.

    Returns (careers, expected (kind, adopter faculty_id, year)).
    """
    prefix = fid_prefix or f"d{dept}"
    careers = []
    base = int(rng.integers(1985, 1995))
    incumbents = max(n_faculty - 1, 1)
    for j in range(incumbents):
        hire = base + j
        pubs = [(y, _title(rng, False)) for y in range(hire - 3, 2016) if rng.random() < 0.7]
        careers.append((f"{prefix}-f{j}", hire, pubs))
    adopter = None
    if kind == HIRING:
        t = int(rng.integers(2000, 2010))
        fid = f"{prefix}-new"
        pubs = [(y, _title(rng, False)) for y in range(t - 4, 2016) if rng.random() < 0.5]
        pubs.append((t - int(rng.integers(1, 3)), _title(rng, True)))
        pubs.append((t + int(rng.integers(0, 4)), _title(rng, True)))
        careers.append((fid, t, pubs))
        # an incumbent may follow later; that must not change the label
        if rng.random() < 0.5:
            careers[0][2].append((t + int(rng.integers(1, 5)), _title(rng, True)))
        adopter = (HIRING, fid, t)
    elif kind == NON_HIRING:
        y0 = int(rng.integers(2000, 2008))
        careers[0][2].append((y0, _title(rng, True)))
        careers[0][2].append((y0 + 1, _title(rng, True)))
        if rng.random() < 0.5:
            t = y0 + int(rng.integers(1, 5))
            pubs = [(t - 1, _title(rng, True)), (t + 1, _title(rng, True))]
            careers.append((f"{prefix}-late", t, pubs))
        adopter = (NON_HIRING, careers[0][0], y0)
    else:
        adopter = (NULL, None, None)
    out = [FacultyCareer(fid, int(rng.integers(n_institutions)), dept, hire, tuple(pubs))
           for fid, hire, pubs in careers]
    return out, adopter


def planted_corpus(kinds, seed=0, n_institutions=50):
    """Careers for departments 0..len(kinds)-1 with the given planted labels."""
    rng = np.random.default_rng(seed)
    careers, expected = [], {}
    for dept, kind in enumerate(kinds):
        cs, exp = planted_department(rng, dept, kind, n_institutions=n_institutions)
        careers.extend(cs)
        expected[dept] = exp
    return careers, expected


def null_corpus(n_departments=200, faculty_per_dept=8, pubs_per_faculty=(4, 14),
                on_topic_rate=0.04, seed=0, n_institutions=200):
    """Careers whose titles are dealt at random, independent of hiring dates."""
    rng = np.random.default_rng(seed)
    careers = []
    for d in range(n_departments):
        for j in range(faculty_per_dept):
            hire = int(rng.integers(1980, 2012))
            k = int(rng.integers(*pubs_per_faculty))
            years = rng.integers(hire - 4, 2017, size=k)
            pubs = tuple((int(y), _title(rng, rng.random() < on_topic_rate)) for y in years)
            careers.append(FacultyCareer(f"n{d}-{j}", int(rng.integers(n_institutions)), d, hire, pubs))
    return careers


def clustered_corpus(n_departments=120, seed=0, n_institutions=120):
    """Corpus where on-topic work clusters around hires: strong hiring signal."""
    rng = np.random.default_rng(seed)
    kinds = [HIRING if rng.random() < 0.7 else NON_HIRING for _ in range(n_departments)]
    return planted_corpus(kinds, seed=seed + 1, n_institutions=n_institutions)
