"""Directed multi-edge hiring network: loading, reachability, geodesics, deciles."""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from functools import cached_property
from typing import TextIO

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

N_DECILES = 10


class LoadError(ValueError):
    """Malformed input file; message names the source and line."""

    def __init__(self, message, source="<input>", line=None):
        where = source if line is None else f"{source}:{line}"
        super().__init__(f"{where}: {message}")
        self.source = source
        self.line = line


class InvariantError(ValueError):
    """A loaded or computed object violates a documented invariant."""


@dataclass(frozen=True)
class Institution:
    id: int
    label: str


@dataclass(frozen=True, eq=False)
class HiringNetwork:
    """Immutable directed multigraph; one edge per placed person.

    ``src[i] -> dst[i]`` means doctorate at ``src[i]``, faculty job at
    ``dst[i]``.  Edges are kept sorted by (src, dst).  ``vertex_pi`` holds
    precomputed prestige ranks when the vertex file carried them.
    """

    institutions: tuple[Institution, ...]
    src: np.ndarray
    dst: np.ndarray
    vertex_pi: np.ndarray | None = field(default=None)

    def __post_init__(self):
        n = len(self.institutions)
        src = np.asarray(self.src, dtype=np.int64)
        dst = np.asarray(self.dst, dtype=np.int64)
        if src.shape != dst.shape or src.ndim != 1:
            raise InvariantError("src and dst must be 1-d arrays of equal length")
        if src.size and (src.min() < 0 or dst.min() < 0 or src.max() >= n or dst.max() >= n):
            raise InvariantError("edge endpoint outside [0, N)")
        for i, inst in enumerate(self.institutions):
            if inst.id != i:
                raise InvariantError(f"institution ids must be dense 0..N-1; got {inst.id} at {i}")
        labels = [inst.label for inst in self.institutions]
        if any(not lab for lab in labels) or len(set(labels)) != n:
            raise InvariantError("institution labels must be unique and non-empty")
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        src.setflags(write=False)
        dst.setflags(write=False)
        object.__setattr__(self, "src", src)
        object.__setattr__(self, "dst", dst)
        if self.vertex_pi is not None:
            pi = np.asarray(self.vertex_pi, dtype=float)
            if pi.shape != (n,):
                raise InvariantError("vertex_pi must have one entry per node")
            pi.setflags(write=False)
            object.__setattr__(self, "vertex_pi", pi)

    @classmethod
    def from_edges(cls, n, edges, labels=None, vertex_pi=None):
        """Convenience constructor from a node count and (src, dst) pairs."""
        if labels is None:
            labels = [str(i) for i in range(n)]
        edges = list(edges)
        src = np.array([e[0] for e in edges], dtype=np.int64)
        dst = np.array([e[1] for e in edges], dtype=np.int64)
        insts = tuple(Institution(i, lab) for i, lab in enumerate(labels))
        return cls(insts, src, dst, vertex_pi)

    @property
    def N(self):
        return len(self.institutions)

    @property
    def n_edges(self):
        return int(self.src.size)

    @property
    def edges(self):
        return list(zip(self.src.tolist(), self.dst.tolist()))

    @property
    def labels(self):
        return [inst.label for inst in self.institutions]

    @cached_property
    def counts(self):
        """Dense N x N multiplicity matrix, self-loops included on the diagonal."""
        c = np.zeros((self.N, self.N), dtype=np.int64)
        np.add.at(c, (self.src, self.dst), 1)
        return c

    @cached_property
    def csr(self):
        """(indptr, heads, copy_idx) out-edge arrays in canonical edge order.

        copy_idx numbers parallel copies of the same (src, dst) pair 0, 1, ...
        """
        n = self.N
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, self.src + 1, 1)
        indptr = np.cumsum(indptr)
        heads = self.dst.copy()
        copy_idx = np.zeros(self.n_edges, dtype=np.int64)
        for i in range(1, self.n_edges):
            if self.src[i] == self.src[i - 1] and self.dst[i] == self.dst[i - 1]:
                copy_idx[i] = copy_idx[i - 1] + 1
        return indptr, heads, copy_idx

    @cached_property
    def _simple_adjacency(self):
        # parallel edges collapse; self-loops dropped (they never shorten a path)
        a = (self.counts > 0).astype(np.int8)
        np.fill_diagonal(a, 0)
        return csr_matrix(a)

    @cached_property
    def hop_distances(self):
        """All-pairs directed hop counts; inf where unreachable."""
        if self.N == 0:
            return np.zeros((0, 0))
        return shortest_path(self._simple_adjacency, directed=True, unweighted=True)

    @cached_property
    def reachability(self):
        return np.isfinite(self.hop_distances)

    @cached_property
    def unreachable(self):
        """(indptr, nodes) CSR listing, for each u, the ids not reachable from u."""
        unr = ~self.reachability
        indptr = np.concatenate([[0], np.cumsum(unr.sum(axis=1))]).astype(np.int64)
        nodes = np.nonzero(unr)[1].astype(np.int64)
        return indptr, nodes

    def subgraph(self, nodes):
        """Induced sub-network on ``nodes`` (sorted); returns (net, old ids)."""
        keep = np.array(sorted(set(int(v) for v in nodes)), dtype=np.int64)
        remap = np.full(self.N, -1, dtype=np.int64)
        remap[keep] = np.arange(keep.size)
        mask = (remap[self.src] >= 0) & (remap[self.dst] >= 0)
        insts = tuple(Institution(i, self.institutions[old].label) for i, old in enumerate(keep))
        pi = None if self.vertex_pi is None else self.vertex_pi[keep]
        sub = HiringNetwork(insts, remap[self.src[mask]], remap[self.dst[mask]], pi)
        return sub, keep


def _check_id(net, u):
    if not 0 <= int(u) < net.N:
        raise IndexError(f"node id {u} outside [0, {net.N})")
    return int(u)


def _rows(stream: TextIO | str, source):
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    for lineno, raw in enumerate(stream, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        yield lineno, line.split("\t")


def _parse_int(text, what, source, lineno):
    try:
        return int(text.strip())
    except ValueError:
        raise LoadError(f"malformed {what} {text!r}", source, lineno) from None


def load_network(vertex_text, edge_text, vertex_source="<vertices>",
                 edge_source="<edges>") -> HiringNetwork:
    """Build a validated network from vertex and edge TSV streams.

    Vertex rows are ``id<TAB>label[<TAB>pi]``; edge rows are
    ``src<TAB>dst`` (one hire) or ``src<TAB>dst<TAB>count``.
    """
    labels = {}
    pis = {}
    for lineno, cols in _rows(vertex_text, vertex_source):
        if len(cols) not in (2, 3):
            raise LoadError(f"expected 2 or 3 columns, got {len(cols)}", vertex_source, lineno)
        vid = _parse_int(cols[0], "id", vertex_source, lineno)
        label = cols[1].strip()
        if vid in labels:
            raise LoadError(f"duplicate id {vid}", vertex_source, lineno)
        if not label:
            raise LoadError("empty label", vertex_source, lineno)
        labels[vid] = label
        if len(cols) == 3:
            try:
                pis[vid] = float(cols[2])
            except ValueError:
                raise LoadError(f"malformed pi {cols[2]!r}", vertex_source, lineno) from None
    n = len(labels)
    if sorted(labels) != list(range(n)):
        raise LoadError("vertex ids must be exactly 0..N-1", vertex_source)
    if len(set(labels.values())) != n:
        raise LoadError("vertex labels must be unique", vertex_source)
    if pis and len(pis) != n:
        raise LoadError("pi column must be given for every vertex or none", vertex_source)

    src, dst = [], []
    for lineno, cols in _rows(edge_text, edge_source):
        if len(cols) not in (2, 3):
            raise LoadError(f"expected 2 or 3 columns, got {len(cols)}", edge_source, lineno)
        u = _parse_int(cols[0], "src", edge_source, lineno)
        v = _parse_int(cols[1], "dst", edge_source, lineno)
        for x in (u, v):
            if x not in labels:
                raise LoadError(f"unknown endpoint id {x}", edge_source, lineno)
        count = 1
        if len(cols) == 3:
            count = _parse_int(cols[2], "count", edge_source, lineno)
            if count <= 0:
                raise LoadError(f"non-positive count {count}", edge_source, lineno)
        src.extend([u] * count)
        dst.extend([v] * count)

    insts = tuple(Institution(i, labels[i]) for i in range(n))
    pi = np.array([pis[i] for i in range(n)]) if pis else None
    return HiringNetwork(insts, np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64), pi)


def load_network_files(vertex_path, edge_path) -> HiringNetwork:
    with open(vertex_path, encoding="utf-8") as fv, open(edge_path, encoding="utf-8") as fe:
        return load_network(fv, fe, str(vertex_path), str(edge_path))


def write_network(net: HiringNetwork, vertex_out: TextIO, edge_out: TextIO, aggregate=False):
    for inst in net.institutions:
        extra = "" if net.vertex_pi is None else f"\t{net.vertex_pi[inst.id]:.6g}"
        vertex_out.write(f"{inst.id}\t{inst.label}{extra}\n")
    if aggregate:
        pairs, mult = np.unique(np.stack([net.src, net.dst], axis=1), axis=0, return_counts=True)
        for (u, v), m in zip(pairs.tolist(), mult.tolist()):
            edge_out.write(f"{u}\t{v}\t{m}\n")
    else:
        for u, v in net.edges:
            edge_out.write(f"{u}\t{v}\n")


def reachable_set(net: HiringNetwork, u) -> set[int]:
    """Nodes reachable from ``u`` along directed paths, ``u`` included."""
    u = _check_id(net, u)
    return set(np.flatnonzero(net.reachability[u]).tolist())


def mean_geodesic_length(net: HiringNetwork, u, within=None):
    """Mean hop distance from ``u`` to every other node it reaches.

    ``within`` optionally restricts targets to a node subset.  Returns
    ``None`` when ``u`` reaches nothing but itself.
    """
    u = _check_id(net, u)
    d = net.hop_distances[u].copy()
    d[u] = np.inf
    if within is not None:
        mask = np.zeros(net.N, dtype=bool)
        mask[list(within)] = True
        d[~mask] = np.inf
    finite = d[np.isfinite(d)]
    if finite.size == 0:
        return None
    return float(finite.mean())


def eccentricity(net: HiringNetwork, u) -> int:
    """Largest hop distance from ``u`` to a node it reaches (0 if none)."""
    u = _check_id(net, u)
    d = net.hop_distances[u]
    return int(d[np.isfinite(d)].max())


def strongly_connected_components(net: HiringNetwork) -> list[list[int]]:
    if net.N == 0:
        return []
    _, lab = connected_components(net._simple_adjacency, directed=True, connection="strong")
    comps = {}
    for v, c in enumerate(lab.tolist()):
        comps.setdefault(c, []).append(v)
    return sorted(comps.values(), key=lambda c: (-len(c), c[0]))


def largest_scc(net: HiringNetwork):
    """Induced sub-network on the largest SCC (ties: smallest member id).

    Returns ``(sub, old_ids)``; ``old_ids[i]`` is the original id of node i.
    """
    comps = strongly_connected_components(net)
    return net.subgraph(comps[0])


def decile_groups(mean_rank, n_groups=N_DECILES) -> list[np.ndarray]:
    """Split node ids into prestige groups, most prestigious first.

    Nodes are ordered by (mean_rank, id); earlier groups absorb the
    remainder when N is not divisible by ``n_groups``.
    """
    mean_rank = np.asarray(mean_rank, dtype=float)
    n = mean_rank.size
    if n < n_groups:
        raise ValueError(f"need at least {n_groups} nodes for {n_groups} groups, got {n}")
    order = np.lexsort((np.arange(n), mean_rank))
    return [g.copy() for g in np.array_split(order, n_groups)]


def decile_density_matrix(net: HiringNetwork, scores) -> np.ndarray:
    """10 x 10 edge density between prestige deciles.

    Cell (a, b) is the number of edges from decile a to decile b divided by
    |a| * |b|.  ``scores`` is a PrestigeScores or a mean-rank array.
    """
    mean_rank = getattr(scores, "mean_rank", scores)
    groups = decile_groups(mean_rank)
    which = np.empty(net.N, dtype=np.int64)
    for g, members in enumerate(groups):
        which[members] = g
    block = np.zeros((N_DECILES, N_DECILES))
    np.add.at(block, (which[net.src], which[net.dst]), 1)
    sizes = np.array([len(g) for g in groups], dtype=float)
    return block / np.outer(sizes, sizes)


def write_matrix_csv(matrix, out: TextIO):
    for row in np.asarray(matrix):
        out.write(",".join(f"{x:.6g}" for x in row) + "\n")


def placement_concentration(net: HiringNetwork, share=0.5) -> int:
    """Smallest number of doctoral institutions producing >= ``share`` of all hires."""
    out_deg = np.bincount(net.src, minlength=net.N)
    cum = np.cumsum(np.sort(out_deg)[::-1])
    return int(np.searchsorted(cum, share * net.n_edges - 1e-9) + 1)

