"""Erdos-Renyi sampling and a compact immutable adjacency structure.

Graphs are stored in compressed sparse row form: ``offsets[v]:offsets[v+1]``
slices ``neighbors`` to give the strictly increasing neighbor list of vertex
``v``.  Both directions of every edge are stored, so ``len(neighbors)`` is
twice the edge count.  Instances are immutable after construction and safe to
share across threads.

All randomness flows through numpy's PCG64 generator (``default_rng``).
Sampling is deterministic per seed: identical ``(n, p, seed)`` give an
identical graph, bit for bit.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

_MAGIC = b"MDGRAPH1"
_VERSION = 1
_HEADER = struct.Struct("<8sIQQ")


def _rng(seed) -> np.random.Generator:
    """Build a PCG64 generator from an int seed, a SeedSequence, or pass
    an existing Generator through."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


class Graph:
    """Immutable undirected graph on vertices ``0..n-1`` in CSR form.

    ``p`` records the sampling density when the graph came from
    :func:`sample_gnp`; it is metadata only and not part of equality or
    serialization.
    """

    def __init__(self, n: int, offsets, neighbors, p: float | None = None):
        self.n = int(n)
        self.offsets = np.ascontiguousarray(offsets, dtype=np.int64)
        self.neighbors = np.ascontiguousarray(neighbors, dtype=np.int32)
        self.p = p
        if self.n < 1:
            raise ValueError("graph needs at least one vertex")
        if self.offsets.shape != (self.n + 1,):
            raise ValueError("offsets must have length n + 1")
        if self.offsets[0] != 0 or self.offsets[-1] != self.neighbors.size:
            raise ValueError("offsets must start at 0 and end at len(neighbors)")
        self.offsets.setflags(write=False)
        self.neighbors.setflags(write=False)

    @property
    def edge_count(self) -> int:
        return self.neighbors.size // 2

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.diff(self.offsets)

    @cached_property
    def _adjacency(self) -> sp.csr_matrix:
        """scipy CSR view of the adjacency matrix, used for the hot loops."""
        data = np.ones(self.neighbors.size, dtype=np.int32)
        indptr = self.offsets.astype(np.int32) if self.neighbors.size < 2**31 else self.offsets
        return sp.csr_matrix((data, self.neighbors, indptr), shape=(self.n, self.n))

    def neighbors_of(self, v: int) -> np.ndarray:
        if not 0 <= v < self.n:
            raise ValueError(f"vertex {v} out of range for n={self.n}")
        return self.neighbors[self.offsets[v]:self.offsets[v + 1]]

    def validate(self) -> None:
        """Check every structural invariant; raises ValueError on the first
        violation.  O(n + m), meant for tests and untrusted input."""
        offs, nbrs, n = self.offsets, self.neighbors, self.n
        if np.any(np.diff(offs) < 0):
            raise ValueError("offsets must be non-decreasing")
        if nbrs.size % 2 != 0:
            raise ValueError("adjacency length must be even (both edge directions stored)")
        if nbrs.size:
            if nbrs.min() < 0 or nbrs.max() >= n:
                raise ValueError("neighbor id out of range")
            rows = np.repeat(np.arange(n, dtype=np.int32), self.degrees)
            if np.any(nbrs == rows):
                raise ValueError("self-loop found")
            same_row = rows[1:] == rows[:-1]
            if np.any(same_row & (np.diff(nbrs) <= 0)):
                raise ValueError("neighbor lists must be strictly increasing")
            a = self._adjacency
            if (a != a.T).nnz != 0:
                raise ValueError("adjacency is not symmetric")

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edge_count}, p={self.p})"


def from_edges(n: int, edges, p: float | None = None) -> Graph:
    """Build a graph from an iterable of (u, v) pairs.

    Rejects self-loops and duplicate edges; order and orientation of the
    input pairs is irrelevant.
    """
    pairs = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
    if pairs.size and (pairs.min() < 0 or pairs.max() >= n):
        raise ValueError("edge endpoint out of range")
    if np.any(pairs[:, 0] == pairs[:, 1]):
        raise ValueError("self-loops are not allowed")
    u = np.minimum(pairs[:, 0], pairs[:, 1]).astype(np.int32)
    v = np.maximum(pairs[:, 0], pairs[:, 1]).astype(np.int32)
    return _assemble(n, u, v, p)


def _assemble(n: int, u: np.ndarray, v: np.ndarray, p: float | None) -> Graph:
    """CSR assembly from one-direction edge endpoints (u != v elementwise)."""
    rows = np.concatenate([u, v])
    cols = np.concatenate([v, u])
    coo = sp.coo_matrix((np.ones(rows.size, dtype=np.int32), (rows, cols)), shape=(n, n))
    csr = coo.tocsr()
    csr.sort_indices()
    if np.any(csr.data != 1):
        raise ValueError("duplicate edges are not allowed")
    return Graph(n, csr.indptr, csr.indices, p)


def sample_gnp(n: int, p: float, seed) -> Graph:
    """Sample G(n, p) in expected O(n + m) time via geometric skips.

    The n(n-1)/2 vertex pairs are enumerated in lexicographic order and the
    gap to the next present edge is drawn geometrically, so the dense
    Bernoulli sweep is never materialized.  Linear pair indices are mapped
    back to (u, v) by inverting the row-start quadratic, with an exact
    integer fix-up of the float root.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    total = n * (n - 1) // 2
    if p == 0.0 or total == 0:
        return Graph(n, np.zeros(n + 1, dtype=np.int64), np.empty(0, dtype=np.int32), p)
    rng = _rng(seed)

    expect = total * p
    chunk = int(expect + 10.0 * math.sqrt(expect + 1.0)) + 16
    parts: list[np.ndarray] = []
    pos = 0
    while pos <= total:
        gaps = rng.geometric(p, size=chunk)
        # tiny p saturates the int64 inversion; any such gap overshoots the
        # pair range anyway, so clamping keeps the cumsum overflow-free
        np.clip(gaps, 1, total + 1, out=gaps)
        cum = np.cumsum(gaps, dtype=np.int64) + pos
        parts.append(cum)
        pos = int(cum[-1])
        chunk = max(chunk // 8, 1024)
    lin = np.concatenate(parts) - 1
    lin = lin[lin < total]

    # pairs before row u: R(u) = u*(n-1) - u*(u-1)/2; invert u^2 - (2n-1)u + 2t = 0
    b = 2.0 * n - 1.0
    u = ((b - np.sqrt(b * b - 8.0 * lin)) / 2.0).astype(np.int64)
    np.clip(u, 0, n - 2, out=u)

    def row_start(w):
        return w * (n - 1) - w * (w - 1) // 2

    u -= row_start(u) > lin
    u += row_start(u + 1) <= lin
    v = lin - row_start(u) + u + 1
    return _assemble(n, u.astype(np.int32), v.astype(np.int32), p)


def degree_stats(g: Graph) -> tuple[int, int, float]:
    """(min degree, max degree, mean degree)."""
    d = g.degrees
    return int(d.min()), int(d.max()), float(d.mean())


@dataclass(frozen=True)
class JumblednessEstimate:
    """Sampled lower-bound witness for the discrepancy coefficient beta.

    ``beta_hat`` is the largest normalized discrepancy
    |e(U,V) - p|U||V|| / sqrt(|U||V|) seen over the sampled subset pairs;
    the true coefficient is at least this large.
    """

    beta_hat: float
    pairs_tested: int
    max_discrepancy: float
    min_degree: int


def _gathered_neighbors(g: Graph, verts: np.ndarray) -> np.ndarray:
    """Concatenated neighbor lists of ``verts`` without a Python loop."""
    starts = g.offsets[verts]
    counts = g.offsets[verts + 1] - starts
    totaln = int(counts.sum())
    if totaln == 0:
        return np.empty(0, dtype=np.int32)
    ends = np.cumsum(counts)
    idx = np.arange(totaln, dtype=np.int64) - np.repeat(ends - counts, counts) + np.repeat(starts, counts)
    return g.neighbors[idx]


def edges_between(g: Graph, u_set, v_set) -> int:
    """Ordered-pair edge count e(U, V) = #{(u, v): u in U, v in V, uv an edge}.

    Edges with both endpoints in the overlap of U and V are counted twice,
    once per orientation.
    """
    u = np.unique(np.asarray(u_set, dtype=np.int64))
    v = np.unique(np.asarray(v_set, dtype=np.int64))
    for s in (u, v):
        if s.size and (s.min() < 0 or s.max() >= g.n):
            raise ValueError("vertex id out of range")
    if u.size == 0 or v.size == 0:
        return 0
    member = np.zeros(g.n, dtype=bool)
    member[v] = True
    return int(np.count_nonzero(member[_gathered_neighbors(g, u)]))


def estimate_jumbledness(
    g: Graph,
    p: float,
    pairs: int = 200,
    subset_size_range: tuple[int, int] = (0, 0),
    seed=0,
) -> JumblednessEstimate:
    """Estimate the discrepancy coefficient by sampling disjoint subset pairs.

    Each round draws disjoint U, V of sizes uniform in ``subset_size_range``
    and records |e(U,V) - p|U||V|| / sqrt(|U||V|).  Pairs are drawn disjoint
    so a complete graph has zero discrepancy (the diagonal never contributes).
    ``subset_size_range=(0, 0)`` defaults to sizes around n/4.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if pairs < 1:
        raise ValueError("need at least one subset pair")
    lo, hi = subset_size_range
    if lo == 0 and hi == 0:
        hi = max(g.n // 4, 1)
        lo = max(hi // 2, 1)
    if not 1 <= lo <= hi:
        raise ValueError("empty subset size range")
    if 2 * hi > g.n:
        raise ValueError("subset sizes must allow disjoint pairs (2*max <= n)")
    rng = _rng(seed)
    member = np.zeros(g.n, dtype=bool)
    worst = 0.0
    for _ in range(pairs):
        su = int(rng.integers(lo, hi + 1))
        sv = int(rng.integers(lo, hi + 1))
        both = rng.choice(g.n, size=su + sv, replace=False)
        u, v = both[:su], both[su:]
        member[v] = True
        e = int(np.count_nonzero(member[_gathered_neighbors(g, u)]))
        member[v] = False
        disc = abs(e - p * su * sv) / math.sqrt(su * sv)
        if disc > worst:
            worst = disc
    mind = int(g.degrees.min())
    return JumblednessEstimate(beta_hat=worst, pairs_tested=pairs, max_discrepancy=worst, min_degree=mind)


def save_graph(g: Graph, path) -> None:
    """Write the little-endian binary dump: header (magic, version, n,
    edge_count), then offsets as u64 and neighbors as u32."""
    try:
        with open(path, "wb") as fh:
            fh.write(_HEADER.pack(_MAGIC, _VERSION, g.n, g.edge_count))
            fh.write(g.offsets.astype("<u8").tobytes())
            fh.write(g.neighbors.astype("<u4").tobytes())
    except OSError as exc:
        raise OSError(f"cannot write graph to {path}: {exc}") from exc


def load_graph(path) -> Graph:
    """Read a graph written by :func:`save_graph`; rejects bad magic,
    unknown versions, and truncated files."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise OSError(f"cannot read graph from {path}: {exc}") from exc
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated header")
    magic, version, n, edge_count = _HEADER.unpack_from(raw)
    if magic != _MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    if version != _VERSION:
        raise ValueError(f"{path}: unsupported version {version}")
    off_end = _HEADER.size + 8 * (n + 1)
    nbr_end = off_end + 4 * 2 * edge_count
    if len(raw) != nbr_end:
        raise ValueError(f"{path}: length {len(raw)} does not match header")
    offsets = np.frombuffer(raw, dtype="<u8", count=n + 1, offset=_HEADER.size).astype(np.int64)
    neighbors = np.frombuffer(raw, dtype="<u4", count=2 * edge_count, offset=off_end).astype(np.int32)
    return Graph(n, offsets, neighbors)
