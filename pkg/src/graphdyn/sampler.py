"""Seeded sampling of sparse W-random graphs G(W, rho_n, X_n).

Each unordered pair {i, j} (loops included) becomes an edge independently
with probability rho_n * Kbar_ij, where Kbar is the truncated kernel on the
grid.  Uniform variates come from a counter-based hash of
(seed, i, j), so a graph does not depend on the order in which pairs are
visited and row blocks can be generated in any order.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .errors import DegenerateDegreeError, DomainError
from .graphon import GraphonSpec, Schedule, cell_integrals, eval_w

POINTWISE = "pointwise"
CELL_AVERAGED = "cell_averaged"
VARIANTS = (POINTWISE, CELL_AVERAGED)

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1


def _mix64(z: np.ndarray) -> np.ndarray:
    # splitmix64 finaliser on uint64 arrays (wrapping arithmetic)
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def hash64(*words: int) -> int:
    """Stable 64-bit hash of a tuple of nonnegative integers."""
    h = np.zeros(1, dtype=np.uint64)
    for w in words:
        h = _mix64(h ^ np.array([int(w) & _MASK64], dtype=np.uint64)) + _GOLDEN
    return int(_mix64(h)[0])


def pair_uniforms(seed: int, i: np.ndarray, j: np.ndarray) -> np.ndarray:
    """Uniform [0, 1) variates for node pairs (0-based i, j), one per pair."""
    key = _mix64(np.array([seed & _MASK64], dtype=np.uint64) + _GOLDEN)
    ctr = (np.asarray(i, dtype=np.uint64) << np.uint64(32)) | np.asarray(j, dtype=np.uint64)
    h = _mix64(_mix64(ctr ^ key) + _GOLDEN)
    return (h >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


@dataclass(frozen=True)
class Grid:
    n: int

    @property
    def points(self) -> np.ndarray:
        return np.arange(1, self.n + 1, dtype=float) / self.n

    @property
    def cells(self) -> list:
        pts = np.arange(self.n + 1, dtype=float) / self.n
        return list(zip(pts[:-1], pts[1:]))


def build_grid(n: int) -> Grid:
    if int(n) != n or n < 2:
        raise DomainError(f"grid needs n >= 2 nodes, got {n}")
    return Grid(int(n))


def kernel_matrix(spec: GraphonSpec, rho: float, n: int, variant: str = POINTWISE,
                  rows: Optional[np.ndarray] = None) -> np.ndarray:
    """Truncated kernel min(1/rho, K_ij) on the grid.

    ``pointwise`` uses K_ij = W(x_i, x_j); ``cell_averaged`` uses the cell
    mean n^2 int_{I_i x I_j} W.
    """
    if variant not in VARIANTS:
        raise DomainError(f"unknown sampling variant {variant!r}")
    cap = 1.0 / rho
    pts = build_grid(n).points
    rows = np.arange(n) if rows is None else np.asarray(rows)
    if variant == POINTWISE:
        raw = eval_w(spec, pts[rows][:, None], pts[None, :])
    else:
        raw = cell_integrals(spec, n, "W", rows=rows) * float(n) ** 2
    return np.minimum(cap, raw)


def edge_probability(spec: GraphonSpec, schedule: Schedule, n: int, i: int, j: int,
                     variant: str = POINTWISE) -> float:
    """Probability that {i, j} is an edge; i, j are 1-based node labels."""
    if not (1 <= i <= n and 1 <= j <= n):
        raise DomainError(f"node indices must lie in 1..{n}")
    rho = schedule.rho(n)
    if variant == POINTWISE:
        k = min(1.0 / rho, float(eval_w(spec, i / n, j / n)))
    else:
        k = min(1.0 / rho, float(kernel_matrix(spec, rho, n, variant, rows=[i - 1])[0, j - 1]))
    return float(min(1.0, max(0.0, rho * k)))


def node_weights(spec: GraphonSpec, schedule: Schedule, n: int,
                 variant: str = POINTWISE) -> np.ndarray:
    """G_i = n^-1 sum_j Kbar_ij."""
    return kernel_matrix(spec, schedule.rho(n), n, variant).mean(axis=1)


def expected_degrees(spec: GraphonSpec, schedule: Schedule, n: int,
                     variant: str = POINTWISE) -> np.ndarray:
    """d_i = rho_n * n * G_i."""
    build_grid(n)
    rho = schedule.rho(n)
    d = rho * n * node_weights(spec, schedule, n, variant)
    if np.any(d <= 0):
        raise DegenerateDegreeError("some node has zero expected degree")
    return d


@dataclass(frozen=True, eq=False)
class SampledGraph:
    """One realisation of G(W, rho_n, X_n).

    The adjacency is stored as symmetric CSR arrays over 0-based nodes with
    sorted neighbour lists; a loop appears once in its own list.
    ``expected_degrees``/``node_weights`` are ``None`` for graphs loaded from
    disk without the generating graphon.
    """

    n: int
    rho: float
    seed: int
    variant: str
    indptr: np.ndarray
    indices: np.ndarray
    expected_degrees: Optional[np.ndarray] = None
    node_weights: Optional[np.ndarray] = None

    def neighbors(self, i: int) -> np.ndarray:
        """Sorted 0-based neighbours of 0-based node i."""
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def row_index(self) -> np.ndarray:
        return np.repeat(np.arange(self.n), self.degrees)

    def edge_list(self) -> np.ndarray:
        """Unordered edges as (i, j) with i <= j, 0-based, lexicographic."""
        r = self.row_index
        keep = r <= self.indices
        return np.column_stack([r[keep], self.indices[keep]])

    @property
    def num_edges(self) -> int:
        return int(np.count_nonzero(self.row_index <= self.indices))

    def to_csr(self) -> sp.csr_matrix:
        data = np.ones(len(self.indices))
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def same_structure(self, other: "SampledGraph") -> bool:
        return (self.n == other.n and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))


def graph_from_edges(n: int, edges: np.ndarray, rho: float, seed: int, variant: str,
                     expected: Optional[np.ndarray] = None,
                     weights: Optional[np.ndarray] = None) -> SampledGraph:
    """Build the symmetric CSR form from upper-triangle edges (0-based)."""
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    i, j = edges[:, 0], edges[:, 1]
    off = i != j
    rows = np.concatenate([i, j[off]])
    cols = np.concatenate([j, i[off]])
    order = np.lexsort((cols, rows))
    rows, cols = rows[order], cols[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
    return SampledGraph(n=n, rho=float(rho), seed=int(seed), variant=variant,
                        indptr=indptr, indices=cols.astype(np.int64),
                        expected_degrees=expected, node_weights=weights)


def sample_graph(spec: GraphonSpec, schedule: Schedule, n: int, seed: int,
                 variant: str = POINTWISE, block_rows: int = 512) -> SampledGraph:
    """Draw one graph; identical arguments give an identical graph."""
    build_grid(n)
    rho = schedule.rho(n)
    seed = int(seed) & _MASK64
    chunks, means = [], []
    for start in range(0, n, block_rows):
        rows = np.arange(start, min(n, start + block_rows))
        kbar = kernel_matrix(spec, rho, n, variant, rows=rows)
        means.append(kbar.mean(axis=1))
        prob = np.minimum(1.0, rho * kbar)
        ii, jj = np.nonzero(np.triu(np.ones((len(rows), n), dtype=bool), k=start))
        u = pair_uniforms(seed, rows[ii], jj)
        hit = u < prob[ii, jj]
        chunks.append(np.column_stack([rows[ii[hit]], jj[hit]]))
    edges = np.concatenate(chunks)
    weights = np.concatenate(means)
    return graph_from_edges(n, edges, rho, seed, variant,
                            expected=rho * n * weights, weights=weights)


@dataclass(frozen=True)
class DegreeSummary:
    degrees: np.ndarray
    mean_degree: float
    num_edges: int
    density: float


def degree_statistics(graph: SampledGraph) -> DegreeSummary:
    """Realised degrees (a loop counts once) and edge density |E| / (n(n+1)/2)."""
    deg = graph.degrees.astype(np.int64)
    m = graph.num_edges
    n = graph.n
    return DegreeSummary(degrees=deg, mean_degree=float(deg.mean()), num_edges=m,
                         density=m / (n * (n + 1) / 2))
