"""Deterministic coupling operators and their application to states.

Two dense n x n matrices are assembled from a graphon:

* the averaged matrix  V_ij = Kbar_ij / G_i  (truncated kernel on grid points,
  row-normalised so every row mean is 1), and
* the Galerkin matrix  n^2 int_{I_i x I_j} K  for K = U (degree normalised)
  or K = W (edge-density scaling).

Coupling terms have the form  w_i = c_i sum_j M_ij D(u_j - u_i).
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from .errors import DegenerateDegreeError, DimensionError, DomainError, QuadratureError
from .graphon import (GraphonSpec, PowerLaw, Schedule, cell_integrals, eval_u, eval_w,
                      gauss_cell_integrals)
from .sampler import POINTWISE, SampledGraph, build_grid, kernel_matrix

AVERAGED_V = "averaged_V"
GALERKIN_U = "galerkin_U"
GALERKIN_W = "galerkin_W"

EXPECTED_DEGREE = "expected_degree"
EDGE_DENSITY = "edge_density"
SCALINGS = (EXPECTED_DEGREE, EDGE_DENSITY)

_ROW_BLOCK = 1024


@dataclass(frozen=True)
class CouplingFunction:
    """Odd coupling nonlinearity D with D(0) = 0 and Lipschitz constant."""

    name: str
    func: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    lipschitz: float
    linear: bool = False

    def __call__(self, x):
        return self.func(x)


IDENTITY = CouplingFunction("identity", lambda x: x, 1.0, linear=True)
SINE = CouplingFunction("sine", np.sin, 1.0)

_COUPLINGS = {"identity": IDENTITY, "sine": SINE}


def register_coupling(name: str, func, lipschitz: float) -> CouplingFunction:
    """Add a named coupling function. It must be odd with D(0) = 0."""
    probe = np.linspace(-3.0, 3.0, 13)
    if func(np.zeros(1))[0] != 0 or not np.allclose(func(-probe), -func(probe)):
        raise DomainError(f"coupling {name!r} must be odd with D(0) = 0")
    cf = CouplingFunction(name, func, float(lipschitz))
    _COUPLINGS[name] = cf
    return cf


def get_coupling(name: str) -> CouplingFunction:
    try:
        return _COUPLINGS[name]
    except KeyError:
        raise DomainError(f"unknown coupling {name!r}; known: {sorted(_COUPLINGS)}") from None


@dataclass(frozen=True, eq=False)
class CouplingMatrix:
    entries: np.ndarray
    provenance: str
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @cached_property
    def row_sums(self) -> np.ndarray:
        return self.entries.sum(axis=1)

    def row_means(self) -> np.ndarray:
        return self.entries.mean(axis=1)

    def to_csv(self, path) -> None:
        """Row per line, 17 significant digits."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            for row in self.entries:
                w.writerow([f"{v:.17g}" for v in row])


def averaged_matrix(spec: GraphonSpec, schedule: Schedule, n: int,
                    variant: str = POINTWISE) -> CouplingMatrix:
    """V_ij = Kbar(x_i, x_j) / G_i with G_i = n^-1 sum_k Kbar(x_i, x_k)."""
    build_grid(n)
    rho = schedule.rho(n)
    kbar = kernel_matrix(spec, rho, n, variant)
    g = kbar.mean(axis=1)
    if np.any(g <= 0):
        raise DegenerateDegreeError("zero row in the truncated kernel; V is undefined")
    return CouplingMatrix(kbar / g[:, None], AVERAGED_V,
                          {"spec": spec, "rho": rho, "node_weights": g})


def _quadrature_cells(spec: GraphonSpec, n: int, kernel: str, tol: float) -> np.ndarray:
    func = (lambda x, y: eval_u(spec, x, y)) if kernel == "U" else \
        (lambda x, y: eval_w(spec, x, y))
    coarse = gauss_cell_integrals(func, n)
    fine = gauss_cell_integrals(func, 2 * n).reshape(n, 2, n, 2).sum(axis=(1, 3))
    gap = np.abs(fine - coarse)
    # the singular edge cells are replaced below, so skip them in the check
    if isinstance(spec, PowerLaw):
        gap[:, 0] = 0.0
        if kernel == "W":
            gap[0, :] = 0.0
    scale = np.maximum(np.abs(fine), 1.0 / n**2)
    if np.any(gap > tol * scale):
        raise QuadratureError("quadrature refinement levels disagree beyond tolerance")
    out = fine
    if isinstance(spec, PowerLaw):
        exact = cell_integrals(spec, n, kernel)
        out[:, 0] = exact[:, 0]
        if kernel == "W":
            out[0, :] = exact[0, :]
    return out


def galerkin_matrix(spec: GraphonSpec, n: int, kernel: str = "U",
                    method: str = "analytic", tol: float = 1e-8) -> CouplingMatrix:
    """n^2 times the cell integrals of U or W.

    ``method='quadrature'`` uses tensor Gauss-Legendre cells (checked against a
    2x refinement); cells touching the power-law singularity always use the
    antiderivative.
    """
    build_grid(n)
    if kernel not in ("U", "W"):
        raise DomainError(f"kernel must be 'U' or 'W', got {kernel!r}")
    if method == "analytic":
        cells = cell_integrals(spec, n, kernel)
    elif method == "quadrature":
        cells = _quadrature_cells(spec, n, kernel, tol)
    else:
        raise DomainError(f"unknown assembly method {method!r}")
    prov = GALERKIN_U if kernel == "U" else GALERKIN_W
    return CouplingMatrix(cells * float(n) ** 2, prov, {"spec": spec, "kernel": kernel})


def _check_dim(n: int, u: np.ndarray):
    if u.ndim != 1 or u.shape[0] != n:
        raise DimensionError(f"state has shape {u.shape}, operator expects ({n},)")


def apply_coupling(m: CouplingMatrix, u, d: CouplingFunction = IDENTITY) -> np.ndarray:
    """w_i = n^-1 sum_j M_ij D(u_j - u_i)."""
    u = np.asarray(u, dtype=float)
    n = m.n
    _check_dim(n, u)
    a = m.entries
    if d.linear:
        # shifting by u[0] keeps constants annihilated exactly
        s = u - u[0]
        return (a @ s - m.row_sums * s) / n
    out = np.empty(n)
    for lo in range(0, n, _ROW_BLOCK):
        hi = min(n, lo + _ROW_BLOCK)
        out[lo:hi] = (a[lo:hi] * d(u[None, :] - u[lo:hi, None])).sum(axis=1)
    return out / n


def scaling_factors(graph: SampledGraph, scaling: str) -> np.ndarray:
    if scaling == EXPECTED_DEGREE:
        if graph.expected_degrees is None:
            raise DegenerateDegreeError("graph carries no expected degrees")
        d = np.asarray(graph.expected_degrees)
        if np.any(d <= 0):
            raise DegenerateDegreeError("zero expected degree")
        return 1.0 / d
    if scaling == EDGE_DENSITY:
        return np.full(graph.n, 1.0 / (graph.n * graph.rho))
    raise DomainError(f"unknown scaling {scaling!r}")


class SampledOperator:
    """Pre-built sparse form of a sampled graph for repeated application."""

    def __init__(self, graph: SampledGraph, scaling: str = EXPECTED_DEGREE):
        self.graph = graph
        self.n = graph.n
        self.scale = scaling_factors(graph, scaling)
        self.rows = graph.row_index
        self.cols = graph.indices
        self.csr = graph.to_csr()
        self.deg = graph.degrees.astype(float)

    def apply(self, u, d: CouplingFunction = IDENTITY) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        _check_dim(self.n, u)
        if d.linear:
            s = u - u[0]
            return self.scale * (self.csr @ s - self.deg * s)
        vals = d(u[self.cols] - u[self.rows])
        return self.scale * np.bincount(self.rows, weights=vals, minlength=self.n)


def apply_sampled_coupling(graph: SampledGraph, u, d: CouplingFunction = IDENTITY,
                           scaling: str = EXPECTED_DEGREE) -> np.ndarray:
    """w_i = c_i sum_{j in N(i)} D(u_j - u_i), c_i = 1/d_i or 1/(n rho)."""
    return SampledOperator(graph, scaling).apply(u, d)
