"""Analytic graphon catalog.

Three kernel families are supported, each with closed-form degree function,
total mass and cell integrals:

* ``PowerLaw(alpha)``:  W(x, y) = (1 - alpha)^2 (x y)^(-alpha)
* ``Constant(c)``:      W(x, y) = c
* ``Block(boundaries, b)``: piecewise constant on a partition of [0, 1]

All evaluators are vectorised over numpy arrays.  Kernels are only evaluated
on (0, 1]^2; the power law is singular at the origin.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import AssumptionViolation, DomainError, SingularKernelError

L2 = "L2"
L4 = "L4"

# Smallest degree we are willing to divide by.
DEGREE_FLOOR = 1e-300


@dataclass(frozen=True)
class PowerLaw:
    alpha: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"power law exponent must lie in (0, 1), got {self.alpha}")


@dataclass(frozen=True)
class Constant:
    c: float

    def __post_init__(self):
        if not (self.c >= 0.0 and math.isfinite(self.c)):
            raise DomainError(f"constant graphon needs a finite c >= 0, got {self.c}")


@dataclass(frozen=True)
class Block:
    """Stochastic block kernel.

    ``boundaries`` holds the k + 1 breakpoints 0 = v_0 < ... < v_k = 1 and
    ``b`` the symmetric k x k matrix of block values.  Block m is the interval
    (v_m, v_{m+1}] (the first block also contains 0), the same convention as
    the grid cells ((i-1)/n, i/n].
    """

    boundaries: tuple
    b: tuple = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.boundaries, dtype=float)
        b = np.asarray(self.b, dtype=float)
        k = len(v) - 1
        if k < 1 or v[0] != 0.0 or v[-1] != 1.0 or np.any(np.diff(v) <= 0):
            raise DomainError("block boundaries must increase strictly from 0 to 1")
        if b.shape != (k, k):
            raise DomainError(f"block matrix must be {k}x{k}, got {b.shape}")
        if not np.array_equal(b, b.T):
            raise DomainError("block matrix must be symmetric")
        if np.any(b < 0) or not np.all(np.isfinite(b)):
            raise DomainError("block matrix entries must be finite and nonnegative")
        if b.sum() <= 0:
            raise DomainError("block matrix must have positive total")
        # normalise to hashable tuples
        object.__setattr__(self, "boundaries", tuple(float(t) for t in v))
        object.__setattr__(self, "b", tuple(tuple(float(t) for t in row) for row in b))

    @property
    def edges(self) -> np.ndarray:
        return np.asarray(self.boundaries)

    @property
    def matrix(self) -> np.ndarray:
        return np.asarray(self.b)

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    @property
    def row_sums(self) -> np.ndarray:
        """Degree value on each block: sum_l b_kl |V_l|."""
        return self.matrix @ self.widths

    def block_index(self, x) -> np.ndarray:
        idx = np.searchsorted(self.edges, np.asarray(x, dtype=float), side="left") - 1
        return np.clip(idx, 0, len(self.widths) - 1)


GraphonSpec = Union[PowerLaw, Constant, Block]


@dataclass(frozen=True)
class DensitySchedule:
    """rho_n = n^(-gamma) with gamma in (0, 1)."""

    gamma: float

    def __post_init__(self):
        if not 0.0 < self.gamma < 1.0:
            raise DomainError(f"gamma must lie in (0, 1), got {self.gamma}")

    def rho(self, n: int) -> float:
        return float(n) ** (-self.gamma)


@dataclass(frozen=True)
class FixedDensity:
    """A constant rho, for hand-sized examples and tests."""

    value: float

    def __post_init__(self):
        if not 0.0 < self.value <= 1.0:
            raise DomainError(f"rho must lie in (0, 1], got {self.value}")

    def rho(self, n: int) -> float:
        return float(self.value)


Schedule = Union[DensitySchedule, FixedDensity]


def integrability_class(spec: GraphonSpec) -> frozenset:
    if isinstance(spec, PowerLaw):
        flags = set()
        if spec.alpha < 0.5:
            flags.add(L2)
        if spec.alpha < 0.25:
            flags.add(L4)
        return frozenset(flags)
    return frozenset({L2, L4})


def _check_unit(spec, *arrays):
    singular = isinstance(spec, PowerLaw)
    for a in arrays:
        if a.size == 0:
            continue
        lo = a.min()
        if singular and not lo > 0.0:
            raise DomainError("power law graphon is only defined on (0, 1]")
        if lo < 0.0 or a.max() > 1.0:
            raise DomainError("graphon arguments must lie in the unit interval")


def eval_w(spec: GraphonSpec, x, y):
    """W(x, y), broadcasting over array arguments."""
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    _check_unit(spec, xa, ya)
    if isinstance(spec, PowerLaw):
        # (x y)^(-a) computed as a product of powers so W(x,y) == W(y,x) bitwise
        a = spec.alpha
        out = (1.0 - a) ** 2 * (xa ** -a * ya ** -a)
    elif isinstance(spec, Constant):
        out = np.full(np.broadcast(xa, ya).shape, spec.c)
    else:
        out = spec.matrix[spec.block_index(xa), spec.block_index(ya)]
    return out[()] if np.ndim(out) == 0 else out


def truncate_w(spec: GraphonSpec, rho: float, x, y):
    """min(1/rho, W(x, y))."""
    if not 0.0 < rho <= 1.0:
        raise DomainError(f"rho must lie in (0, 1], got {rho}")
    return np.minimum(1.0 / rho, eval_w(spec, x, y))


def degree_g(spec: GraphonSpec, x):
    """Degree function x -> int_0^1 W(x, z) dz."""
    xa = np.asarray(x, dtype=float)
    _check_unit(spec, xa)
    if isinstance(spec, PowerLaw):
        out = (1.0 - spec.alpha) * xa ** -spec.alpha
    elif isinstance(spec, Constant):
        out = np.full(xa.shape, spec.c)
    else:
        out = spec.row_sums[spec.block_index(xa)]
    return out[()] if np.ndim(out) == 0 else out


def eval_u(spec: GraphonSpec, x, y):
    """Degree-normalised kernel U(x, y) = W(x, y) / degree_g(x)."""
    g = np.asarray(degree_g(spec, x), dtype=float)
    if g.size and g.min() < DEGREE_FLOOR:
        raise SingularKernelError("degree function vanishes; U is undefined")
    if isinstance(spec, PowerLaw):
        # closed form; avoids the x^-a / x^-a round trip
        xa = np.asarray(x, dtype=float)
        ya = np.asarray(y, dtype=float)
        _check_unit(spec, ya)
        out = (1.0 - spec.alpha) * np.broadcast_to(ya, np.broadcast(xa, ya).shape) ** -spec.alpha
        return out[()] if np.ndim(out) == 0 else out
    return eval_w(spec, x, y) / g


def total_mass(spec: GraphonSpec) -> float:
    if isinstance(spec, PowerLaw):
        return 1.0
    if isinstance(spec, Constant):
        return float(spec.c)
    w = spec.widths
    return float(w @ spec.matrix @ w)


def nu_inf(spec: GraphonSpec) -> float:
    """Infimum of the degree function over (0, 1)."""
    if isinstance(spec, PowerLaw):
        nu = 1.0 - spec.alpha
    elif isinstance(spec, Constant):
        nu = float(spec.c)
    else:
        nu = float(spec.row_sums.min())
    if nu <= 0.0:
        raise AssumptionViolation("degree function has zero infimum")
    return nu


# -- cell integrals -----------------------------------------------------------

def cell_masses(spec: GraphonSpec, n: int) -> np.ndarray:
    """1-D masses of the degree-profile factor over the n grid cells.

    Only meaningful for the power law, where W factorises as
    w(x) w(y) with w(x) = (1 - a) x^-a; entry i is int_{I_i} w.
    """
    if not isinstance(spec, PowerLaw):
        raise TypeError("cell_masses is defined for power-law graphons only")
    e = 1.0 - spec.alpha
    pts = np.arange(n + 1, dtype=float) / n
    return np.diff(pts ** e)


def block_overlaps(spec: Block, n: int) -> np.ndarray:
    """O[i, m] = |I_i intersect V_m| for the uniform n-cell grid."""
    pts = np.arange(n + 1, dtype=float) / n
    v = spec.edges
    lo = np.maximum(pts[:-1, None], v[None, :-1])
    hi = np.minimum(pts[1:, None], v[None, 1:])
    return np.clip(hi - lo, 0.0, None)


def cell_integrals(spec: GraphonSpec, n: int, kernel: str = "W", rows=None) -> np.ndarray:
    """Exact matrix of int_{I_i x I_j} K for K = W or U.

    ``rows`` optionally selects a subset of (0-based) row cells.
    """
    if kernel not in ("W", "U"):
        raise ValueError(f"kernel must be 'W' or 'U', got {kernel!r}")
    rows = np.arange(n) if rows is None else np.asarray(rows)
    if isinstance(spec, PowerLaw):
        m = cell_masses(spec, n)
        if kernel == "W":
            return np.outer(m[rows], m)
        # U(x, y) = w(y): column profile only
        return np.broadcast_to(m / n, (len(rows), n)).copy()
    if isinstance(spec, Constant):
        if kernel == "U" and spec.c <= 0:
            raise SingularKernelError("constant zero graphon has no normalised kernel")
        val = spec.c if kernel == "W" else 1.0
        return np.full((len(rows), n), val / n**2)
    o = block_overlaps(spec, n)
    b = spec.matrix
    if kernel == "U":
        r = spec.row_sums
        if r.min() < DEGREE_FLOOR:
            raise SingularKernelError("a block has zero degree; U is undefined")
        b = b / r[:, None]
    return o[rows] @ b @ o.T


def gauss_cell_integrals(func, n: int, order: int = 16, rows=None) -> np.ndarray:
    """Tensor Gauss-Legendre estimate of int_{I_i x I_j} func over the grid.

    ``func`` must accept broadcast arrays (x, y).  ``rows`` restricts the
    computation to a subset of row indices (0-based).
    """
    nodes, weights = np.polynomial.legendre.leggauss(order)
    h = 1.0 / n
    rows = np.arange(n) if rows is None else np.asarray(rows)
    # quadrature abscissae inside every cell, shape (n, order)
    offs = (nodes + 1.0) * 0.5 * h
    xs_all = np.arange(n)[:, None] * h + offs[None, :]
    w = weights * 0.5 * h
    out = np.empty((len(rows), n))
    for r, i in enumerate(rows):
        vals = func(xs_all[i][:, None, None], xs_all[None, :, :])  # (q, n, q)
        out[r] = np.einsum("a,ajb,b->j", w, vals, w)
    return out


# -- assumption diagnostics ---------------------------------------------------

@dataclass(frozen=True)
class AssumptionReport:
    n: int
    rho: float
    total_mass: float
    nu: float
    delta_sup: float
    l4_row_bound: float
    integrability: frozenset
    violations: tuple = ()

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "rho": self.rho,
            "total_mass": self.total_mass,
            "nu": self.nu,
            "delta_sup": self.delta_sup,
            "l4_row_bound": self.l4_row_bound,
            "integrability": sorted(self.integrability),
            "violations": list(self.violations),
        }


def check_assumptions(spec: GraphonSpec, schedule: Schedule, n: int,
                      chunk: int = 1024) -> AssumptionReport:
    """Diagnose the structural graphon assumptions at resolution n.

    Never raises on a violated assumption; violations are listed in the
    report instead.
    """
    if n < 2:
        raise DomainError("need n >= 2")
    rho = schedule.rho(n)
    violations = []
    mass = total_mass(spec)
    if mass <= 0:
        violations.append("total mass is zero")
    try:
        nu = nu_inf(spec)
    except AssumptionViolation:
        nu = 0.0
        violations.append("degree infimum is zero")
    if isinstance(spec, PowerLaw) and isinstance(schedule, DensitySchedule) \
            and not spec.alpha < schedule.gamma:
        violations.append("power law requires alpha < gamma")

    pts = np.arange(1, n + 1, dtype=float) / n
    cap = 1.0 / rho
    delta = 0.0
    sq_sum = 0.0
    for start in range(0, n, chunk):
        x = pts[start:start + chunk]
        wbar = np.minimum(cap, eval_w(spec, x[:, None], pts[None, :]))
        sq_sum += float(np.sum(wbar * wbar))
        interior = x < 1.0
        if np.any(interior) and nu > 0:
            ratio = wbar[interior].mean(axis=1) / degree_g(spec, x[interior])
            delta = max(delta, float(np.max(np.abs(ratio - 1.0))))
    return AssumptionReport(
        n=n, rho=rho, total_mass=mass, nu=nu, delta_sup=delta,
        l4_row_bound=sq_sum / n**2,
        integrability=integrability_class(spec),
        violations=tuple(violations),
    )
