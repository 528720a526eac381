"""Norms, grid transfer and error metrics on step-function states."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DimensionError, DomainError, IntegrabilityError
from .graphon import L4, GraphonSpec, Schedule, integrability_class
from .operators import averaged_matrix, galerkin_matrix


def step_l2_norm(u) -> float:
    """sqrt(n^-1 sum u_i^2): the L2(0,1) norm of the step function."""
    u = np.asarray(u, dtype=float)
    if u.size == 0:
        raise DimensionError("empty state")
    return float(np.sqrt(np.mean(u * u)))


def gn_norm(u, weights) -> float:
    """sqrt(n^-1 sum G_i u_i^2)."""
    u = np.asarray(u, dtype=float)
    g = np.asarray(weights, dtype=float)
    if u.shape != g.shape:
        raise DimensionError(f"state {u.shape} and weights {g.shape} differ")
    if np.any(g <= 0):
        raise DomainError("node weights must be positive")
    return float(np.sqrt(np.mean(g * u * u)))


def sup_norm(u) -> float:
    u = np.asarray(u, dtype=float)
    return float(np.max(np.abs(u))) if u.size else 0.0


def restrict_to_coarse(fine, n: int) -> np.ndarray:
    """Average blocks of M/n consecutive fine values (L2 projection).

    Works on a single state (shape (M,)) or a stack of states (shape (k, M)).
    """
    fine = np.asarray(fine, dtype=float)
    m = fine.shape[-1]
    if n < 1 or m % n:
        raise DimensionError(f"coarse size {n} does not divide fine size {m}")
    return fine.reshape(fine.shape[:-1] + (n, m // n)).mean(axis=-1)


def _nested_pair(a: np.ndarray, b: np.ndarray):
    na, nb = a.shape[-1], b.shape[-1]
    if na >= nb:
        return restrict_to_coarse(a, nb), b
    return a, restrict_to_coarse(b, na)


def _check_times(ta, tb):
    ta = np.asarray(ta)
    tb = np.asarray(tb)
    if ta.shape != tb.shape or not np.allclose(ta, tb, rtol=0, atol=1e-12):
        raise DomainError("trajectories are saved on different time grids")
    return ta


def spacetime_l2_error(a, b) -> float:
    """sqrt(int_0^T ||a(t) - b(t)||^2 dt), trapezoid rule on the snapshot grid.

    The finer trajectory is restricted to the coarser grid first.
    """
    t = _check_times(a.times, b.times)
    sa, sb = _nested_pair(a.states, b.states)
    sq = np.mean((sa - sb) ** 2, axis=1)
    return float(np.sqrt(max(0.0, np.trapezoid(sq, t))))


def max_weighted_gap(a, b, weights) -> float:
    """max over snapshots of the G-weighted distance (coarse grid weights)."""
    _check_times(a.times, b.times)
    sa, sb = _nested_pair(a.states, b.states)
    g = np.asarray(weights, dtype=float)
    if g.shape[-1] != sa.shape[-1]:
        raise DimensionError("weights do not match the comparison grid")
    return float(np.sqrt(np.max(np.mean(g * (sa - sb) ** 2, axis=1))))


def kernel_l4_distance(spec: GraphonSpec, schedule: Schedule, n: int) -> float:
    """Exact L4(I^2) norm of the step kernel difference U_n - V_n."""
    if L4 not in integrability_class(spec):
        raise IntegrabilityError("graphon is not in L4; the kernel distance is not defined")
    u = galerkin_matrix(spec, n, "U").entries
    v = averaged_matrix(spec, schedule, n).entries
    diff = u - v
    d2 = diff * diff
    return float(np.mean(d2 * d2) ** 0.25)


def dissipation_identity_check(wmat, theta, tol: float = 1e-12):
    """Return (sum W_ij (t_j - t_i) t_i,  -1/2 sum W_ij (t_j - t_i)^2)."""
    w = np.asarray(wmat, dtype=float)
    th = np.asarray(theta, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] != th.size:
        raise DimensionError("need a square matrix matching theta")
    scale = max(1.0, float(np.max(np.abs(w)))) if w.size else 1.0
    if np.max(np.abs(w - w.T), initial=0.0) > tol * scale:
        raise DomainError("matrix is not symmetric")
    diff = th[None, :] - th[:, None]
    lhs = float(np.sum(w * diff * th[:, None]))
    rhs = float(-0.5 * np.sum(w * diff * diff))
    return lhs, rhs


def apriori_constant(lipschitz: float, T: float) -> float:
    """C = 1 + 3 L T exp(3 L T) bounding sup|u(t)| / sup|u(0)| on [0, T]."""
    x = 3.0 * lipschitz * T
    return 1.0 + x * math.exp(x)


# -- error reports ------------------------------------------------------------

@dataclass
class ErrorRecord:
    n: int
    seed: int
    spacetime_l2: Optional[float] = None
    sup_gn_gap: Optional[float] = None
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None

    def as_dict(self) -> dict:
        d = {"n": self.n, "seed": self.seed, "spacetime_l2": self.spacetime_l2,
             "sup_gn_gap": self.sup_gn_gap}
        if self.error is not None:
            d["failed"] = True
            d["error"] = self.error
        return d


def _iqr(x: np.ndarray) -> float:
    q75, q25 = np.percentile(x, [75, 25])
    return float(q75 - q25)


@dataclass
class ErrorReport:
    study: str
    graphon: dict
    gamma: Optional[float]
    T: float
    M: Optional[int]
    metric: str
    records: list = field(default_factory=list)

    def values(self, n: int) -> np.ndarray:
        vals = [getattr(r, self.metric) for r in self.records if r.n == n and not r.failed]
        return np.asarray([v for v in vals if v is not None], dtype=float)

    @property
    def n_values(self) -> list:
        return sorted({r.n for r in self.records})

    def aggregates(self) -> list:
        out = []
        for n in self.n_values:
            v = self.values(n)
            if v.size:
                out.append({"n": n, "median": float(np.median(v)), "iqr": _iqr(v)})
            else:
                out.append({"n": n, "median": None, "iqr": None})
        return out

    def medians(self) -> list:
        return [a["median"] for a in self.aggregates()]

    def as_dict(self) -> dict:
        return {
            "study": self.study,
            "graphon": self.graphon,
            "gamma": self.gamma,
            "T": self.T,
            "M": self.M,
            "metric": self.metric,
            "records": [r.as_dict() for r in self.records],
            "aggregates": self.aggregates(),
        }
