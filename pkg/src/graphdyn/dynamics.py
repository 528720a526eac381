"""Time integration of the sampled, averaged and Galerkin models.

All three model families share the form

    du_i/dt = coupling_i(u) + f(u_i)

and differ only in the coupling operator: a sampled sparse graph, the dense
averaged matrix V, or a dense Galerkin matrix (U or W kernel).  States are
coefficient vectors of step functions on the uniform grid.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .errors import BlowUpError, DomainError
from .graphon import GraphonSpec
from .operators import (EXPECTED_DEGREE, IDENTITY, SCALINGS, CouplingFunction, CouplingMatrix,
                        SampledOperator, apply_coupling, galerkin_matrix)
from .sampler import Grid, SampledGraph

SAMPLED = "sampled"
AVERAGED = "averaged"
GALERKIN = "galerkin"
MODELS = (SAMPLED, AVERAGED, GALERKIN)

BLOWUP_LIMIT = 1e12
DEFAULT_SNAPSHOTS = 100


# -- reactions ----------------------------------------------------------------

@dataclass(frozen=True)
class Reaction:
    """Pointwise reaction term f with its Lipschitz constant."""

    kind: str
    params: tuple = ()

    def __post_init__(self):
        arity = {"zero": 0, "affine": 2, "sine_scaled": 1}
        if self.kind not in arity:
            raise DomainError(f"unknown reaction {self.kind!r}")
        if len(self.params) != arity[self.kind]:
            raise DomainError(f"reaction {self.kind!r} takes {arity[self.kind]} parameters")
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))

    @classmethod
    def zero(cls):
        return cls("zero")

    @classmethod
    def affine(cls, a: float, b: float):
        """f(u) = a + b u."""
        return cls("affine", (a, b))

    @classmethod
    def sine_scaled(cls, kappa: float):
        """f(u) = kappa sin(u)."""
        return cls("sine_scaled", (kappa,))

    @property
    def lipschitz(self) -> float:
        if self.kind == "zero":
            return 0.0
        if self.kind == "affine":
            return abs(self.params[1])
        return abs(self.params[0])

    def __call__(self, u: np.ndarray) -> np.ndarray:
        if self.kind == "zero":
            return np.zeros_like(u)
        if self.kind == "affine":
            a, b = self.params
            return a + b * u
        return self.params[0] * np.sin(u)

    def describe(self) -> dict:
        return {"kind": self.kind, "params": list(self.params)}


# -- initial data -------------------------------------------------------------

@dataclass(frozen=True)
class InitialCondition:
    """Bounded initial profile g on [0, 1].

    kinds: ``constant(c)``, ``linear`` (g(x) = x), ``sine_wave(k)``
    (g(x) = sin(2 pi k x)) and ``indicator(a, b)`` (1 on [a, b]).
    """

    kind: str
    params: tuple = ()

    def __post_init__(self):
        arity = {"constant": 1, "linear": 0, "sine_wave": 1, "indicator": 2}
        if self.kind not in arity:
            raise DomainError(f"unknown initial condition {self.kind!r}")
        if len(self.params) != arity[self.kind]:
            raise DomainError(f"initial condition {self.kind!r} takes {arity[self.kind]} parameters")
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if self.kind == "indicator" and not 0.0 <= self.params[0] <= self.params[1] <= 1.0:
            raise DomainError("indicator needs 0 <= a <= b <= 1")

    @classmethod
    def constant(cls, c):
        return cls("constant", (c,))

    @classmethod
    def linear(cls):
        return cls("linear")

    @classmethod
    def sine_wave(cls, k):
        return cls("sine_wave", (k,))

    @classmethod
    def indicator(cls, a, b):
        return cls("indicator", (a, b))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "constant":
            return np.full(x.shape, self.params[0])
        if self.kind == "linear":
            return x.copy()
        if self.kind == "sine_wave":
            return np.sin(2 * np.pi * self.params[0] * x)
        a, b = self.params
        return ((x >= a) & (x <= b)).astype(float)

    def antiderivative(self, x: np.ndarray) -> np.ndarray:
        if self.kind == "constant":
            return self.params[0] * x
        if self.kind == "linear":
            return 0.5 * x * x
        if self.kind == "sine_wave":
            w = 2 * np.pi * self.params[0]
            if w == 0:
                return np.zeros_like(x)
            return -np.cos(w * x) / w
        a, b = self.params
        return np.clip(x, a, b) - a

    @property
    def sup_norm(self) -> float:
        if self.kind == "constant":
            return abs(self.params[0])
        if self.kind == "linear":
            return 1.0
        if self.kind == "sine_wave":
            k = self.params[0]
            if k == 0:
                return 0.0
            # sin(2 pi k x) reaches +-1 on [0, 1] once |k| >= 1/4
            return 1.0 if abs(k) >= 0.25 else abs(math.sin(2 * math.pi * k))
        a, b = self.params
        return 1.0 if b > a else 0.0

    def describe(self) -> dict:
        return {"kind": self.kind, "params": list(self.params)}


def cell_average_ic(g: InitialCondition, grid: Union[Grid, int]) -> np.ndarray:
    """u_i(0) = n int_{I_i} g, exact for the catalog profiles."""
    n = grid.n if isinstance(grid, Grid) else int(grid)
    pts = np.arange(n + 1, dtype=float) / n
    if g.kind == "constant":
        return np.full(n, g.params[0])
    return np.diff(g.antiderivative(pts)) * n


# -- model configuration ------------------------------------------------------

@dataclass(eq=False)
class ModelConfig:
    """One model run: operator, nonlinearities, horizon and step."""

    model: str
    operator: Union[SampledGraph, CouplingMatrix]
    coupling: CouplingFunction = IDENTITY
    reaction: Reaction = field(default_factory=Reaction.zero)
    scaling: str = EXPECTED_DEGREE
    T: float = 1.0
    dt: float = 1e-3
    output_stride: Optional[int] = None
    weights: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.model not in MODELS:
            raise DomainError(f"unknown model {self.model!r}")
        if self.scaling not in SCALINGS:
            raise DomainError(f"unknown scaling {self.scaling!r}")
        if self.model == SAMPLED and not isinstance(self.operator, SampledGraph):
            raise DomainError("sampled model needs a SampledGraph operator")
        if self.model != SAMPLED and not isinstance(self.operator, CouplingMatrix):
            raise DomainError(f"{self.model} model needs a CouplingMatrix operator")
        if not (self.T > 0 and self.dt > 0) or self.dt > self.T:
            raise DomainError("need 0 < dt <= T")
        if self.weights is None:
            if isinstance(self.operator, SampledGraph):
                self.weights = self.operator.node_weights
            else:
                self.weights = self.operator.meta.get("node_weights")

    @property
    def n(self) -> int:
        return self.operator.n

    @property
    def lipschitz(self) -> float:
        """L = max(L_f, L_D)."""
        return max(self.reaction.lipschitz, self.coupling.lipschitz)

    @property
    def num_steps(self) -> int:
        steps = int(round(self.T / self.dt))
        if abs(steps * self.dt - self.T) > 1e-9 * self.T:
            raise DomainError(f"T={self.T} is not an integer multiple of dt={self.dt}")
        return steps

    @property
    def stride(self) -> int:
        steps = self.num_steps
        stride = self.output_stride or max(1, steps // DEFAULT_SNAPSHOTS)
        if stride < 1 or steps % stride:
            raise DomainError(f"output_stride={stride} must divide the {steps} steps")
        return stride

    def describe(self) -> dict:
        op = self.operator
        if isinstance(op, SampledGraph):
            opd = {"graph_n": op.n, "rho": repr(op.rho), "seed": op.seed,
                   "variant": op.variant, "edges": op.num_edges}
        else:
            opd = {"provenance": op.provenance, "n": op.n,
                   "sha256": hashlib.sha256(np.ascontiguousarray(op.entries).tobytes()).hexdigest()}
        return {"model": self.model, "operator": opd, "coupling": self.coupling.name,
                "reaction": self.reaction.describe(), "scaling": self.scaling,
                "T": repr(self.T), "dt": repr(self.dt), "stride": self.stride}

    def fingerprint(self) -> str:
        blob = json.dumps(self.describe(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def make_rhs(config: ModelConfig) -> Callable[[np.ndarray], np.ndarray]:
    """Build the right-hand side once (pre-assembling sparse structure)."""
    f = config.reaction
    d = config.coupling
    if config.model == SAMPLED:
        op = SampledOperator(config.operator, config.scaling)
        return lambda u: op.apply(u, d) + f(u)
    m = config.operator
    return lambda u: apply_coupling(m, u, d) + f(u)


def rhs(config: ModelConfig, u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    return make_rhs(config)(u)


# -- trajectories -------------------------------------------------------------

def _weighted_norm(u: np.ndarray, weights: Optional[np.ndarray]) -> float:
    if weights is None:
        return float(np.sqrt(np.mean(u * u)))
    return float(np.sqrt(np.mean(weights * u * u)))


@dataclass(eq=False)
class Trajectory:
    n: int
    times: np.ndarray
    states: np.ndarray
    fingerprint: str = ""
    weights: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    @property
    def sup_norms(self) -> np.ndarray:
        return np.max(np.abs(self.states), axis=1)

    @property
    def weighted_norms(self) -> np.ndarray:
        """G-weighted norm per snapshot (plain step L2 without weights)."""
        return np.array([_weighted_norm(s, self.weights) for s in self.states])

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def integrate(config: ModelConfig, u0) -> Trajectory:
    """Classical fixed-step RK4 from u0 over [0, T]."""
    u = np.array(u0, dtype=float)
    if u.shape != (config.n,):
        raise DomainError(f"initial state has shape {u.shape}, expected ({config.n},)")
    if not np.all(np.isfinite(u)):
        raise DomainError("initial state must be finite")
    f = make_rhs(config)
    dt = config.dt
    steps = config.num_steps
    stride = config.stride
    snaps = [u.copy()]
    half = 0.5 * dt
    sixth = dt / 6.0
    for step in range(1, steps + 1):
        k1 = f(u)
        k2 = f(u + half * k1)
        k3 = f(u + half * k2)
        k4 = f(u + dt * k3)
        u = u + sixth * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        peak = np.max(np.abs(u))
        if not peak <= BLOWUP_LIMIT:
            raise BlowUpError(f"state magnitude {peak:.3g} at step {step} (t={step * dt:.6g})")
        if step % stride == 0:
            snaps.append(u.copy())
    times = np.arange(len(snaps)) * (stride * dt)
    return Trajectory(n=config.n, times=times, states=np.array(snaps),
                      fingerprint=config.fingerprint(), weights=config.weights,
                      meta={"model": config.model, "dt": dt, "stride": stride})


def continuum_reference(spec: GraphonSpec, kernel: str, g: InitialCondition,
                        reaction: Reaction, coupling: CouplingFunction, M: int,
                        T: float = 1.0, dt: float = 1e-3,
                        output_stride: Optional[int] = None) -> Trajectory:
    """Fine-resolution Galerkin run standing in for the continuum solution."""
    if M < 2 or M & (M - 1):
        raise DomainError(f"reference resolution must be a power of two, got {M}")
    matrix = galerkin_matrix(spec, M, kernel)
    cfg = ModelConfig(GALERKIN, matrix, coupling, reaction, T=T, dt=dt,
                      output_stride=output_stride)
    traj = integrate(cfg, cell_average_ic(g, M))
    traj.meta.update({"reference": True, "kernel": kernel, "M": M})
    return traj
