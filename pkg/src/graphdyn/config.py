"""Study configuration schema (a single JSON document)."""
from __future__ import annotations

import json
from pathlib import Path
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, ValidationError, model_validator

from .dynamics import InitialCondition, Reaction
from .errors import ConfigError, GraphdynError
from .graphon import (L4, Block, Constant, DensitySchedule, FixedDensity, PowerLaw,
                      integrability_class)
from .operators import SCALINGS, get_coupling
from .sampler import VARIANTS

STUDIES = ("continuum_convergence", "averaging", "galerkin_vs_averaged",
           "kernel_distance", "degree_law")


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GraphonConfig(_Strict):
    kind: Literal["power_law", "constant", "block"]
    alpha: Optional[float] = None
    c: Optional[float] = None
    boundaries: Optional[List[float]] = None
    b: Optional[List[List[float]]] = None
    gamma: Optional[float] = None
    rho: Optional[float] = None

    @model_validator(mode="after")
    def _check(self):
        need = {"power_law": ("alpha",), "constant": ("c",), "block": ("boundaries", "b")}
        for key in need[self.kind]:
            if getattr(self, key) is None:
                raise ValueError(f"{self.kind} graphon needs '{key}'")
        if (self.gamma is None) == (self.rho is None):
            raise ValueError("give exactly one of 'gamma' (rho_n = n^-gamma) or 'rho'")
        return self

    def to_spec(self):
        if self.kind == "power_law":
            return PowerLaw(self.alpha)
        if self.kind == "constant":
            return Constant(self.c)
        return Block(tuple(self.boundaries), tuple(map(tuple, self.b)))

    def to_schedule(self):
        if self.gamma is not None:
            return DensitySchedule(self.gamma)
        return FixedDensity(self.rho)


class ReactionConfig(_Strict):
    kind: Literal["zero", "affine", "sine_scaled"] = "zero"
    a: float = 0.0
    b: float = 0.0
    kappa: float = 0.0

    def build(self) -> Reaction:
        if self.kind == "affine":
            return Reaction.affine(self.a, self.b)
        if self.kind == "sine_scaled":
            return Reaction.sine_scaled(self.kappa)
        return Reaction.zero()


class InitialConfig(_Strict):
    kind: Literal["constant", "linear", "sine_wave", "indicator"] = "sine_wave"
    c: float = 0.0
    k: float = 1.0
    a: float = 0.0
    b: float = 0.5

    def build(self) -> InitialCondition:
        if self.kind == "constant":
            return InitialCondition.constant(self.c)
        if self.kind == "linear":
            return InitialCondition.linear()
        if self.kind == "sine_wave":
            return InitialCondition.sine_wave(self.k)
        return InitialCondition.indicator(self.a, self.b)


class ModelSection(_Strict):
    coupling: str = "identity"
    reaction: ReactionConfig = ReactionConfig()
    initial: InitialConfig = InitialConfig()
    scaling: str = "expected_degree"
    variant: str = "pointwise"
    T: float = 1.0
    dt: float = 1e-3
    output_stride: Optional[int] = None

    @model_validator(mode="after")
    def _check(self):
        if self.scaling not in SCALINGS:
            raise ValueError(f"scaling must be one of {SCALINGS}")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        if not (self.T > 0 and 0 < self.dt <= self.T):
            raise ValueError("need 0 < dt <= T")
        if self.output_stride is not None and self.output_stride < 1:
            raise ValueError("output_stride must be positive")
        get_coupling(self.coupling)
        return self


def _is_pow2(k: int) -> bool:
    return k >= 1 and not k & (k - 1)


class StudyConfig(_Strict):
    graphon: GraphonConfig
    study: Literal["continuum_convergence", "averaging", "galerkin_vs_averaged",
                   "kernel_distance", "degree_law"] = "continuum_convergence"
    n_list: List[int] = [128, 512, 2048]
    M: int = 8192
    seeds: int = 10
    master_seed: int = 0
    model: ModelSection = ModelSection()
    out: Optional[str] = None
    workers: int = 1
    # single-run commands (sample / run / check)
    n: Optional[int] = None
    seed: int = 0
    probes: Optional[List[int]] = None

    @model_validator(mode="after")
    def _check(self):
        if not self.n_list:
            raise ValueError("n_list must not be empty")
        if any(b <= a for a, b in zip(self.n_list, self.n_list[1:])):
            raise ValueError("n_list must be increasing")
        if not all(_is_pow2(k) and k >= 2 for k in self.n_list):
            raise ValueError("n_list entries must be powers of two >= 2")
        if not _is_pow2(self.M):
            raise ValueError("M must be a power of two")
        if self.study == "continuum_convergence":
            bad = [k for k in self.n_list if self.M % k]
            if bad:
                raise ValueError(f"n_list entries {bad} do not divide M={self.M}")
        if self.seeds < 1:
            raise ValueError("seeds must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.master_seed < 0 or self.seed < 0:
            raise ValueError("seeds must be nonnegative integers")
        if self.n is not None and self.n < 2:
            raise ValueError("n must be >= 2")
        spec = self.graphon.to_spec()
        if self.study == "kernel_distance" and L4 not in integrability_class(spec):
            raise ValueError("kernel_distance needs an L4 graphon")
        if self.study == "degree_law" and not isinstance(spec, PowerLaw):
            raise ValueError("degree_law needs a power_law graphon")
        return self

    @property
    def spec(self):
        return self.graphon.to_spec()

    @property
    def schedule(self):
        return self.graphon.to_schedule()

    @property
    def single_n(self) -> int:
        return self.n if self.n is not None else self.n_list[0]


def parse_config(data: dict) -> StudyConfig:
    try:
        return StudyConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from None
    except GraphdynError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path, overrides: Optional[dict] = None) -> StudyConfig:
    """Read a JSON config; ``overrides`` maps dotted keys to values."""
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    for key, value in (overrides or {}).items():
        node = data
        *parents, leaf = key.split(".")
        for p in parents:
            node = node.setdefault(p, {})
        node[leaf] = value
    return parse_config(data)
