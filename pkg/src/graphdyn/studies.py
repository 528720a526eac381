"""Seed-replicated convergence studies.

Per-record seeds are ``hash64(master_seed, n, replicate)`` so any record can
be reproduced in isolation.  Deterministic pieces shared by many records
(the continuum reference, the averaged trajectory for each n) are computed
once, before the records fan out.
"""
from __future__ import annotations

import logging
import multiprocessing as mp
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .analysis import (ErrorRecord, ErrorReport, apriori_constant, kernel_l4_distance,
                       max_weighted_gap, spacetime_l2_error)
from .config import StudyConfig
from .dynamics import (AVERAGED, GALERKIN, SAMPLED, ModelConfig, Trajectory, cell_average_ic,
                       continuum_reference, integrate)
from .errors import ConfigError, GraphdynError
from .graphon import PowerLaw, total_mass
from .operators import (EDGE_DENSITY, CouplingMatrix, averaged_matrix,
                        galerkin_matrix, get_coupling)
from .sampler import degree_statistics, expected_degrees, hash64, kernel_matrix, sample_graph

log = logging.getLogger(__name__)

APRIORI_SLACK = 1e-6


def record_seed(master_seed: int, n: int, replicate: int) -> int:
    return hash64(master_seed, n, replicate)


def _graphon_dict(cfg: StudyConfig) -> dict:
    return cfg.graphon.model_dump(exclude_none=True)


def check_apriori(traj: Trajectory, cfg_model: ModelConfig, g_sup: float) -> None:
    """Raise if the trajectory leaves the a priori sup-norm envelope.

    Only meaningful when f(0) = 0; affine reactions with an offset are skipped.
    """
    reaction = cfg_model.reaction
    if reaction.kind == "affine" and reaction.params[0] != 0.0:
        return
    bound = apriori_constant(cfg_model.lipschitz, cfg_model.T) * g_sup + APRIORI_SLACK
    peak = float(traj.sup_norms.max())
    if peak > bound:
        raise GraphdynError(f"a priori bound violated: {peak:.6g} > {bound:.6g}")


def _model(cfg: StudyConfig, kind: str, operator, weights=None) -> ModelConfig:
    m = cfg.model
    return ModelConfig(kind, operator, get_coupling(m.coupling), m.reaction.build(),
                       m.scaling, m.T, m.dt, m.output_stride, weights)


def averaged_operator(cfg: StudyConfig, n: int) -> CouplingMatrix:
    """Expectation of the sampled coupling under the configured scaling."""
    spec, sched = cfg.spec, cfg.schedule
    variant = cfg.model.variant
    if cfg.model.scaling == EDGE_DENSITY:
        kbar = kernel_matrix(spec, sched.rho(n), n, variant)
        return CouplingMatrix(kbar, "averaged_Wbar",
                              {"spec": spec, "node_weights": kbar.mean(axis=1)})
    return averaged_matrix(spec, sched, n, variant)


def galerkin_kernel(cfg: StudyConfig) -> str:
    return "W" if cfg.model.scaling == EDGE_DENSITY else "U"


def run_model(cfg: StudyConfig, kind: str, operator, weights=None) -> Trajectory:
    mc = _model(cfg, kind, operator, weights)
    g = cfg.model.initial.build()
    traj = integrate(mc, cell_average_ic(g, operator.n))
    check_apriori(traj, mc, g.sup_norm)
    return traj


# -- record workers ------------------------------------------------------------

# Shared read-only inputs for worker processes (inherited through fork).
_SHARED: dict = {}


def _sampled_record(task):
    kind, n, seed = task
    cfg = _SHARED["cfg"]
    rec = ErrorRecord(n=n, seed=seed)
    try:
        graph = sample_graph(cfg.spec, cfg.schedule, n, seed, cfg.model.variant)
        traj = run_model(cfg, SAMPLED, graph)
        if kind == "continuum_convergence":
            other = _SHARED["reference"]
        else:
            other = _SHARED["averaged"][n]
        rec.spacetime_l2 = spacetime_l2_error(traj, other)
        rec.sup_gn_gap = max_weighted_gap(traj, other, graph.node_weights)
    except GraphdynError as exc:
        rec.error = f"{type(exc).__name__}: {exc}"
        log.warning("record n=%d seed=%d failed: %s", n, seed, exc)
    return rec


def _fan_out(tasks, shared: dict, workers: int) -> list:
    _SHARED.clear()
    _SHARED.update(shared)
    try:
        if workers <= 1 or len(tasks) <= 1:
            return [_sampled_record(t) for t in tasks]
        ctx = mp.get_context("fork")
        with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
            return list(pool.map(_sampled_record, tasks))
    finally:
        _SHARED.clear()


def _tasks(cfg: StudyConfig, kind: str) -> list:
    return [(kind, n, record_seed(cfg.master_seed, n, r))
            for n in cfg.n_list for r in range(cfg.seeds)]


# -- studies ------------------------------------------------------------------

def run_continuum_convergence(cfg: StudyConfig, workers=None) -> ErrorReport:
    """Sampled model vs a fine Galerkin reference, in the space-time L2 norm."""
    bad = [n for n in cfg.n_list if cfg.M % n]
    if bad:
        raise ConfigError(f"n_list entries {bad} do not divide M={cfg.M}")
    m = cfg.model
    g = m.initial.build()
    log.info("continuum reference at M=%d", cfg.M)
    ref = continuum_reference(cfg.spec, galerkin_kernel(cfg), g, m.reaction.build(),
                              get_coupling(m.coupling), cfg.M, m.T, m.dt, m.output_stride)
    records = _fan_out(_tasks(cfg, "continuum_convergence"), {"cfg": cfg, "reference": ref},
                       workers or cfg.workers)
    return ErrorReport("continuum_convergence", _graphon_dict(cfg), cfg.graphon.gamma,
                       m.T, cfg.M, "spacetime_l2", records)


def run_averaging(cfg: StudyConfig, workers=None) -> ErrorReport:
    """Sampled model vs averaged model from identical initial data."""
    averaged = {n: run_model(cfg, AVERAGED, averaged_operator(cfg, n)) for n in cfg.n_list}
    records = _fan_out(_tasks(cfg, "averaging"), {"cfg": cfg, "averaged": averaged},
                       workers or cfg.workers)
    return ErrorReport("averaging", _graphon_dict(cfg), cfg.graphon.gamma,
                       cfg.model.T, None, "sup_gn_gap", records)


def run_galerkin_vs_averaged(cfg: StudyConfig, workers=None) -> ErrorReport:
    """Deterministic gap between the averaged (V) and Galerkin (U) models."""
    records = []
    for n in cfg.n_list:
        rec = ErrorRecord(n=n, seed=0)
        try:
            avg_op = averaged_operator(cfg, n)
            weights = avg_op.meta["node_weights"]
            a = run_model(cfg, AVERAGED, avg_op)
            b = run_model(cfg, GALERKIN, galerkin_matrix(cfg.spec, n, galerkin_kernel(cfg)), weights)
            rec.spacetime_l2 = spacetime_l2_error(a, b)
            rec.sup_gn_gap = max_weighted_gap(a, b, weights)
        except GraphdynError as exc:
            rec.error = f"{type(exc).__name__}: {exc}"
        records.append(rec)
    return ErrorReport("galerkin_vs_averaged", _graphon_dict(cfg), cfg.graphon.gamma,
                       cfg.model.T, None, "sup_gn_gap", records)


def run_kernel_distance(cfg: StudyConfig, workers=None) -> dict:
    rows = [{"n": n, "distance": kernel_l4_distance(cfg.spec, cfg.schedule, n)}
            for n in cfg.n_list]
    return {"study": "kernel_distance", "graphon": _graphon_dict(cfg),
            "gamma": cfg.graphon.gamma, "distances": rows}


def predicted_degree(alpha: float, gamma: float, n: int, i: int) -> float:
    """Asymptotic expected degree (1 - a) n^(1 + a - g) i^-a of node i."""
    return (1.0 - alpha) * n ** (1.0 + alpha - gamma) * i ** -alpha


def run_degree_law(cfg: StudyConfig, workers=None) -> dict:
    """Monte-Carlo degrees of probe nodes and edge density vs the power law."""
    spec = cfg.spec
    if not isinstance(spec, PowerLaw) or cfg.graphon.gamma is None:
        raise ConfigError("degree_law needs a power_law graphon with a gamma schedule")
    gamma = cfg.graphon.gamma
    out = []
    for n in cfg.n_list:
        probes = cfg.probes or [1, n]
        if any(not 1 <= p <= n for p in probes):
            raise ConfigError(f"probe nodes must lie in 1..{n}")
        deg_sum = np.zeros(n)
        dens = []
        for r in range(cfg.seeds):
            graph = sample_graph(spec, cfg.schedule, n, record_seed(cfg.master_seed, n, r),
                                 cfg.model.variant)
            stats = degree_statistics(graph)
            deg_sum += stats.degrees
            dens.append(stats.density)
        mean_deg = deg_sum / cfg.seeds
        exact = expected_degrees(spec, cfg.schedule, n, cfg.model.variant)
        out.append({
            "n": n,
            "seeds": cfg.seeds,
            "probes": [{"node": p, "mean_degree": float(mean_deg[p - 1]),
                        "expected_degree": float(exact[p - 1]),
                        "predicted": predicted_degree(spec.alpha, gamma, n, p)}
                       for p in probes],
            "density": {"mean": float(np.mean(dens)),
                        "predicted": n ** -gamma * total_mass(spec)},
        })
    return {"study": "degree_law", "graphon": _graphon_dict(cfg), "gamma": gamma,
            "results": out}


RUNNERS = {
    "continuum_convergence": run_continuum_convergence,
    "averaging": run_averaging,
    "galerkin_vs_averaged": run_galerkin_vs_averaged,
    "kernel_distance": run_kernel_distance,
    "degree_law": run_degree_law,
}


def run_study(cfg: StudyConfig, workers=None):
    return RUNNERS[cfg.study](cfg, workers)
