import numpy as np
import pytest

from graphdyn import (IDENTITY, SINE, Constant, DensitySchedule, InitialCondition,
                      ModelConfig, PowerLaw, Reaction, averaged_matrix, cell_average_ic,
                      continuum_reference, galerkin_matrix, integrate, sample_graph)
from graphdyn.dynamics import AVERAGED, GALERKIN, SAMPLED
from graphdyn.errors import BlowUpError, DomainError
from graphdyn.operators import CouplingMatrix


def ones2():
    return CouplingMatrix(np.ones((2, 2)), "test", {"node_weights": np.ones(2)})


def test_two_node_closed_form():
    traj = integrate(ModelConfig(AVERAGED, ones2(), T=1.0, dt=1e-3), [0.0, 1.0])
    expect = [0.5 - 0.5 * np.exp(-1), 0.5 + 0.5 * np.exp(-1)]
    np.testing.assert_allclose(traj.final, expect, atol=1e-8)


def test_exponential_growth_on_constants():
    cfg = ModelConfig(AVERAGED, ones2(), reaction=Reaction.affine(0.0, 1.0), T=1.0, dt=1e-3)
    np.testing.assert_allclose(integrate(cfg, [0.3, 0.3]).final, 0.3 * np.e, atol=1e-8)


@pytest.mark.parametrize("d", [IDENTITY, SINE])
def test_constant_preserved(pl02, d):
    g = sample_graph(pl02, DensitySchedule(0.5), 64, seed=1)
    traj = integrate(ModelConfig(SAMPLED, g, coupling=d, T=0.5, dt=1e-2), np.full(64, 0.8))
    assert np.max(np.abs(traj.states - 0.8)) < 1e-12


def test_snapshot_grid():
    traj = integrate(ModelConfig(AVERAGED, ones2(), T=1.0, dt=1e-3, output_stride=50), [0, 1])
    assert len(traj.times) == 21
    assert traj.times[-1] == pytest.approx(1.0)


def test_bad_step_and_stride():
    with pytest.raises(DomainError):
        integrate(ModelConfig(AVERAGED, ones2(), T=1.0, dt=0.3), [0, 1])
    with pytest.raises(DomainError):
        integrate(ModelConfig(AVERAGED, ones2(), T=1.0, dt=0.1, output_stride=3), [0, 1])


def test_blowup():
    cfg = ModelConfig(AVERAGED, ones2(), reaction=Reaction.affine(0.0, 100.0), T=1.0, dt=1e-3)
    with pytest.raises(BlowUpError):
        integrate(cfg, [1.0, 1.0])


def test_model_operator_mismatch(pl02):
    with pytest.raises(DomainError):
        ModelConfig(SAMPLED, ones2())


def test_initial_conditions():
    g = InitialCondition.sine_wave(1)
    assert g(np.array([0.25]))[0] == pytest.approx(1.0)
    assert g.sup_norm == pytest.approx(1.0)
    # exact cell averages of the indicator of (0, 1/2]
    np.testing.assert_allclose(cell_average_ic(InitialCondition.indicator(0, 0.5), 4),
                               [1, 1, 0, 0])
    np.testing.assert_allclose(cell_average_ic(InitialCondition.linear(), 2), [0.25, 0.75])


def test_reference_conserves_mean_for_constant_kernel():
    g = InitialCondition.indicator(0, 0.5)
    ref = continuum_reference(Constant(1.0), "U", g, Reaction.zero(), IDENTITY,
                              64, 2.0, 1e-2, 10)
    assert ref.final.mean() == pytest.approx(0.5, abs=1e-8)


def test_reference_needs_power_of_two():
    with pytest.raises(DomainError):
        continuum_reference(Constant(1.0), "U", InitialCondition.linear(), Reaction.zero(),
                            IDENTITY, 48, 1.0, 0.1, 1)


def test_reference_self_convergence(pl02):
    g = InitialCondition.sine_wave(1)
    refs = {m: continuum_reference(pl02, "U", g, Reaction.zero(), IDENTITY, m, 0.1, 1e-3, 10)
            for m in (256, 512, 1024)}
    from graphdyn import spacetime_l2_error
    coarse = spacetime_l2_error(refs[256], refs[512])
    fine = spacetime_l2_error(refs[512], refs[1024])
    assert fine < coarse


def test_fingerprint_stable(pl02):
    m = galerkin_matrix(pl02, 8, "U")
    a = ModelConfig(GALERKIN, m, T=1.0, dt=0.1).fingerprint()
    b = ModelConfig(GALERKIN, m, T=1.0, dt=0.1).fingerprint()
    c = ModelConfig(GALERKIN, m, T=1.0, dt=0.05).fingerprint()
    assert a == b != c


def test_averaged_model_sine_runs(pl02):
    v = averaged_matrix(pl02, DensitySchedule(0.5), 32)
    traj = integrate(ModelConfig(AVERAGED, v, coupling=SINE, T=1.0, dt=1e-2),
                     cell_average_ic(InitialCondition.sine_wave(1), 32))
    assert np.all(np.diff(traj.weighted_norms) <= 1e-8)
