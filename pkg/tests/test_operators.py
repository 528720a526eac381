import numpy as np
import pytest

from graphdyn import (IDENTITY, SINE, Block, Constant, DensitySchedule, FixedDensity,
                      PowerLaw, apply_coupling, apply_sampled_coupling, averaged_matrix,
                      galerkin_matrix, get_coupling, sample_graph)
from graphdyn.errors import DimensionError, QuadratureError
from graphdyn.operators import CouplingMatrix


def test_averaged_rows_n2(pl02):
    v = averaged_matrix(pl02, FixedDensity(0.5), 2)
    np.testing.assert_allclose(v.entries[0], [1.0692039, 0.9307961], rtol=1e-6)
    np.testing.assert_allclose(v.row_means(), 1.0, rtol=1e-13)


def test_galerkin_u_n2(pl02):
    u = galerkin_matrix(pl02, 2, "U")
    np.testing.assert_allclose(u.entries[0], [1.14869835, 0.85130165], rtol=1e-8)
    np.testing.assert_allclose(u.row_means(), 1.0, rtol=1e-13)


@pytest.mark.parametrize("spec", [PowerLaw(0.2), Block((0, 0.5, 1), ((1, 2), (2, 0.5)))])
def test_quadrature_agrees_with_analytic(spec):
    a = galerkin_matrix(spec, 8, "W")
    q = galerkin_matrix(spec, 8, "W", method="quadrature")
    np.testing.assert_allclose(q.entries, a.entries, rtol=1e-7)


def test_quadrature_rejects_unresolved_jump():
    spec = Block((0, 0.3, 1), ((1, 2), (2, 0.5)))
    with pytest.raises(QuadratureError):
        galerkin_matrix(spec, 8, "W", method="quadrature")


def test_constant_graphon_v_equals_u():
    v = averaged_matrix(Constant(1.0), DensitySchedule(0.5), 16)
    u = galerkin_matrix(Constant(1.0), 16, "U")
    np.testing.assert_allclose(v.entries, u.entries, atol=1e-14)


@pytest.mark.parametrize("d", [IDENTITY, SINE])
def test_constants_annihilated(pl02, d):
    m = galerkin_matrix(pl02, 32, "U")
    assert np.max(np.abs(apply_coupling(m, np.full(32, 0.37), d))) < 1e-15


def test_apply_coupling_matches_dense():
    rng = np.random.default_rng(0)
    a = rng.random((6, 6))
    u = rng.standard_normal(6)
    m = CouplingMatrix(a, "test", {})
    ref = (a * np.sin(u[None, :] - u[:, None])).sum(1) / 6
    np.testing.assert_allclose(apply_coupling(m, u, SINE), ref, atol=1e-14)
    with pytest.raises(DimensionError):
        apply_coupling(m, np.zeros(5))


def test_sampled_linear_and_nonlinear_agree_for_small_data(pl02):
    g = sample_graph(pl02, DensitySchedule(0.5), 64, seed=3)
    u = 1e-6 * np.linspace(-1, 1, 64)
    lin = apply_sampled_coupling(g, u, IDENTITY)
    sin = apply_sampled_coupling(g, u, SINE)
    np.testing.assert_allclose(sin, lin, atol=1e-20)


def test_unknown_coupling():
    with pytest.raises(Exception):
        get_coupling("nope")
