import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from graphdyn import (Block, Constant, DensitySchedule, FixedDensity, PowerLaw,
                      check_assumptions, degree_g, eval_u, eval_w, nu_inf, total_mass,
                      truncate_w)
from graphdyn.errors import AssumptionViolation, DomainError
from graphdyn.graphon import (L2, L4, cell_integrals, gauss_cell_integrals,
                              integrability_class)


def test_power_law_values(pl02):
    assert eval_w(pl02, 0.25, 0.25) == pytest.approx(1.1143047, rel=1e-6)
    assert degree_g(pl02, 0.5) == pytest.approx(0.91896, rel=1e-4)
    assert eval_u(pl02, 0.7, 0.25) == pytest.approx(1.055606, rel=1e-6)


def test_truncation_caps_at_inverse_density(pl02):
    assert truncate_w(pl02, 0.1, 0.001, 0.001) == pytest.approx(10.0)
    assert truncate_w(pl02, 0.1, 0.5, 0.5) == pytest.approx(eval_w(pl02, 0.5, 0.5))


def test_out_of_domain():
    with pytest.raises(DomainError):
        eval_w(PowerLaw(0.2), 1.5, 0.5)
    with pytest.raises(DomainError):
        PowerLaw(1.0)


@pytest.mark.parametrize("alpha", [0.1, 0.2, 0.4])
def test_u_normalized(alpha):
    spec = PowerLaw(alpha)
    val, _ = integrate.quad(lambda y: eval_u(spec, 0.3, y), 0, 1, epsabs=1e-12, limit=200)
    assert val == pytest.approx(1.0, abs=1e-8)


def test_block_u_normalized():
    spec = Block((0.0, 0.3, 1.0), ((1.0, 2.0), (2.0, 0.5)))
    for x in (0.1, 0.6):
        val, _ = integrate.quad(lambda y: eval_u(spec, x, y), 0, 1, points=[0.3])
        assert val == pytest.approx(1.0, abs=1e-10)


def test_integrability_flags():
    assert integrability_class(PowerLaw(0.2)) == {L2, L4}
    assert integrability_class(PowerLaw(0.3)) == {L2}
    assert integrability_class(PowerLaw(0.6)) == frozenset()
    assert integrability_class(Constant(1.0)) == {L2, L4}


def test_total_mass_and_nu():
    assert total_mass(PowerLaw(0.2)) == pytest.approx(1.0)
    assert total_mass(Constant(0.7)) == pytest.approx(0.7)
    assert nu_inf(PowerLaw(0.2)) == pytest.approx(0.8)


def test_nu_inf_zero_row():
    spec = Block((0.0, 0.5, 1.0), ((0.0, 0.0), (0.0, 1.0)))
    with pytest.raises(AssumptionViolation):
        nu_inf(spec)


def test_schedules():
    assert DensitySchedule(0.5).rho(1024) == pytest.approx(1 / 32)
    assert FixedDensity(0.2).rho(7) == 0.2


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 0.45), st.sampled_from([2, 4, 8]))
def test_cell_integrals_match_quadrature(alpha, n):
    spec = PowerLaw(alpha)
    exact = cell_integrals(spec, n, "W")
    assert exact.sum() == pytest.approx(1.0, rel=1e-12)
    # singular first row/column is skipped; smooth cells checked by Gauss
    gauss = gauss_cell_integrals(lambda x, y: eval_w(spec, x, y), n)
    np.testing.assert_allclose(exact[1:, 1:], gauss[1:, 1:], rtol=1e-9)


def test_assumption_report_constant():
    r = check_assumptions(Constant(1.0), DensitySchedule(0.5), 4)
    assert (r.delta_sup, r.l4_row_bound, r.nu) == pytest.approx((0.0, 1.0, 1.0))
    assert r.violations == ()


def test_assumption_report_power_law(pl02, sched05):
    r = check_assumptions(pl02, sched05, 256)
    assert r.delta_sup == pytest.approx(0.00539, rel=1e-2)
    assert r.l4_row_bound == pytest.approx(1.0854, rel=1e-3)
