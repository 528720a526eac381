import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from graphdyn import (Constant, DensitySchedule, PowerLaw, dissipation_identity_check,
                      gn_norm, kernel_l4_distance, restrict_to_coarse, spacetime_l2_error,
                      step_l2_norm, sup_norm)
from graphdyn.analysis import ErrorRecord, ErrorReport, apriori_constant, max_weighted_gap
from graphdyn.dynamics import Trajectory
from graphdyn.errors import DimensionError, DomainError, IntegrabilityError


def traj(states, times):
    states = np.asarray(states, dtype=float)
    return Trajectory(states.shape[1], np.asarray(times, float), states, "x", None, {})


def test_norms():
    assert step_l2_norm([3.0, 4.0]) == pytest.approx(np.sqrt(12.5))
    assert gn_norm([1.0, 1.0], [2.0, 2.0]) == pytest.approx(np.sqrt(2))
    assert sup_norm([-3, 2]) == 3
    with pytest.raises(DomainError):
        gn_norm([1.0], [0.0])
    with pytest.raises(DimensionError):
        gn_norm([1.0, 2.0], [1.0])


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3), min_size=8, max_size=8))
def test_restriction_preserves_mean(vals):
    fine = np.array(vals)
    assert restrict_to_coarse(fine, 2).mean() == pytest.approx(fine.mean(), abs=1e-9)
    assert step_l2_norm(restrict_to_coarse(fine, 4)) <= step_l2_norm(fine) + 1e-9


def test_restriction_rejects_non_divisor():
    with pytest.raises(DimensionError):
        restrict_to_coarse(np.zeros(8), 3)


def test_spacetime_error_exponential():
    # ||e^{-t}||^2 integrated over [0,1] is (1 - e^-2)/2
    t = np.linspace(0, 1, 2001)
    a = traj(np.exp(-t)[:, None] * np.ones((1, 4)), t)
    b = traj(np.zeros((t.size, 2)), t)
    assert spacetime_l2_error(a, b) == pytest.approx(0.6575199, rel=1e-6)


def test_time_grid_mismatch():
    a = traj(np.zeros((3, 2)), [0, 0.5, 1])
    b = traj(np.zeros((2, 2)), [0, 1])
    with pytest.raises(DomainError):
        spacetime_l2_error(a, b)


def test_max_weighted_gap():
    t = [0.0, 1.0]
    a = traj([[0, 0], [1, 1]], t)
    b = traj([[0, 0], [0, 0]], t)
    assert max_weighted_gap(a, b, [4.0, 4.0]) == pytest.approx(2.0)


def test_kernel_distance(pl02, sched05):
    assert kernel_l4_distance(Constant(1.0), sched05, 64) == pytest.approx(0.0, abs=1e-14)
    assert kernel_l4_distance(pl02, sched05, 256) < kernel_l4_distance(pl02, sched05, 64)
    with pytest.raises(IntegrabilityError):
        kernel_l4_distance(PowerLaw(0.3), sched05, 16)


def test_dissipation_identity_random():
    rng = np.random.default_rng(1)
    for n in (1, 2, 7, 40):
        a = rng.random((n, n))
        lhs, rhs = dissipation_identity_check(a + a.T, rng.standard_normal(n))
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-14)
    with pytest.raises(DomainError):
        dissipation_identity_check(np.array([[0, 1], [0, 0.0]]), np.zeros(2))


def test_apriori_constant():
    assert apriori_constant(0.0, 5.0) == 1.0
    assert apriori_constant(1.0, 1.0) == pytest.approx(1 + 3 * np.exp(3))


def test_report_aggregates():
    recs = [ErrorRecord(4, s, spacetime_l2=v) for s, v in enumerate([1.0, 2.0, 3.0, 4.0])]
    recs.append(ErrorRecord(4, 9, error="BlowUpError: boom"))
    rep = ErrorReport("x", {}, 0.5, 1.0, None, "spacetime_l2", recs)
    agg = rep.aggregates()[0]
    assert agg["median"] == 2.5 and agg["iqr"] == pytest.approx(1.5)
    assert rep.as_dict()["records"][-1]["failed"] is True
