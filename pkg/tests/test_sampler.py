import numpy as np
import pytest

from graphdyn import (Constant, FixedDensity, PowerLaw, build_grid, degree_statistics,
                      edge_probability, expected_degrees, sample_graph)
from graphdyn.errors import DegenerateDegreeError, DomainError
from graphdyn.sampler import CELL_AVERAGED, hash64, kernel_matrix, pair_uniforms


def test_grid():
    g = build_grid(4)
    np.testing.assert_allclose(g.points, [0.25, 0.5, 0.75, 1.0])
    with pytest.raises(DomainError):
        build_grid(1)


def test_edge_probability_value(pl02):
    p = edge_probability(pl02, FixedDensity(0.5), 2, 1, 1)
    assert p == pytest.approx(0.4222425, rel=1e-6)


def test_cell_averaged_rows_sum_to_mass(pl02):
    k = kernel_matrix(pl02, 1e-9, 8, CELL_AVERAGED)
    assert k.mean() == pytest.approx(1.0, rel=1e-12)


def test_pair_uniforms_range_and_order_independence():
    i = np.arange(100)
    j = i[::-1].copy()
    u = pair_uniforms(7, i, j)
    assert np.all((u >= 0) & (u < 1))
    np.testing.assert_array_equal(u[::-1], pair_uniforms(7, i[::-1], j[::-1]))
    assert hash64(1, 2, 3) == hash64(1, 2, 3) != hash64(1, 2, 4)


def test_sample_deterministic_and_symmetric(pl02, sched05):
    a = sample_graph(pl02, sched05, 64, seed=11)
    b = sample_graph(pl02, sched05, 64, seed=11)
    c = sample_graph(pl02, sched05, 64, seed=12)
    assert a.same_structure(b)
    assert not a.same_structure(c)
    csr = a.to_csr()
    assert (csr != csr.T).nnz == 0


def test_unbiased_two_nodes():
    spec, sched = PowerLaw(0.2), FixedDensity(0.5)
    p = edge_probability(spec, sched, 2, 1, 2)
    hits = sum(1 in sample_graph(spec, sched, 2, s).neighbors(0) for s in range(20000))
    # 4 sigma binomial band
    assert abs(hits / 20000 - p) < 4 * np.sqrt(p * (1 - p) / 20000)


def test_full_density_gives_complete_graph():
    g = sample_graph(Constant(1.0), FixedDensity(1.0), 5, seed=0)
    assert g.num_edges == 15
    np.testing.assert_array_equal(g.degrees, 5)


def test_expected_degrees(pl02, sched05):
    d = expected_degrees(pl02, sched05, 1024)
    assert d[0] == pytest.approx(102.205, rel=1e-4)
    assert d[-1] == pytest.approx(25.551, rel=1e-4)


def test_degenerate_degree():
    with pytest.raises(DegenerateDegreeError):
        expected_degrees(Constant(0.0), FixedDensity(0.5), 4)


def test_degree_statistics_loop_counts_once():
    g = sample_graph(Constant(1.0), FixedDensity(1.0), 3, seed=0)
    s = degree_statistics(g)
    assert s.density == pytest.approx(1.0)
