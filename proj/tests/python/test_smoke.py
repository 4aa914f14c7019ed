import cmath
import math

import numpy as np
import pytest

import netsense as ns


def test_generate_star():
    g = ns.generate("star", 10)
    assert g.n == 10
    assert len(g.edges) == 9
    assert g.kappa == pytest.approx(1.8)
    assert max(g.degree) == 9


def test_interaction_matrix_and_decomposition():
    g = ns.generate("star", 4)
    a = ns.interaction_matrix(g)
    assert a.shape == (4, 4)
    assert a[0, 1] == pytest.approx(2.0 / 3.0)
    dec = ns.decompose(g)
    assert dec.eigenvalues[0] == pytest.approx(math.sqrt(3) / 1.5)
    assert dec.weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert dec.weights[0] == pytest.approx(0.9330, abs=1e-4)
    lam, w1 = ns.leading_mode(g)
    assert lam == pytest.approx(dec.eigenvalues[0], rel=1e-12)
    assert w1 == pytest.approx(dec.weights[0], rel=1e-10)


def test_complete_graph_mean_response():
    g = ns.generate("complete", 16)
    dyn = ns.NodalDynamics.second_order(math.sqrt(2), 0.05, 0.37949)
    a = ns.interaction_matrix(g)
    for w in (0.1, 1.0, 3.0):
        expected = 1.0 / (dyn.g(1j * w) - 1.0)
        assert abs(ns.mean_sensitivity(a, dyn, w) - expected) <= 1e-9 * abs(expected)
        total, first, residue = ns.mean_sensitivity_spectral(ns.decompose(a), dyn, w)
        assert abs(residue) <= 1e-12


def test_node_sensitivity_matches_numpy_solve():
    g = ns.generate("er", 40, seed=3, p=0.2, weights="uniform")
    a = ns.interaction_matrix(g)
    dyn = ns.NodalDynamics.second_order(1.0, 0.05, 0.5)
    x = ns.node_sensitivity(a, dyn, 0.8)
    ref = np.linalg.solve(dyn.g(0.8j) * np.eye(40) - a, np.ones(40))
    assert np.max(np.abs(x - ref)) <= 1e-10


def test_sweep_and_peaks():
    g = ns.generate("complete", 8)
    dyn = ns.NodalDynamics.second_order(1.0, 0.05, 0.5)
    sw = ns.sweep(g, dyn, ns.log_grid(0.05, 20.0, 200))
    assert sw.node_response.shape == (8, 200)
    assert len(sw.mean_response) == 200
    assert ns.count_peaks(sw) == 1


def test_unstable_raises():
    g = ns.generate("complete", 8)
    dyn = ns.NodalDynamics.second_order(1.0, 0.05, 2.0)
    with pytest.raises(ns.UnstableError):
        ns.sweep(g, dyn, ns.log_grid(0.1, 10.0, 10))


def test_invalid_argument():
    with pytest.raises(ns.InvalidArgument):
        ns.generate("er", 10, p=2.0)
    assert issubclass(ns.InvalidArgument, ns.Error)


def test_correlation_and_crossover():
    g = ns.generate("er", 300, seed=2, p=0.05)
    lam, _ = ns.leading_mode(g)
    dyn = ns.NodalDynamics.second_order(1.0, 0.01, 0.9 / lam)
    sw = ns.sweep(g, dyn, ns.log_grid(0.1, 10.0, 200))
    curve = ns.degree_correlation(g, sw)
    x = ns.find_crossover(curve["omegas"], curve["spearman"])
    assert x is not None and 0.5 <= x <= 2.0
    cycle = ns.generate("cycle", 10)
    cycle_sweep = ns.sweep(cycle, dyn, ns.log_grid(0.1, 10.0, 20))
    with pytest.raises(ns.UndefinedStatistic):
        ns.degree_correlation(cycle, cycle_sweep)


def test_weight_scaling():
    r = ns.weight_scaling("er", [100, 200, 400], 5, "er", seed=1, p=0.05)
    assert r["sizes"] == [100, 200, 400]
    assert len(r["w1"]) == 3 and len(r["w1"][0]) == 5
    assert r["slope"] < 0


def test_simulation_matches_frequency_domain():
    a = np.zeros((1, 1))
    dyn = ns.NodalDynamics.second_order(1.0, 0.05, 0.8)
    t, x = ns.simulate_forced(a, dyn, 1.0, decay_rate=0.05)
    amp, phase, steady = ns.steady_state(t, x, 1.0)
    expected = dyn.f(1j)
    assert steady
    assert amp[0] == pytest.approx(abs(expected), rel=0.01)
    assert phase[0] == pytest.approx(cmath.phase(expected), abs=math.radians(1))


def test_er_limit_model():
    dyn = ns.NodalDynamics.second_order(math.sqrt(2), 0.05, 0.37949)
    lim = dyn.er_limit_model()
    for w in (0.3, 1.1, 4.0):
        f = dyn.f(1j * w)
        assert abs(lim.f(1j * w) - f / (1 - f)) <= 1e-10 * abs(f / (1 - f))
