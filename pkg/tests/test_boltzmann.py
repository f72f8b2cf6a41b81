import math

import numpy as np
import pytest
from scipy.linalg import expm

from magphon.boltzmann import (InitialDatum, endpoint_pool, evaluate_density,
                               k_averaged_density, pool_k_average,
                               space_homogeneous)
from magphon.chain import jump_generator_matrix
from magphon.dispersion import ModelParams, PhononState
from magphon.errors import AbsorbingStateError
from magphon.rng import RngStream

P11 = ModelParams(1.0, 1.0)
START = PhononState(0.2, 1)


def test_datum_evaluation_and_integral():
    u0 = InitialDatum(y_center=0.5, y_sigma=2.0,
                      branch_cos=((1.0, 0.3), (0.5,)),
                      branch_sin=((), (0.2,)))
    assert u0(0.5, 0.0, 1) == pytest.approx(1.3)
    assert u0(0.5, 0.25, 2) == pytest.approx(0.5 + 0.2 * math.sin(math.pi / 2))
    # k integral: only the constant cosine terms survive
    assert u0.k_integral() == pytest.approx(1.5)
    assert u0.ubar0(0.5) == pytest.approx(1.5)
    lo, hi = u0.bounds()
    assert lo <= 0.0 <= hi  # gaussian reaches 0 at infinity


def test_table_datum_periodic_interp():
    nodes = tuple(-0.5 + np.arange(8) / 8)
    vals1 = tuple(np.cos(2 * math.pi * np.asarray(nodes)) + 2.0)
    vals2 = tuple(np.zeros(8) + 1.0)
    u0 = InitialDatum(kind="table", y_sigma=math.inf, table_k=nodes,
                      table_values=(vals1, vals2))
    assert u0(0.0, nodes[3], 1) == pytest.approx(vals1[3])
    # midpoint between the last node and the wrapped first node
    mid = nodes[-1] + 1.0 / 16
    expected = 0.5 * (vals1[-1] + vals1[0])
    assert u0(0.0, mid, 1) == pytest.approx(expected)
    assert u0.k_integral() == pytest.approx(np.mean(vals1) + 1.0)


def test_constant_datum_conserved_exactly():
    u0 = space_homogeneous(branch_cos=((0.75,), (0.75,)))
    value, err = evaluate_density(0.3, START, 100.0, 0.5, u0, 500, P11,
                                  RngStream(1, 0))
    assert value == 0.75
    assert err == 0.0
    value, err = k_averaged_density(0.3, 100.0, 0.5, u0, 500, P11,
                                    RngStream(1, 1))
    assert value == pytest.approx(1.5, rel=1e-14)


def test_time_zero_returns_initial_datum():
    u0 = InitialDatum(y_center=0.0, y_sigma=1.0)
    value, err = evaluate_density(0.7, START, 1000.0, 0.0, u0, 100, P11,
                                  RngStream(2, 0))
    assert value == pytest.approx(u0(0.7, START.k, START.branch), rel=1e-15)
    assert err == 0.0
    # k average at t = 0 against the quadrature of the k profile
    u0k = InitialDatum(y_center=0.0, y_sigma=1.0,
                       branch_cos=((1.0, 0.4), (0.6,)))
    value, err = k_averaged_density(0.7, 1000.0, 0.0, u0k, 200000, P11,
                                    RngStream(2, 1))
    target = float(u0k.ubar0(0.7))
    assert abs(value - target) < 3.0 * err + 1e-12


def test_maximum_principle():
    u0 = InitialDatum(y_center=0.0, y_sigma=1.0)
    lo, hi = u0.bounds()
    value, err = evaluate_density(0.4, START, 50.0, 1.0, u0, 4000, P11,
                                  RngStream(3, 0))
    assert lo - 1e-12 <= value <= hi + 1e-12


def test_linearity_under_shared_stream():
    f = InitialDatum(y_center=0.0, y_sigma=1.0)
    g = InitialDatum(y_center=1.0, y_sigma=2.0)
    combo = lambda y, k, i: 2.0 * f(y, k, i) - 0.5 * g(y, k, i)  # noqa: E731
    stream = RngStream(4, 0)
    vf, _ = evaluate_density(0.1, START, 50.0, 1.0, f, 2000, P11, stream)
    vg, _ = evaluate_density(0.1, START, 50.0, 1.0, g, 2000, P11, stream)
    vc, _ = evaluate_density(0.1, START, 50.0, 1.0, combo, 2000, P11, stream)
    assert vc == pytest.approx(2.0 * vf - 0.5 * vg, abs=5e-14)


def test_uniform_average_is_time_invariant():
    # space-homogeneous datum: the uniform average over start modes is the
    # conserved energy of the kinetic semigroup
    u0 = space_homogeneous(branch_cos=((1.0, 0.5), (0.4,)),
                           branch_sin=((0.2,), ()))
    target = 2.0 * 0.5 * u0.k_integral()  # = mean over uniform x 2
    for j, t in enumerate((0.2, 1.0)):
        value, err = k_averaged_density(0.0, 1.0, t, u0, 200000, P11,
                                        RngStream(5, j))
        assert abs(value - u0.k_integral()) < 3.0 * err


def test_against_collision_matrix_exponential():
    # 64-node generator oracle vs the Feynman-Kac estimator, collision only
    m = 64
    k_nodes = -0.5 + (np.arange(m) + 0.5) / m
    gen = jump_generator_matrix(k_nodes, P11)
    u0 = space_homogeneous(branch_cos=((1.0, 0.6), (0.5, -0.3)),
                           branch_sin=((), (0.2,)))
    h = np.concatenate([u0.k_profile(k_nodes, 1), u0.k_profile(k_nodes, 2)])
    root = RngStream(6, 0)
    for t in (0.1, 1.0):
        oracle = expm(gen * t) @ h
        worst = 0.0
        for idx in range(0, 2 * m, 7):  # subsample nodes for speed
            branch = 1 + idx // m
            kval = k_nodes[idx % m]
            value, err = evaluate_density(
                0.0, PhononState(kval, branch), 1.0, t, u0, 4000, P11,
                root.substream(int(t * 10) * 1000 + idx))
            worst = max(worst, abs(value - oracle[idx]) / max(err, 1e-12))
        assert worst < 3.5


def test_pool_slices_match_direct_estimates():
    u0 = InitialDatum(y_center=0.0, y_sigma=1.0)
    ks, branches, disp, k_end, i_end = endpoint_pool(
        50.0, 1.0, 3000, P11, RngStream(7, 0))
    value, err = pool_k_average(0.3, u0, disp, k_end, i_end)
    # same estimator via the public function and the same stream
    direct, derr = k_averaged_density(0.3, 50.0, 1.0, u0, 3000, P11,
                                      RngStream(7, 0))
    assert value == pytest.approx(direct, rel=1e-15)
    assert err == pytest.approx(derr, rel=1e-12)


def test_bad_arguments():
    u0 = InitialDatum()
    with pytest.raises(ValueError):
        evaluate_density(0.0, START, 0.5, 1.0, u0, 10, P11, RngStream(8, 0))
    with pytest.raises(AbsorbingStateError):
        evaluate_density(0.0, PhononState(0.0, 2), 10.0, 1.0, u0, 10, P11,
                         RngStream(8, 1))
    with pytest.raises(ValueError):
        InitialDatum(kind="nope")
    with pytest.raises(ValueError):
        InitialDatum(y_sigma=0.0)
