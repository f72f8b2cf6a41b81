import math

import numpy as np
import pytest

from magphon.errors import PreconditionError
from magphon.fracdiff import (GridFunction, boundary_leak_fraction, evolve,
                              from_callable, gaussian_grid,
                              self_similar_profile_check)


def test_grid_validation():
    with pytest.raises(ValueError):
        GridFunction(10.0, np.zeros(1000))  # not a power of two
    with pytest.raises(ValueError):
        GridFunction(-1.0, np.zeros(256))
    g = GridFunction(10.0, np.zeros(256))
    assert g.spacing == pytest.approx(20.0 / 256)
    assert g.y[0] == -10.0


def test_time_zero_is_identity():
    g = gaussian_grid(50.0, 4096, sigma=2.0)
    out = evolve(g, 0.7, 5.0 / 6.0, 0.0)
    assert np.array_equal(out.values, np.fft.irfft(np.fft.rfft(g.values),
                                                   n=4096))
    assert np.max(np.abs(out.values - g.values)) < 1e-15


def test_heat_kernel_matches_gaussian_closed_form():
    # s_half = 1 reduces to the classical heat equation
    sigma0, d_const, t = 1.0, 0.7, 1.3
    grid = gaussian_grid(40.0, 4096, sigma=sigma0)
    out = evolve(grid, d_const, 1.0, t)
    var = sigma0 ** 2 + 2.0 * d_const * t
    exact = np.exp(-0.5 * out.y ** 2 / var) / math.sqrt(2.0 * math.pi * var)
    peak = exact.max()
    sel = exact > 1e-4 * peak
    rel = np.abs(out.values[sel] - exact[sel]) / exact[sel]
    assert np.max(rel) < 1e-8


def test_mass_conservation():
    g = gaussian_grid(200.0, 2 ** 14, sigma=0.5, mass=2.5)
    out = evolve(g, 1.0, 5.0 / 6.0, 1.0)
    assert out.mass() == pytest.approx(g.mass(), rel=1e-12)


def test_semigroup_property():
    g = gaussian_grid(200.0, 2 ** 13, sigma=1.0)
    one = evolve(evolve(g, 0.8, 5.0 / 6.0, 0.4), 0.8, 5.0 / 6.0, 0.6)
    two = evolve(g, 0.8, 5.0 / 6.0, 1.0)
    scale = np.max(np.abs(two.values))
    assert np.max(np.abs(one.values - two.values)) < 1e-12 * scale


def test_positivity_preservation():
    g = gaussian_grid(200.0, 2 ** 14, sigma=0.1)
    out = evolve(g, 1.0, 5.0 / 6.0, 1.0)
    assert out.values.min() > -1e-10 * out.values.max()


def test_parity_preservation():
    g = gaussian_grid(100.0, 2 ** 12, sigma=0.5)
    out = evolve(g, 0.5, 5.0 / 6.0, 0.7)
    vals = out.values
    n = vals.size
    # y_j = -L + j dy; the reflection of index j (j>0) is index n - j
    mirrored = np.concatenate([[vals[0]], vals[:0:-1]])
    assert np.max(np.abs(vals - mirrored)) < 1e-13 * np.max(np.abs(vals))


def test_contractivity():
    g = gaussian_grid(200.0, 2 ** 13, sigma=0.3)
    out = evolve(g, 1.0, 5.0 / 6.0, 2.0)
    assert np.max(np.abs(out.values)) <= np.max(np.abs(g.values)) \
        * (1.0 + 1e-10)


def test_evolve_argument_validation():
    g = gaussian_grid(10.0, 256)
    with pytest.raises(ValueError):
        evolve(g, -1.0, 5.0 / 6.0, 1.0)
    with pytest.raises(ValueError):
        evolve(g, 1.0, 1.5, 1.0)
    with pytest.raises(ValueError):
        evolve(g, 1.0, 5.0 / 6.0, -0.1)


def test_self_similar_trivial_and_classical():
    g = gaussian_grid(40.0, 2 ** 16, sigma=0.003)
    assert self_similar_profile_check(g, 1.0, 1.0, 1.0, 1.0) == 0.0
    dist = self_similar_profile_check(g, 1.0, 1.0, 1.0, 2.0)
    assert dist < 1e-6


def test_self_similar_fractional():
    g = gaussian_grid(200.0, 2 ** 14, sigma=0.05)
    dist = self_similar_profile_check(g, 1.0, 5.0 / 6.0, 1.0, 2.0)
    peak = evolve(g, 1.0, 5.0 / 6.0, 2.0).values.max()
    assert dist < 1e-3 * peak


def test_leak_guard_trips_on_small_domain():
    g = gaussian_grid(3.0, 2 ** 12, sigma=0.05)
    with pytest.raises(PreconditionError):
        self_similar_profile_check(g, 1.0, 5.0 / 6.0, 1.0, 8.0)


def test_boundary_leak_fraction_zero_for_compact_bump():
    g = gaussian_grid(50.0, 2 ** 12, sigma=1.0)
    assert boundary_leak_fraction(g) < 1e-12


def test_from_callable_matches_grid():
    g = from_callable(lambda y: np.cos(0.1 * y), 30.0, 512)
    assert g.values[0] == pytest.approx(math.cos(-3.0))
