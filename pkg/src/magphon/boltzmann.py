"""Feynman-Kac Monte Carlo solver for the scaled linear Boltzmann equation.

The scaled transport equation is solved backwards: the value at (y, k, i) and
macroscopic time t is the expectation of the initial datum evaluated at the
endpoint of a jump trajectory run to horizon N t, whose position moves by
omega'(k(s)) / (2 pi N^(3/5)) (exponent 2/3 when B = 0).  Every estimate
carries its Monte Carlo standard error.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import AbsorbingStateError
from .kinetic import ctrw_endpoint_ensemble, scaling_exponent

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class InitialDatum:
    """Smooth initial energy density u0(y, k, i).

    Two kinds: ``gaussian`` is a Gaussian bump in y times a trigonometric
    polynomial in k per branch; ``table`` is the same y-profile times a
    periodic piecewise-linear table in k per branch.  ``y_sigma = inf`` makes
    the y-profile identically one (space-homogeneous data).
    """

    kind: str = "gaussian"
    y_center: float = 0.0
    y_sigma: float = 1.0
    branch_cos: tuple = ((1.0,), (1.0,))
    branch_sin: tuple = ((), ())
    table_k: tuple = ()
    table_values: tuple = ((), ())

    def __post_init__(self):
        if self.kind not in ("gaussian", "table"):
            raise ValueError("kind must be 'gaussian' or 'table'")
        if not self.y_sigma > 0.0:
            raise ValueError("y_sigma must be positive")

    def y_profile(self, y):
        if math.isinf(self.y_sigma):
            return np.ones_like(np.asarray(y, dtype=np.float64))
        z = (np.asarray(y, dtype=np.float64) - self.y_center) / self.y_sigma
        return np.exp(-0.5 * z * z)

    def _branch_profile(self, k, i):
        k = np.asarray(k, dtype=np.float64)
        if self.kind == "table":
            nodes = np.asarray(self.table_k, dtype=np.float64)
            vals = np.asarray(self.table_values[i - 1], dtype=np.float64)
            # periodic linear interpolation on one torus period
            xp = np.concatenate([nodes, [nodes[0] + 1.0]])
            fp = np.concatenate([vals, [vals[0]]])
            return np.interp((k - nodes[0]) % 1.0, xp - nodes[0], fp)
        c = TWO_PI * k
        acc = np.zeros_like(c)
        for m, a in enumerate(self.branch_cos[i - 1]):
            acc = acc + a * np.cos(m * c)
        for m, b in enumerate(self.branch_sin[i - 1], start=1):
            acc = acc + b * np.sin(m * c)
        return acc

    def k_profile(self, k, branch):
        h1 = self._branch_profile(k, 1)
        h2 = self._branch_profile(k, 2)
        return np.where(np.asarray(branch) == 1, h1, h2)

    def __call__(self, y, k, branch):
        return self.y_profile(y) * self.k_profile(k, branch)

    def k_integral(self):
        """Sum over branches of the k-profile integral over the torus."""
        if self.kind == "table":
            return float(sum(np.mean(v) for v in self.table_values))
        return float(sum(c[0] for c in self.branch_cos if len(c)))

    def ubar0(self, y):
        """Initial macroscopic energy profile: y-profile times k-integral."""
        return self.y_profile(y) * self.k_integral()

    def bounds(self, n_grid=4096):
        """(min, max) of u0 over a fine evaluation grid."""
        kg = -0.5 + np.arange(n_grid) / n_grid
        hmin, hmax = np.inf, -np.inf
        for i in (1, 2):
            h = self.k_profile(kg, i)
            hmin, hmax = min(hmin, h.min()), max(hmax, h.max())
        if math.isinf(self.y_sigma):
            gmin, gmax = 1.0, 1.0
        else:
            gmin, gmax = 0.0, 1.0
        candidates = [gmin * hmin, gmin * hmax, gmax * hmin, gmax * hmax]
        return min(candidates), max(candidates)


def space_homogeneous(branch_cos=((1.0,), (1.0,)), branch_sin=((), ())):
    """Datum depending on (k, i) only (for collision-only checks)."""
    return InitialDatum(kind="gaussian", y_sigma=math.inf,
                        branch_cos=branch_cos, branch_sin=branch_sin)


def evaluate_density(y, start, n_scale, t, u0, n_paths, params, rng):
    """Feynman-Kac estimate of the scaled density at one phase-space point.

    Runs ``n_paths`` trajectories from ``start`` to horizon ``n_scale * t``
    and averages the datum at the transported endpoints.  Returns
    (value, stderr).
    """
    if n_scale < 1.0:
        raise ValueError("scaling parameter must be >= 1")
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    ens = ctrw_endpoint_ensemble(start.k, start.branch, n_scale * t, params,
                                 rng, n_paths)
    z = y + n_scale ** (-scaling_exponent(params)) * ens.w
    vals = np.asarray(u0(z, ens.k_end, ens.i_end), dtype=np.float64)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(vals.size)
                                     if vals.size > 1 else 0.0)


def k_averaged_density(y, n_scale, t, u0, n_paths, params, rng):
    """Estimate of the branch-summed k-integral of the scaled density.

    Start modes are drawn uniformly on the torus times branches (one path
    per start); the factor 2 converts the uniform average into the measure
    of T x {1,2}.  Returns (value, stderr).
    """
    cur = rng.substream(0).cursor()
    ks = cur.uniforms32(n_paths) - 0.5
    branches = np.where(cur.uniforms32(n_paths) < 0.5, 1, 2)
    if np.any(ks == 0.0):  # probability zero by construction
        raise AbsorbingStateError("drew the absorbing mode k=0")
    ens = ctrw_endpoint_ensemble(ks, branches, n_scale * t, params,
                                 rng.substream(1), None)
    z = y + n_scale ** (-scaling_exponent(params)) * ens.w
    vals = 2.0 * np.asarray(u0(z, ens.k_end, ens.i_end), dtype=np.float64)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(vals.size)
                                     if vals.size > 1 else 0.0)


def endpoint_pool(n_scale, t, n_paths, params, rng):
    """Shared pool of uniform-start endpoints for many evaluation points.

    Returns (start ks, start branches, transported displacement, end ks,
    end branches); slices of the pool feed :func:`pool_k_average`.
    """
    cur = rng.substream(0).cursor()
    ks = cur.uniforms32(n_paths) - 0.5
    branches = np.where(cur.uniforms32(n_paths) < 0.5, 1, 2)
    ens = ctrw_endpoint_ensemble(ks, branches, n_scale * t, params,
                                 rng.substream(1), None)
    disp = n_scale ** (-scaling_exponent(params)) * ens.w
    return ks, branches, disp, ens.k_end, ens.i_end


def pool_k_average(y, u0, disp, k_end, i_end):
    """k-averaged estimate at position y from a pool slice."""
    vals = 2.0 * np.asarray(u0(y + disp, k_end, i_end), dtype=np.float64)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(vals.size)
                                     if vals.size > 1 else 0.0)
