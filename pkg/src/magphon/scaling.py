"""Tail-index estimation and stable-law diagnostics for endpoint ensembles.

The jump observable has a power-law tail under the stationary law, and the
scaled position endpoints approach a symmetric stable law, so the statistics
here are the classic heavy-tail toolkit: the Hill estimator on upper order
statistics, two-sample Kolmogorov-Smirnov for self-similarity, and log-linear
fits of the empirical characteristic function magnitude.

Fourier convention (shared with :mod:`magphon.fracdiff`): the fractional
Laplacian power s acts with symbol |xi|^(2s) in the angular-frequency
variable dual to E[exp(i xi X)], so a fitted decay exp(-t D |xi|^(5/3))
hands its D straight to the spectral solver.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as gamma_fn
from scipy.stats import ks_2samp

from .errors import PreconditionError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class TailReport:
    """Hill estimate of a tail index with its asymptotic 95% interval."""

    hill_estimate: float
    hill_ci: tuple
    k_fraction: float
    n_samples: int


@dataclass(frozen=True)
class StableFit:
    """Characteristic-function fit: free exponent, scale at a pinned
    exponent, log-log goodness of fit, and the usable frequency band."""

    exponent: float
    d_constant: float
    r_squared: float
    xi_range: tuple


def hill_tail_index(samples, k_fraction=0.01):
    """Hill estimator on the top ``k_fraction`` of |samples|.

    The confidence interval uses asymptotic normality, width index/sqrt(m).
    """
    if not 0.0 < k_fraction <= 0.05:
        raise ValueError("k_fraction must be in (0, 0.05]")
    x = np.abs(np.asarray(samples, dtype=np.float64))
    x = x[x > 0.0]
    n = x.size
    if n == 0:
        raise PreconditionError("no nonzero samples")
    m = int(math.floor(k_fraction * n))
    if m < 100:
        raise PreconditionError(
            f"only {m} tail exceedances; need at least 100")
    xs = np.sort(x)[::-1]
    logs = np.log(xs[:m])
    estimate = 1.0 / (np.mean(logs) - math.log(xs[m]))
    half = 1.96 * estimate / math.sqrt(m)
    return TailReport(float(estimate), (float(estimate - half),
                                        float(estimate + half)),
                      float(k_fraction), int(n))


def empirical_charfn(samples, xi_grid):
    """|E[exp(i xi X)]| estimated from the ensemble, per grid frequency."""
    x = np.asarray(samples, dtype=np.float64)
    out = np.empty(len(xi_grid))
    for j, xi in enumerate(np.asarray(xi_grid, dtype=np.float64)):
        arg = xi * x
        out[j] = math.hypot(float(np.mean(np.cos(arg))),
                            float(np.mean(np.sin(arg))))
    return out


def default_xi_grid(samples, n_points=40):
    """Geometric frequency band anchored at 2 pi / (10 IQR) of the data."""
    x = np.asarray(samples, dtype=np.float64)
    q75, q25 = np.percentile(x, [75.0, 25.0])
    iqr = q75 - q25
    if not iqr > 0.0:
        raise PreconditionError("degenerate ensemble (zero IQR)")
    lo = TWO_PI / (10.0 * iqr)
    hi = TWO_PI * 8.0 / iqr
    return np.geomspace(lo, hi, n_points)


def fit_stable_charfn(ensemble, t, xi_grid=None, exponent0=5.0 / 3.0):
    """Fit exp(-t D |xi|^exponent0) to the empirical characteristic function.

    -log|charfn| is regressed through the origin on |xi|^exponent0, giving
    ``d_constant`` = slope / t; a free-exponent log-log fit gives
    ``exponent`` and ``r_squared``.  Frequencies whose magnitude sits below
    the noise floor 10/sqrt(n) are dropped; fewer than 5 survivors is an
    error.
    """
    x = np.asarray(ensemble, dtype=np.float64)
    if x.size == 0:
        raise PreconditionError("empty ensemble")
    if t <= 0.0:
        raise ValueError("t must be positive")
    if xi_grid is None:
        xi_grid = default_xi_grid(x)
    xi = np.asarray(xi_grid, dtype=np.float64)
    if np.any(xi <= 0.0):
        raise ValueError("xi grid must be positive")
    phi = empirical_charfn(x, xi)
    floor = 10.0 / math.sqrt(x.size)
    usable = (phi > floor) & (phi < 1.0)
    if int(usable.sum()) < 5:
        raise PreconditionError("fewer than 5 usable frequencies above the "
                                "noise floor")
    xi_u = xi[usable]
    y = -np.log(phi[usable])
    basis = xi_u ** exponent0
    slope = float(np.dot(y, basis) / np.dot(basis, basis))
    lx = np.log(xi_u)
    ly = np.log(y)
    a, b = np.polyfit(lx, ly, 1)
    resid = ly - (a * lx + b)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return StableFit(float(a), slope / t, r2,
                     (float(xi_u.min()), float(xi_u.max())))


def self_similarity_ks(ensemble_a, ensemble_b, ratio=1.0, exponent=0.0):
    """Two-sample KS statistic between endpoint ensembles.

    Endpoints already scaled by their own horizon factor are compared
    directly (the defaults); ``ensemble_b`` can be deflated by
    ``ratio**exponent`` first when raw endpoints are supplied.
    """
    a = np.asarray(ensemble_a, dtype=np.float64)
    b = np.asarray(ensemble_b, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        raise PreconditionError("empty ensemble")
    return float(ks_2samp(a, b / ratio ** exponent).statistic)


def ks_null_quantile(n, m, level=0.99):
    """Asymptotic null quantile c(level) * sqrt((n+m)/(n m)) of the KS stat."""
    c = math.sqrt(-0.5 * math.log((1.0 - level) / 2.0))
    return c * math.sqrt((n + m) / (n * m))


def waiting_time_moment_53():
    """Integral of exp(-y) y^(5/3) over y > 0 (the 5/3 moment of a unit
    exponential), Gamma(8/3)."""
    return float(gamma_fn(8.0 / 3.0))


def predicted_charfn_constants(params, plateau):
    """Stable-law scale prediction assembled from the measured tail plateau.

    Combines the plateau of lam^(5/3) * tail mass with the exponential
    waiting-moment Gamma(8/3) and the stationary mean holding time 1/(2
    gamma); the result fixes all (B, gamma) dependence of the limit scale and
    is compared to characteristic-function fits up to the universal
    normalisation of the 5/3-stable law.
    """
    if plateau <= 0.0:
        raise ValueError("plateau must be positive")
    t_bar = 0.5 / params.gamma
    return 5.0 * plateau * waiting_time_moment_53() / t_bar


def sample_symmetric_stable(alpha, size, cursor):
    """Exact symmetric alpha-stable draws (Chambers-Mallows-Stuck).

    Standard parameterisation: E[exp(i xi X)] = exp(-|xi|^alpha).
    """
    if not 0.0 < alpha <= 2.0:
        raise ValueError("alpha must be in (0, 2]")
    u = cursor.uniforms(size)
    v = math.pi * (u - 0.5)
    wexp = -np.log(cursor.uniforms(size))
    if alpha == 1.0:
        return np.tan(v)
    x = (np.sin(alpha * v) / np.cos(v) ** (1.0 / alpha)
         * (np.cos((1.0 - alpha) * v) / wexp) ** ((1.0 - alpha) / alpha))
    return x
