"""Closed-form model functions of the magnetically coupled harmonic chain.

Everything here is a pure, deterministic evaluation: the two-branch
dispersion relation split by the magnetic field, the branch weights that make
energy the L2 norm of the wave functions, the scattering kernel and rates of
the velocity-rotation noise, mean waiting times, and the heavy-tailed jump
observable driving the anomalous scaling.  Wave numbers live on the unit
torus T = [-1/2, 1/2); all functions accept scalars or numpy arrays.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import AbsorbingStateError, DegenerateModeError

TWO_PI = 2.0 * math.pi


def wrap_torus(k):
    """Map wave numbers to their representative in [-1/2, 1/2)."""
    return (np.asarray(k, dtype=np.float64) + 0.5) % 1.0 - 0.5


@dataclass(frozen=True)
class ModelParams:
    """Magnetic field strength and noise strength.

    ``bfield`` may be any real; 0 selects the degenerate regime where the two
    branches coincide.  ``gamma`` must be positive for anything involving the
    jump process (waiting times are 1/gamma-scaled); gamma = 0 is admitted so
    the microscopic chain can run with the noise switched off.
    """

    bfield: float
    gamma: float

    def __post_init__(self):
        if not (self.gamma >= 0.0 and math.isfinite(self.gamma)):
            raise ValueError("gamma must be a nonnegative finite real")
        if not math.isfinite(self.bfield):
            raise ValueError("bfield must be finite")

    @property
    def degenerate(self):
        return self.bfield == 0.0


@dataclass(frozen=True)
class PhononState:
    """A phonon mode: wave number in [-1/2, 1/2) and branch index 1 or 2."""

    k: float
    branch: int

    def __post_init__(self):
        if not (-0.5 <= self.k < 0.5):
            raise ValueError("wave number outside [-1/2, 1/2)")
        if self.branch not in (1, 2):
            raise ValueError("branch must be 1 or 2")


def alpha_hat(k):
    """Fourier symbol 2 - 2 cos(2 pi k) of the nearest-neighbour coupling.

    Evaluated as 4 sin^2(pi k), which keeps full precision as k -> 0.
    """
    s = np.sin(math.pi * np.asarray(k, dtype=np.float64))
    return 4.0 * s * s


def alpha_hat_dd0():
    """Curvature of the coupling symbol at k = 0 (equals 8 pi^2)."""
    return 8.0 * math.pi ** 2


def _root_term(k, params):
    return np.sqrt(alpha_hat(k) + 0.25 * params.bfield ** 2)


def omega(k, params):
    """Branch frequencies (omega_1, omega_2); the field splits them by B.

    The soft branch is evaluated as alpha_hat / (s + |B|/2) rather than
    s - |B|/2, which would cancel catastrophically as k -> 0.
    """
    s = _root_term(k, params)
    half_b = 0.5 * params.bfield
    if params.bfield > 0.0:
        return s + half_b, alpha_hat(k) / (s + half_b)
    if params.bfield < 0.0:
        return alpha_hat(k) / (s - half_b), s - half_b
    return s, s + np.zeros_like(s)


def theta_sq(k, params):
    """Squared branch weights (theta_1^2, theta_2^2); they sum to one."""
    k = np.asarray(k, dtype=np.float64)
    if params.degenerate:
        if np.any(k == 0.0):
            raise DegenerateModeError(
                "branch weights undefined at k=0 when B=0")
        half = np.full_like(k, 0.5, dtype=np.float64)
        return half, half.copy()
    s = _root_term(k, params)
    half_abs = 0.5 * abs(params.bfield)
    soft = alpha_hat(k) / (2.0 * s * (s + half_abs))
    stiff = 1.0 - soft
    if params.bfield > 0.0:
        return stiff, soft
    return soft, stiff


def theta(k, params):
    """Branch weights (theta_1, theta_2), both in [0, 1]."""
    t1, t2 = theta_sq(k, params)
    return np.sqrt(t1), np.sqrt(np.maximum(t2, 0.0))


def omega_prime(k, params):
    """Common derivative of the two branch frequencies.

    Odd in k; for B = 0 it jumps at k = 0, which is rejected.
    """
    k = np.asarray(k, dtype=np.float64)
    if params.degenerate and np.any(k == 0.0):
        raise DegenerateModeError("omega' undefined at k=0 when B=0")
    return TWO_PI * np.sin(TWO_PI * k) / _root_term(k, params)


def kernel_r(k, kp):
    """Scattering kernel 16 sin^2(pi k) sin^2(pi k'); symmetric, in [0,16]."""
    sk = np.sin(math.pi * np.asarray(k, dtype=np.float64))
    skp = np.sin(math.pi * np.asarray(kp, dtype=np.float64))
    return 16.0 * sk ** 2 * skp ** 2


def total_rate(k):
    """Kernel integrated over the second argument: 8 sin^2(pi k)."""
    s = np.sin(math.pi * np.asarray(k, dtype=np.float64))
    return 8.0 * s ** 2


def r_bar():
    """Total rate integrated over the torus."""
    return 4.0


def jump_rate(k, branch, params):
    """Scattering rate gamma * theta_i^2(k) * R(k) out of a mode."""
    t1, t2 = theta_sq(k, params)
    ti = np.where(np.asarray(branch) == 1, t1, t2)
    return params.gamma * ti * total_rate(k)


def waiting_time(state, params):
    """Mean holding time 1 / (gamma theta_i^2 R) of a phonon mode."""
    rate = jump_rate(state.k, state.branch, params)
    if not rate > 0.0:
        raise AbsorbingStateError(
            f"zero scattering rate at k={state.k}, branch={state.branch}")
    return 1.0 / rate


def waiting_time_arrays(k, branch, params):
    """Vectorised mean holding times; zero-rate entries raise."""
    rate = jump_rate(k, branch, params)
    if np.any(rate <= 0.0):
        raise AbsorbingStateError("zero scattering rate in input states")
    return 1.0 / rate


def jump_observable(state, params):
    """Mean sojourn displacement rate omega'(k) * t(k, i) of a visit.

    Odd in k for each branch and heavy-tailed under the stationary law (the
    soft branch diverges like k^-3 as k -> 0 when B != 0, like k^-2 for both
    branches when B = 0).
    """
    return omega_prime(state.k, params) * waiting_time(state, params)


def jump_observable_arrays(k, branch, params):
    return omega_prime(k, params) * waiting_time_arrays(k, branch, params)


def stationary_density(k, branch, params):
    """Density of the reversible law on T x {1,2}: 2 theta_i^2 sin^2(pi k)."""
    k = np.asarray(k, dtype=np.float64)
    s2 = np.sin(math.pi * k) ** 2
    if params.degenerate:
        t1 = t2 = 0.5  # equal weights everywhere (continuous at k=0)
    else:
        t1, t2 = theta_sq(k, params)
    ti = np.where(np.asarray(branch) == 1, t1, t2)
    return 2.0 * ti * s2


def mean_waiting_time(params):
    """Stationary mean holding time, 1 / (2 gamma)."""
    return 0.5 / params.gamma


def tail_exponent(params):
    """Tail index of the jump observable under the stationary law."""
    return 5.0 / 3.0 if not params.degenerate else 1.5


def _tail_level_k(lam, branch, params):
    """Largest k in (0, 1/4] with jump observable >= lam, or None."""

    def psi(k):
        t1, t2 = theta_sq(k, params)
        ti = t1 if branch == 1 else t2
        rate = params.gamma * ti * total_rate(k)
        return omega_prime(k, params) / rate

    if params.degenerate:
        k_guess = (TWO_PI * params.gamma * lam) ** -0.5
    elif (branch == 2) == (params.bfield > 0):
        # soft branch: psi ~ |B| / (4 pi^2 gamma k^3)
        k_guess = (abs(params.bfield)
                   / (4.0 * math.pi ** 2 * params.gamma * lam)) ** (1.0 / 3.0)
    else:
        # stiff branch: psi ~ 1 / (gamma |B| k)
        k_guess = 1.0 / (params.gamma * abs(params.bfield) * lam)
    lo = min(k_guess / 32.0, 1e-4)
    if psi(0.25) >= lam:
        raise ValueError("threshold too small for the tail regime")
    if psi(lo) <= lam:
        return None  # level set is empty at this resolution
    return brentq(lambda k: psi(k) - lam, lo, 0.25, xtol=1e-16, rtol=1e-14)


def tail_mass(lam, params):
    """Stationary mass of {states whose jump observable >= lam}.

    Adaptive quadrature of the stationary density over the k -> 0 sliver
    selected by root-finding on each branch; valid deep in the tail (the
    level sets must be intervals at 0, true once lam is past the interior
    maxima, in practice lam >~ 100).
    """
    if lam <= 0.0:
        raise ValueError("lam must be positive")
    total = 0.0
    for branch in (1, 2):
        kstar = _tail_level_k(lam, branch, params)
        if kstar is None:
            continue
        val, _ = quad(lambda k: stationary_density(k, branch, params),
                      0.0, kstar, epsabs=1e-16, epsrel=1e-12, limit=200)
        total += val
    return total


def tail_plateau(lam, params):
    """lam^alpha * tail mass; approaches a positive constant as lam grows."""
    return lam ** tail_exponent(params) * tail_mass(lam, params)


def torus_nodes(n=2 ** 14):
    """Uniform torus grid (exact trapezoid nodes for periodic integrands)."""
    return -0.5 + np.arange(n) / n


def torus_integral(values):
    """Trapezoid rule on a uniform periodic grid: the plain mean."""
    return float(np.mean(values))
