"""Event-driven sampler of the phonon jump process and its position functional.

The chain holds a mode (k, i) for an exponential time with mean
1 / (gamma theta_i^2(k) R(k)) and then jumps to a fresh mode drawn from the
reversible law (jump targets are i.i.d. because the kernel factorises).  The
position functional accumulates omega'(k)/(2 pi) along the trajectory; its
endpoint, rescaled by N^(-3/5) over horizons N t (N^(-2/3) when B = 0),
approaches a symmetric stable law.

Randomness protocol (pinned so the numba kernels, the pure-python reference
path and any parallel schedule agree bit for bit): every path owns one
counter-based stream; per event it consumes, in order, one 32-bit uniform for
the exponential clock, then per proposal one uniform for the wave number and
one for the accept test (acceptance probability sin^2(pi k), i.e. rejection
against the uniform envelope), then one uniform for the branch
(P(branch 1) = theta_1^2(k)).
"""

import math
from dataclasses import dataclass

import numba
import numpy as np
from numba import njit, prange

from .dispersion import PhononState, jump_rate, theta_sq
from .errors import AbsorbingStateError
from .rng import RngCursor, RngStream

TWO_PI = 2.0 * math.pi

_MASK32 = np.uint64(0xFFFFFFFF)
_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint64(0x9E3779B9)
_W1 = np.uint64(0xBB67AE85)


@njit(cache=True, inline="always")
def _philox_block(key, blk):
    c0 = blk & _MASK32
    c1 = (blk >> np.uint64(32)) & _MASK32
    c2 = np.uint64(0)
    c3 = np.uint64(0)
    k0 = key & _MASK32
    k1 = (key >> np.uint64(32)) & _MASK32
    for _ in range(10):
        p0 = _M0 * c0
        p1 = _M1 * c2
        n0 = (p1 >> np.uint64(32)) ^ c1 ^ k0
        n1 = p1 & _MASK32
        n2 = (p0 >> np.uint64(32)) ^ c3 ^ k1
        n3 = p0 & _MASK32
        c0, c1, c2, c3 = n0, n1, n2, n3
        k0 = (k0 + _W0) & _MASK32
        k1 = (k1 + _W1) & _MASK32
    return c0, c1, c2, c3


@njit(cache=True, inline="always")
def _next_u01(key, pos, b0, b1, b2, b3):
    """One 32-bit-granular uniform; threads the block buffer through."""
    lane = pos & np.uint64(3)
    if lane == np.uint64(0):
        b0, b1, b2, b3 = _philox_block(key, pos >> np.uint64(2))
    if lane == np.uint64(0):
        word = b0
    elif lane == np.uint64(1):
        word = b1
    elif lane == np.uint64(2):
        word = b2
    else:
        word = b3
    u = (np.float64(word) + 0.5) * 2.0 ** -32
    return u, pos + np.uint64(1), b0, b1, b2, b3


@njit(cache=True)
def _ctrw_path(key, k0, i0, horizon, bfield, gamma):
    """One trajectory; returns (drift integral, k_end, i_end, n_jumps).

    The drift integral is omega'(k(s))/(2 pi) integrated to the horizon.
    """
    half_b = 0.5 * bfield
    b_quarter_sq = 0.25 * bfield * bfield

    pos = np.uint64(0)
    b0 = b1 = b2 = b3 = np.uint64(0)

    k = k0
    i = i0
    c = math.cos(TWO_PI * k)
    s2 = 0.5 * (1.0 - c)
    sq = math.sqrt(2.0 * (1.0 - c) + b_quarter_sq)
    th1 = (sq + half_b) / (2.0 * sq)
    thi = th1 if i == 1 else 1.0 - th1
    t_mean = 1.0 / (gamma * thi * 8.0 * s2)
    wp = math.sin(TWO_PI * k) / sq

    t_now = 0.0
    w = 0.0
    njumps = 0
    while True:
        u, pos, b0, b1, b2, b3 = _next_u01(key, pos, b0, b1, b2, b3)
        hold = -math.log1p(-u) * t_mean
        done = t_now + hold >= horizon
        dt = (horizon - t_now) if done else hold
        w += wp * dt
        if done:
            break
        t_now += hold
        njumps += 1

        # next wave number: rejection against the uniform envelope
        kk = k
        while True:
            u, pos, b0, b1, b2, b3 = _next_u01(key, pos, b0, b1, b2, b3)
            kk = u - 0.5
            c = math.cos(TWO_PI * kk)
            s2 = 0.5 * (1.0 - c)
            ua, pos, b0, b1, b2, b3 = _next_u01(key, pos, b0, b1, b2, b3)
            if ua < s2:
                break

        ub, pos, b0, b1, b2, b3 = _next_u01(key, pos, b0, b1, b2, b3)
        sq = math.sqrt(2.0 * (1.0 - c) + b_quarter_sq)
        th1 = (sq + half_b) / (2.0 * sq)
        if ub < th1:
            i = 1
            thi = th1
        else:
            i = 2
            thi = 1.0 - th1
        k = kk
        t_mean = 1.0 / (gamma * thi * 8.0 * s2)
        wp = math.sin(TWO_PI * k) / sq

    return w, k, i, njumps


@njit(cache=True, parallel=True)
def _ctrw_ensemble_kernel(keys, k0, i0, horizon, bfield, gamma,
                          out_w, out_k, out_i, out_n):
    for p in prange(keys.size):
        w, k, i, nj = _ctrw_path(keys[p], k0[p], i0[p], horizon, bfield, gamma)
        out_w[p] = w
        out_k[p] = k
        out_i[p] = i
        out_n[p] = nj


@dataclass
class JumpPath:
    """Recorded trajectory: visited modes, holding times, position endpoint.

    ``holds[n]`` is the exponential holding time of ``(ks[n], branches[n])``;
    the final entry is truncated at the horizon.  ``z_final`` includes the
    1/(2 pi) factor of the position functional.
    """

    ks: np.ndarray
    branches: np.ndarray
    holds: np.ndarray
    z_final: float
    t_final: float
    n_jumps: int

    @property
    def final_state(self):
        return PhononState(float(self.ks[-1]), int(self.branches[-1]))


@dataclass
class EndpointEnsemble:
    """Raw per-path results of an ensemble run (unscaled drift integrals)."""

    w: np.ndarray        # omega'/(2 pi) integrated over the horizon
    k_end: np.ndarray
    i_end: np.ndarray
    n_jumps: np.ndarray
    horizon: float


def _as_cursor(rng):
    if isinstance(rng, RngCursor):
        return rng
    if isinstance(rng, RngStream):
        return rng.cursor()
    raise TypeError("expected RngStream or RngCursor")


def scaling_exponent(params):
    """Endpoint scaling exponent: 3/5 for B != 0, 2/3 for B = 0."""
    return 0.6 if not params.degenerate else 2.0 / 3.0


def sample_pi(params, rng, size=None):
    """Draw from the reversible law by exact rejection sampling.

    Wave numbers are proposed uniformly and accepted with probability
    sin^2(pi k); the branch is then 1 with probability theta_1^2(k).
    With ``size`` given, proposals are drawn in whole batches (deterministic,
    but a different stream layout than repeated scalar draws).
    """
    cur = _as_cursor(rng)
    if size is None:
        while True:
            k = float(cur.uniforms32(1)[0]) - 0.5
            acc = math.sin(math.pi * k) ** 2
            if float(cur.uniforms32(1)[0]) < acc:
                break
        t1, _ = theta_sq(k, params)
        branch = 1 if float(cur.uniforms32(1)[0]) < float(t1) else 2
        return PhononState(k, branch)

    out_k = np.empty(size)
    got = 0
    while got < size:
        m = max(2 * (size - got) + 16, 64)
        uk = cur.uniforms32(m) - 0.5
        ua = cur.uniforms32(m)
        acc = uk[ua < np.sin(math.pi * uk) ** 2]
        take = min(acc.size, size - got)
        out_k[got:got + take] = acc[:take]
        got += take
    t1, _ = theta_sq(out_k, params)
    out_i = np.where(cur.uniforms32(size) < t1, 1, 2)
    return out_k, out_i


def step(state, params, rng):
    """One jump: exponential holding time, then an i.i.d. fresh target."""
    cur = _as_cursor(rng)
    t_mean = 1.0 / _rate_checked(state.k, state.branch, params)
    u = float(cur.uniforms32(1)[0])
    hold = -math.log1p(-u) * t_mean
    return hold, sample_pi(params, cur)


def _rate_checked(k, branch, params):
    rate = float(jump_rate(k, branch, params))
    if not rate > 0.0:
        raise AbsorbingStateError(
            f"state (k={k}, branch={branch}) has zero scattering rate")
    return rate


def run_ctrw(start, y0, horizon, params, rng, record=False):
    """Pure-python reference trajectory (bit-compatible with the kernel).

    Returns a :class:`JumpPath`; with ``record`` off, only the endpoint data
    are kept (the path arrays hold just the initial and final state).
    """
    if horizon < 0.0:
        raise ValueError("horizon must be nonnegative")
    _rate_checked(start.k, start.branch, params)
    cur = _as_cursor(rng)

    bfield, gamma = params.bfield, params.gamma
    half_b = 0.5 * bfield
    b_quarter_sq = 0.25 * bfield * bfield

    k, i = start.k, start.branch
    c = math.cos(TWO_PI * k)
    s2 = 0.5 * (1.0 - c)
    sq = math.sqrt(2.0 * (1.0 - c) + b_quarter_sq)
    th1 = (sq + half_b) / (2.0 * sq)
    thi = th1 if i == 1 else 1.0 - th1
    t_mean = 1.0 / (gamma * thi * 8.0 * s2)
    wp = math.sin(TWO_PI * k) / sq

    ks = [k]
    branches = [i]
    holds = []
    t_now = 0.0
    w = 0.0
    njumps = 0
    while True:
        u = float(cur.uniforms32(1)[0])
        hold = -math.log1p(-u) * t_mean
        done = t_now + hold >= horizon
        dt = (horizon - t_now) if done else hold
        w += wp * dt
        holds.append(dt)
        if done:
            break
        t_now += hold
        njumps += 1

        while True:
            kk = float(cur.uniforms32(1)[0]) - 0.5
            c = math.cos(TWO_PI * kk)
            s2 = 0.5 * (1.0 - c)
            if float(cur.uniforms32(1)[0]) < s2:
                break
        ub = float(cur.uniforms32(1)[0])
        sq = math.sqrt(2.0 * (1.0 - c) + b_quarter_sq)
        th1 = (sq + half_b) / (2.0 * sq)
        if ub < th1:
            i, thi = 1, th1
        else:
            i, thi = 2, 1.0 - th1
        k = kk
        t_mean = 1.0 / (gamma * thi * 8.0 * s2)
        wp = math.sin(TWO_PI * k) / sq
        if record:
            ks.append(k)
            branches.append(i)

    if not record:
        ks = [start.k, k]
        branches = [start.branch, i]
        holds = [np.nan, np.nan]
    return JumpPath(np.asarray(ks), np.asarray(branches, dtype=np.int64),
                    np.asarray(holds), y0 + w, horizon, njumps)


def ctrw_endpoint_ensemble(start_k, start_i, horizon, params, rng,
                           n_paths=None, stream_offset=0):
    """Run many independent trajectories to a common horizon (numba, parallel).

    ``start_k`` / ``start_i`` may be scalars (replicated over ``n_paths``) or
    arrays of one start state per path.  Path p consumes the stream
    ``rng.substream(stream_offset + p)``, so results are independent of the
    thread count and of how ensembles are split across calls.
    """
    if np.isscalar(start_k):
        if n_paths is None:
            raise ValueError("n_paths required with scalar start")
        k0 = np.full(n_paths, float(start_k))
        i0 = np.full(n_paths, int(start_i), dtype=np.int64)
    else:
        k0 = np.asarray(start_k, dtype=np.float64)
        i0 = np.asarray(start_i, dtype=np.int64)
        if n_paths is not None and n_paths != k0.size:
            raise ValueError("n_paths disagrees with start arrays")
    if horizon < 0.0:
        raise ValueError("horizon must be nonnegative")
    rate = jump_rate(k0, i0, params)
    if np.any(rate <= 0.0):
        raise AbsorbingStateError("some start states have zero rate")

    keys = rng.substream_keys(k0.size, offset=stream_offset)
    out_w = np.empty(k0.size)
    out_k = np.empty(k0.size)
    out_i = np.empty(k0.size, dtype=np.int64)
    out_n = np.empty(k0.size, dtype=np.int64)
    _ctrw_ensemble_kernel(keys, k0, i0, float(horizon),
                          float(params.bfield), float(params.gamma),
                          out_w, out_k, out_i, out_n)
    return EndpointEnsemble(out_w, out_k, out_i, out_n, float(horizon))


def scaled_endpoint_ensemble(n_scale, t, start, params, rng, n_paths):
    """Scaled endpoints N^(-3/5) Z(N t) for an ensemble from a fixed start.

    Uses N^(-2/3) when B = 0.  The start contributes y0 = 0.
    """
    ens = ctrw_endpoint_ensemble(start.k, start.branch, n_scale * t, params,
                                 rng, n_paths)
    return n_scale ** (-scaling_exponent(params)) * ens.w


def sample_scaled_endpoint(n_scale, t, start, params, rng):
    """Single scaled endpoint (one-path convenience wrapper)."""
    if n_scale < 1.0:
        raise ValueError("scaling parameter must be >= 1")
    return float(scaled_endpoint_ensemble(n_scale, t, start, params, rng, 1)[0])


def set_threads(n):
    """Cap the numba thread pool (affects speed only, never results)."""
    numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))
