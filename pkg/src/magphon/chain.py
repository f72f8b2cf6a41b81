"""Microscopic simulator of the charged chain on a finite ring.

The state is kept in wave-function coordinates: two complex fields
psi_hat[i](k_j) over the ring modes k_j = j/n in [-1/2, 1/2).  The
deterministic flow (harmonic forces plus magnetic coupling) is an exact
per-mode phase rotation exp(-i omega_i(k) dt); the energy-conserving noise
rotates the velocity difference of each bond by a Brownian angle, applied in
even/odd sublattice sweeps.  A Strang split composes the two exact flows, so
total energy is conserved to rounding regardless of dt.

Also hosts the collision operator of the kinetic limit (quadrature form and
generator matrix) and Wigner/spectral-density estimators for ensembles.
"""

import math
from dataclasses import dataclass

import numpy as np

from .dispersion import ModelParams, kernel_r, theta_sq
from .errors import NumericalGuardError
from .rng import RngStream

TWO_PI = 2.0 * math.pi


def ring_wavenumbers(n_sites):
    """Ring modes j/n mapped to [-1/2, 1/2) in FFT storage order."""
    return np.fft.fftfreq(n_sites)


def _grid_dispersion(n_sites, params):
    """Per-mode frequencies and branch weights with continuous k=0 limits.

    Returns (omega_1, omega_2, theta_1, theta_2) arrays over the ring modes.
    The k=0 entries take the limit values ((1,0) for B>0, (0,1) for B<0,
    (1/sqrt2, 1/sqrt2) for B=0), which is what the wave-function
    construction needs there.
    """
    k = ring_wavenumbers(n_sites)
    ah = 4.0 * np.sin(math.pi * k) ** 2
    s = np.sqrt(ah + 0.25 * params.bfield ** 2)
    half_b = 0.5 * params.bfield
    if params.bfield > 0.0:
        w1 = s + half_b
        w2 = ah / (s + half_b)
        tsq2 = ah / (2.0 * s * (s + half_b))
        tsq1 = 1.0 - tsq2
    elif params.bfield < 0.0:
        w2 = s - half_b
        w1 = ah / (s - half_b)
        tsq1 = ah / (2.0 * s * (s - half_b))
        tsq2 = 1.0 - tsq1
    else:
        w1 = s
        w2 = s.copy()
        tsq1 = np.full(n_sites, 0.5)
        tsq2 = np.full(n_sites, 0.5)
    return w1, w2, np.sqrt(tsq1), np.sqrt(tsq2)


@dataclass
class ChainState:
    """Wave-function field of the ring: complex psi_hat of shape (2, n)."""

    psi_hat: np.ndarray
    params: ModelParams
    epsilon: float

    def __post_init__(self):
        self.psi_hat = np.asarray(self.psi_hat, dtype=np.complex128)
        if self.psi_hat.ndim != 2 or self.psi_hat.shape[0] != 2:
            raise ValueError("psi_hat must have shape (2, n_sites)")
        n = self.psi_hat.shape[1]
        if n < 4 or (n & (n - 1)) != 0:
            raise ValueError("n_sites must be a power of two >= 4")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must be in (0, 1)")

    @property
    def n_sites(self):
        return self.psi_hat.shape[1]

    def energy(self):
        """Total energy (1/2) (1/n) sum |psi_hat|^2."""
        return float(0.5 * np.sum(np.abs(self.psi_hat) ** 2)
                     / self.n_sites)

    def spectral_density(self):
        """|psi_hat_i(k)|^2 per branch and mode (no epsilon factor)."""
        return np.abs(self.psi_hat) ** 2

    def copy(self):
        return ChainState(self.psi_hat.copy(), self.params, self.epsilon)


def init_from_velocity_fields(v1, v2, q1, q2, params, epsilon):
    """Build the wave-function state from real velocity/displacement fields.

    The zero modes of q enter only through omega * q_hat combinations, which
    vanish at k = 0; information in the raw q zero modes is not carried by
    the state (see :func:`reconstruct_fields`).
    """
    fields = [np.asarray(f, dtype=np.float64) for f in (v1, v2, q1, q2)]
    n = fields[0].size
    if any(f.shape != (n,) for f in fields):
        raise ValueError("field length mismatch")
    v1h, v2h, q1h, q2h = (np.fft.fft(f) for f in fields)
    w1, w2, th1, th2 = _grid_dispersion(n, params)
    psi1 = th1 * (v1h - 1j * w2 * q1h + 1j * v2h + w2 * q2h)
    psi2 = th2 * (v1h - 1j * w1 * q1h - 1j * v2h - w1 * q2h)
    return ChainState(np.stack([psi1, psi2]), params, epsilon)


def _reconstruct_hats(state):
    """Fourier fields (v1_hat, v2_hat, q1_hat, q2_hat) from the state.

    The q zero modes are not represented in psi_hat; they are filled with
    the values slaved to the velocity zero modes (-v2_hat(0)/B, v1_hat(0)/B
    for B != 0, zero for B = 0), the unique choice that makes
    init -> reconstruct the identity.
    """
    n = state.n_sites
    params = state.params
    w1, w2, th1, th2 = _grid_dispersion(n, params)
    p1 = state.psi_hat[0]
    p2 = state.psi_hat[1]
    p1r = np.conj(p1[_neg_index(n)])
    p2r = np.conj(p2[_neg_index(n)])

    v1h = 0.5 * th1 * (p1 + p1r) + 0.5 * th2 * (p2 + p2r)
    v2h = -0.5j * th1 * (p1 - p1r) + 0.5j * th2 * (p2 - p2r)

    with np.errstate(divide="ignore", invalid="ignore"):
        c1 = np.where(w1 > 0.0, th1 / np.maximum(w1, 1e-300), 0.0)
        c2 = np.where(w2 > 0.0, th2 / np.maximum(w2, 1e-300), 0.0)
    q1h = 0.5j * c1 * (p1 - p1r) + 0.5j * c2 * (p2 - p2r)
    q2h = 0.5 * c1 * (p1 + p1r) - 0.5 * c2 * (p2 + p2r)
    if params.bfield != 0.0:
        q1h[0] = -v2h[0] / params.bfield
        q2h[0] = v1h[0] / params.bfield
    else:
        q1h[0] = 0.0
        q2h[0] = 0.0
    return v1h, v2h, q1h, q2h


def _neg_index(n):
    return (-np.arange(n)) % n


def reconstruct_fields(state):
    """Real-space (v1, v2, q1, q2); imaginary residue must be rounding."""
    hats = _reconstruct_hats(state)
    out = []
    for h in hats:
        f = np.fft.ifft(h)
        scale = max(float(np.max(np.abs(f))), 1e-30)
        if float(np.max(np.abs(f.imag))) > 1e-9 * scale:
            raise NumericalGuardError("reconstructed field is not real")
        out.append(f.real.copy())
    return tuple(out)


def deterministic_step(state, dt):
    """Exact harmonic + magnetic flow: per-mode phase exp(-i omega_i dt)."""
    if dt < 0.0:
        raise ValueError("dt must be nonnegative")
    w1, w2, _, _ = _grid_dispersion(state.n_sites, state.params)
    phase1 = np.exp(-1j * w1 * dt)
    phase2 = np.exp(-1j * w2 * dt)
    return ChainState(np.stack([state.psi_hat[0] * phase1,
                                state.psi_hat[1] * phase2]),
                      state.params, state.epsilon)


def rotate_bonds(v1, v2, angles_even, angles_odd):
    """Exact bond noise on velocity fields (batched over leading axes).

    For each bond (x, x+1) the difference of the two-component velocities is
    rotated by the bond angle while the sum is kept, first over the even
    sublattice, then the odd one (wrapping bond included).  Kinetic energy
    is invariant bond by bond.
    """
    v1 = np.array(v1, dtype=np.float64, copy=True)
    v2 = np.array(v2, dtype=np.float64, copy=True)
    n = v1.shape[-1]
    for parity, angles in ((0, angles_even), (1, angles_odd)):
        left = np.arange(parity, n, 2)
        right = (left + 1) % n
        d1 = v1[..., right] - v1[..., left]
        d2 = v2[..., right] - v2[..., left]
        s1 = v1[..., right] + v1[..., left]
        s2 = v2[..., right] + v2[..., left]
        ca = np.cos(angles)
        sa = np.sin(angles)
        d1n = ca * d1 + sa * d2
        d2n = -sa * d1 + ca * d2
        v1[..., left] = 0.5 * (s1 - d1n)
        v1[..., right] = 0.5 * (s1 + d1n)
        v2[..., left] = 0.5 * (s2 - d2n)
        v2[..., right] = 0.5 * (s2 + d2n)
    return v1, v2


def noise_step(state, dt, rng):
    """Energy-conserving stochastic velocity noise over one time step.

    Velocities are reconstructed, every bond difference is rotated by
    2 sqrt(epsilon gamma) dW with dW ~ N(0, dt), and the state is rebuilt
    with the displacement field untouched.  Stream consumption: n/2 normals
    for the even bonds then n/2 for the odd bonds.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    cur = rng.cursor() if isinstance(rng, RngStream) else rng
    n = state.n_sites
    v1h, v2h, q1h, q2h = _reconstruct_hats(state)
    v1 = np.fft.ifft(v1h).real
    v2 = np.fft.ifft(v2h).real
    amp = 2.0 * math.sqrt(state.epsilon * state.params.gamma * dt)
    ang_even = amp * cur.normals(n // 2)
    ang_odd = amp * cur.normals(n // 2)
    v1, v2 = rotate_bonds(v1, v2, ang_even, ang_odd)
    v1h = np.fft.fft(v1)
    v2h = np.fft.fft(v2)
    w1, w2, th1, th2 = _grid_dispersion(n, state.params)
    psi1 = th1 * (v1h - 1j * w2 * q1h + 1j * v2h + w2 * q2h)
    psi2 = th2 * (v1h - 1j * w1 * q1h - 1j * v2h - w1 * q2h)
    return ChainState(np.stack([psi1, psi2]), state.params, state.epsilon)


def run_kinetic_horizon(state, t_macro, dt, rng, callback=None):
    """Evolve to microscopic time t_macro / epsilon by Strang steps.

    Each step is half a deterministic phase flow, one noise step, half a
    phase flow; with gamma = 0 the noise step is skipped entirely (the flow
    is then exact and consumes no randomness).  ``callback(step, state)``
    runs after every full step when given.
    """
    if t_macro < 0.0:
        raise ValueError("t_macro must be nonnegative")
    if t_macro == 0.0:
        return state.copy()
    t_micro = t_macro / state.epsilon
    n_steps = int(round(t_micro / dt))
    if n_steps > 10 ** 9:
        raise NumericalGuardError(
            "more than 1e9 steps requested; increase dt or epsilon")
    if n_steps < 1 or abs(n_steps * dt - t_micro) > 1e-9 * max(t_micro, 1.0):
        raise ValueError("dt must divide t_macro/epsilon into whole steps")
    cur = rng.cursor() if isinstance(rng, RngStream) else rng
    noisy = state.params.gamma > 0.0
    cur_state = state
    for step_idx in range(n_steps):
        cur_state = deterministic_step(cur_state, 0.5 * dt)
        if noisy:
            cur_state = noise_step(cur_state, dt, cur)
        cur_state = deterministic_step(cur_state, 0.5 * dt)
        if callback is not None:
            callback(step_idx, cur_state)
    return cur_state


def thermal_state(n_sites, params, epsilon, rng, temperature=None):
    """Flat thermal-like state: i.i.d. complex Gaussian modes.

    Each mode of each branch has mean square ``temperature``; the default
    1/epsilon keeps epsilon times the energy bounded uniformly in epsilon.
    """
    if temperature is None:
        temperature = 1.0 / epsilon
    cur = rng.cursor() if isinstance(rng, RngStream) else rng
    scale = math.sqrt(0.5 * temperature)
    re = cur.normals(2 * n_sites)
    im = cur.normals(2 * n_sites)
    psi = scale * (re + 1j * im).reshape(2, n_sites)
    # k=0 carries fewer physical degrees of freedom: the soft branch has
    # none there (B != 0), and for B = 0 the two branches are conjugate.
    if params.bfield > 0.0:
        psi[1, 0] = 0.0
    elif params.bfield < 0.0:
        psi[0, 0] = 0.0
    else:
        psi[1, 0] = np.conj(psi[0, 0])
    return ChainState(psi, params, epsilon)


@dataclass
class WignerEstimate:
    """Ensemble-averaged Wigner pairings on the ring.

    ``values[s, i, j]`` estimates (eps/2) E[conj(psi_i(k_j - m/n))
    psi_i(k_j + m/n)] for mode shift m = shifts[s]; the zero shift is the
    spectral energy density.  ``p_values`` are the position frequencies
    2 m / (eps n) realised by each shift.
    """

    shifts: np.ndarray
    p_values: np.ndarray
    values: np.ndarray
    stderr: np.ndarray
    epsilon: float
    n_ensemble: int

    def pair_total(self):
        """Pairing with the constant test function: epsilon times energy."""
        dens = self.values[list(self.shifts).index(0)]
        return float(np.sum(dens.real) / dens.shape[1])


def estimate_wigner(states, shifts=(0,)):
    """Wigner pairings averaged over an ensemble of chain states.

    ``states`` is a nonempty sequence of :class:`ChainState` on a common
    grid; ``shifts`` are integer mode shifts m (position frequency
    p = 2 m / (eps n)); non-integer or out-of-range shifts are rejected.
    """
    states = list(states)
    if not states:
        raise ValueError("empty ensemble")
    n = states[0].n_sites
    eps = states[0].epsilon
    shifts = np.asarray(shifts)
    if shifts.dtype.kind not in "iu":
        raise ValueError("mode shifts must be integers")
    if np.any(np.abs(shifts) > n // 2):
        raise ValueError("mode shift not representable on this ring")
    m_ens = len(states)
    acc = np.zeros((len(shifts), 2, n), dtype=np.complex128)
    acc2 = np.zeros((len(shifts), 2, n))
    for st in states:
        if st.n_sites != n or st.epsilon != eps:
            raise ValueError("ensemble states live on different grids")
        for s_idx, m in enumerate(shifts):
            minus = np.roll(st.psi_hat, int(m), axis=1)
            plus = np.roll(st.psi_hat, -int(m), axis=1)
            w = 0.5 * eps * np.conj(minus) * plus
            acc[s_idx] += w
            acc2[s_idx] += np.abs(w) ** 2
    mean = acc / m_ens
    var = np.maximum(acc2 / m_ens - np.abs(mean) ** 2, 0.0)
    stderr = np.sqrt(var / max(m_ens - 1, 1))
    p_vals = 2.0 * shifts / (eps * n)
    return WignerEstimate(shifts, p_vals, mean, stderr, eps, m_ens)


def collision_operator_apply(values, k_nodes, params):
    """Collision operator applied by quadrature on a uniform k-grid.

    ``values`` has shape (2, m): a function on branches x wave numbers.
    Constants are annihilated exactly (discrete detailed balance is built
    in).  Requires at least 64 nodes.
    """
    k = np.asarray(k_nodes, dtype=np.float64)
    vals = np.asarray(values, dtype=np.float64)
    m = k.size
    if m < 64:
        raise ValueError("need at least 64 quadrature nodes")
    if vals.shape != (2, m):
        raise ValueError("values must have shape (2, len(k_nodes))")
    spacing = np.diff(np.sort(k))
    if not np.allclose(spacing, spacing[0], rtol=1e-9, atol=1e-12):
        raise ValueError("k grid must be uniform")
    if params.degenerate and np.any(k == 0.0):
        t1 = np.full(m, 0.5)
        t2 = np.full(m, 0.5)
    else:
        t1, t2 = theta_sq(k, params)
    tsq = np.stack([t1, t2])
    r0 = 4.0 * np.sin(math.pi * k) ** 2  # kernel factor, R = r0(k) r0(k')
    gain = float(np.sum(r0 * (tsq * vals).sum(axis=0)) / m)
    loss = float(np.sum(r0 * tsq.sum(axis=0)) / m)
    return tsq * r0 * (gain - vals * loss)


def jump_generator_matrix(k_nodes, params):
    """Backward generator of the jump chain on the discrete (branch, k) grid.

    Flat index = (branch - 1) * m + node.  Row sums are zero; off-diagonal
    entries are gamma theta_i^2(k) R(k, k') theta_j^2(k') / m.
    """
    k = np.asarray(k_nodes, dtype=np.float64)
    m = k.size
    t1, t2 = theta_sq(k, params)
    tsq = np.concatenate([t1, t2])
    kk = np.concatenate([k, k])
    kern = kernel_r(kk[:, None], kk[None, :])
    q = params.gamma * tsq[:, None] * kern * tsq[None, :] / m
    np.fill_diagonal(q, np.diag(q) - q.sum(axis=1))
    return q
