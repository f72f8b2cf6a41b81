"""The microscopic ring: exact energy conservation and spectral densities.

The chain state lives in wave-function coordinates where the deterministic
flow is a pure phase and the noise is an exact rotation of bond velocity
differences, so total energy is conserved to rounding no matter the step
size.  A flat thermal spectral density is a fixed point of the noisy
dynamics; a single excited mode stays put when the noise is off.
"""

import numpy as np

from magphon.chain import (deterministic_step, estimate_wigner,
                           init_from_velocity_fields, ring_wavenumbers,
                           run_kinetic_horizon, thermal_state)
from magphon.dispersion import ModelParams
from magphon.rng import RngStream

params = ModelParams(bfield=1.0, gamma=1.0)
root = RngStream(909)

print("== energy conservation through the split integrator ==")
state = thermal_state(1024, params, 0.1, root.substream(0))
e0 = state.energy()
out = run_kinetic_horizon(state, 1.0, 0.01, root.substream(1))
print(f"  1024 sites, 1000 Strang steps: relative energy drift = "
      f"{abs(out.energy() - e0) / e0:.2e}")

print("\n== noise off: spectral density frozen ==")
quiet = ModelParams(1.0, 0.0)
n = 64
x = np.arange(n)
kval = ring_wavenumbers(n)[5]
v1 = np.cos(2 * np.pi * kval * x)
zeros = np.zeros(n)
single = init_from_velocity_fields(v1, zeros, zeros, zeros, quiet, 0.25)
evolved = deterministic_step(single, 7.5)
dens0 = single.spectral_density()
dens1 = evolved.spectral_density()
print(f"  single excited mode: max density change = "
      f"{np.max(np.abs(dens1 - dens0)):.2e}")

print("\n== flat thermal state is stationary under the full dynamics ==")
ensemble = []
for j in range(100):
    st = thermal_state(n, params, 0.25, root.substream(100 + j))
    ensemble.append(run_kinetic_horizon(st, 0.5, 0.05,
                                        root.substream(500 + j)))
est = estimate_wigner(ensemble, shifts=(0, 2))
dens = est.values[0].real / (0.5 * 0.25)     # back to E|psi|^2 units
err = est.stderr[0] / (0.5 * 0.25)
dev = np.abs(dens[:, 1:] - 4.0) / err[:, 1:]  # temperature = 1/eps = 4
print(f"  max |z| of the spectral density against the flat profile: "
      f"{dev.max():.2f}")
print(f"  pairing with the constant test function = epsilon x energy: "
      f"{est.pair_total():.6f}")
off = np.max(np.abs(est.values[1]))
print(f"  off-diagonal Wigner pairing (mode shift 2) magnitude: {off:.4f} "
      "(homogeneous ensemble: small)")
