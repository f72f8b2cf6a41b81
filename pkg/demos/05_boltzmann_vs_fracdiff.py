"""Two-solver cross-check: kinetic Monte Carlo against fractional diffusion.

The scaled transport equation is solved by Feynman-Kac averaging over jump
trajectories; summed over branches and integrated over wave numbers, its
solution approaches the fractional-diffusion profile with the diffusion
constant taken from the characteristic-function fit.  This demo runs a
reduced version (N = 2000, ~10^5 paths, about two minutes).
"""

import numpy as np

from magphon import fracdiff
from magphon.boltzmann import InitialDatum, endpoint_pool, pool_k_average
from magphon.dispersion import ModelParams, PhononState
from magphon.kinetic import scaled_endpoint_ensemble
from magphon.rng import RngStream
from magphon.scaling import fit_stable_charfn

params = ModelParams(1.0, 1.0)
root = RngStream(777)

print("fitting D from a scaled endpoint ensemble (N = 2000)...")
ens = scaled_endpoint_ensemble(2000.0, 1.0, PhononState(0.2, 1), params,
                               root.substream(0), 40000)
fit = fit_stable_charfn(ens, 1.0)
print(f"  exponent {fit.exponent:.4f}, D = {fit.d_constant:.4f}, "
      f"R^2 = {fit.r_squared:.5f}")

u0 = InitialDatum(y_center=0.0, y_sigma=1.0)
ref0 = fracdiff.from_callable(u0.ubar0, 200.0, 2 ** 14)
ref1 = fracdiff.evolve(ref0, fit.d_constant, 5.0 / 6.0, 1.0)

ys = np.linspace(-3.0, 3.0, 9)
ref = ref1.eval_trig(ys)

print("\nMonte Carlo k-averages at t = 1 (N = 2000, 8000 paths/point):")
ppp = 8000
ks, br, disp, k_end, i_end = endpoint_pool(2000.0, 1.0, ppp * len(ys),
                                           params, root.substream(1))
print(f"  {'y':>5} {'MC':>9} {'stderr':>8} {'reference':>10} {'diff':>9}")
for j, y in enumerate(ys):
    sl = slice(j * ppp, (j + 1) * ppp)
    value, err = pool_k_average(y, u0, disp[sl], k_end[sl], i_end[sl])
    print(f"  {y:+5.2f} {value:9.4f} {err:8.4f} {ref[j]:10.4f} "
          f"{value - ref[j]:+9.4f}")
