"""magphon: kinetic Monte Carlo and spectral solvers for anomalous energy
transport in a magnetically coupled harmonic chain.

The package covers three linked layers of the same physics:

* a microscopic ring of charged oscillators in a magnetic field with
  energy-conserving velocity noise, evolved exactly in wave-function
  coordinates (:mod:`magphon.chain`);
* the phonon jump process of its kinetic limit, with closed-form rates and a
  heavy-tailed position functional (:mod:`magphon.dispersion`,
  :mod:`magphon.kinetic`), plus a Feynman-Kac solver for the scaled
  transport equation (:mod:`magphon.boltzmann`);
* the macroscopic fractional-diffusion description and the statistics that
  verify the anomalous exponents (:mod:`magphon.fracdiff`,
  :mod:`magphon.scaling`).
"""

__version__ = "0.1.0"

from .dispersion import ModelParams, PhononState  # noqa: F401
from .rng import RngStream  # noqa: F401
