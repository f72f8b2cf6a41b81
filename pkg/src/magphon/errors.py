"""Exception types shared across the package."""


class DegenerateModeError(ValueError):
    """Raised when a model function is evaluated at the degenerate mode
    (wave number 0 with zero magnetic field) where the branch weights are
    undefined."""


class AbsorbingStateError(ValueError):
    """Raised when a jump-process operation starts from a state with zero
    scattering rate (wave number 0), which would never leave."""


class PreconditionError(RuntimeError):
    """A statistical precondition failed (too few tail exceedances, empty
    ensembles, noise-floor starved fits, leaking domains...)."""


class NumericalGuardError(RuntimeError):
    """A numerical safety guard tripped (step-count overflow and similar)."""


class ConfigError(ValueError):
    """Bad or inconsistent run configuration."""
