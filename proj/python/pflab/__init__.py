from ._core import (
    ConfigError,
    fgr,
    fgr_analytic,
    hamiltonian_dense,
    run,
    spectrum,
    validate,
    vanhove_shift,
)

__all__ = [
    "ConfigError",
    "fgr",
    "fgr_analytic",
    "hamiltonian_dense",
    "run",
    "spectrum",
    "validate",
    "vanhove_shift",
]
