"""Gaussian multiplicative chaos and atomic chaos toolkit."""

from ._gmclab import (
    ConfigError,
    __version__,
    atomic_chaos,
    chaos,
    field,
    hill,
    kpz_solve,
    kpz_solve_dual,
    level_increment,
    moment_relation_constant,
    partial_kernel,
    run,
    validate,
    xi,
    xi_bar,
)

__all__ = [
    "ConfigError",
    "__version__",
    "atomic_chaos",
    "chaos",
    "field",
    "hill",
    "kpz_solve",
    "kpz_solve_dual",
    "level_increment",
    "moment_relation_constant",
    "partial_kernel",
    "run",
    "validate",
    "xi",
    "xi_bar",
]
