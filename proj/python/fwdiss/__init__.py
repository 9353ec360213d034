"""Spectral solver, kernels, profiles and rate checks for the dissipative Fornberg-Whitham equation."""

from ._core import (
    ConfigError,
    Error,
    Frame,
    Grid,
    NumericalError,
    Params,
    W_p,
    apply_semigroup,
    duhamel_selfsim_check,
    gap_exponent,
    gaussian_power_mass,
    heat_rate,
    integrate,
    kernel_gap,
    limit_rate,
    lq_norm,
    moment,
    picard_solve,
    rate_fit,
    sample_kernel,
    symbol,
    theorem_profile,
    w_p,
    w_p_definitional,
)

__all__ = [
    "ConfigError",
    "Error",
    "Frame",
    "Grid",
    "NumericalError",
    "Params",
    "W_p",
    "apply_semigroup",
    "duhamel_selfsim_check",
    "gap_exponent",
    "gaussian_power_mass",
    "heat_rate",
    "integrate",
    "kernel_gap",
    "limit_rate",
    "lq_norm",
    "moment",
    "picard_solve",
    "rate_fit",
    "sample_kernel",
    "symbol",
    "theorem_profile",
    "w_p",
    "w_p_definitional",
]
