"""Dual-variational solver for -Δu - u = Q|u|^{p-2}u on a periodic box."""

from ._core import (
    Context,
    GridSpec,
    HelmdualError,
    default_config,
    farfield_amplitude,
    find_critical_point,
    fundamental_solution_psi,
    multistart_search,
    normalize_config,
    quick_checks,
    read_field,
    resolvent_apply,
    run_experiment,
    shell_gap,
    write_field,
)

__all__ = [
    "Context",
    "GridSpec",
    "HelmdualError",
    "default_config",
    "farfield_amplitude",
    "find_critical_point",
    "fundamental_solution_psi",
    "multistart_search",
    "normalize_config",
    "quick_checks",
    "read_field",
    "resolvent_apply",
    "run_experiment",
    "shell_gap",
    "write_field",
]
