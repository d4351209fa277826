"""Landau-de Gennes Q-tensor solver (stabilized exponential SAV schemes).

Tensor fields are numpy arrays of shape (components, [nz,] ny, nx) holding
the unique entries Q_11, Q_12, ... with x varying fastest.
"""

from ._qtflow import (
    BlowUpError,
    ConfigError,
    Integrator,
    InvariantViolation,
    IoError,
    ModelParams,
    SolverError,
    bulk_energy,
    convergence_space,
    convergence_time,
    default_c_star,
    eigen_gap,
    elastic_energy,
    eta_bound,
    kappa_min,
    mbp_tau_max,
    preset_field,
    presets,
    random_field,
    run,
    sup_norm,
    write_snapshot,
)

SCHEMES = ("sesav1", "sesav2", "mbp_sesav1", "mbp_sesav2")


def run_file(path, overrides=()):
    with open(path, encoding="utf-8") as fh:
        return run(fh.read(), list(overrides))


__all__ = [name for name in dir() if not name.startswith("_")]
