"""Python bindings for the l2ext library."""

from ._l2ext import (
    DenominatorSpec,
    Domain,
    Kappa,
    Objective,
    RModel,
    WeightModel,
    bidisk_min_extension,
    c_of_g,
    check_class_d,
    disk_mass,
    disk_min_extension,
    extension_bound,
    g_delta,
    h_delta_samples,
    is_normalized,
    k_delta,
    normalize,
    optimal_delta,
    reproduce_report,
    run_cli,
)

__all__ = [
    "DenominatorSpec",
    "Domain",
    "Kappa",
    "Objective",
    "RModel",
    "WeightModel",
    "bidisk_min_extension",
    "c_of_g",
    "check_class_d",
    "disk_mass",
    "disk_min_extension",
    "extension_bound",
    "g_delta",
    "h_delta_samples",
    "is_normalized",
    "k_delta",
    "normalize",
    "optimal_delta",
    "reproduce_report",
    "run_cli",
]
