"""Dirichlet-kernel local linear and Nadaraya-Watson smoothing on the simplex."""

from ._core import (
    SimplexSmoothError,
    a_b_closed_form,
    b_opt_global,
    kernel_weight,
    ll_fit,
    load_dataset,
    loocv_select,
    lscv_select,
    mesh,
    mise_asymptotic,
    nw_estimate,
    predict,
    psi,
    simplex_lattice,
    simulate,
    target_value,
    uniform_points,
)

__all__ = [
    "SimplexSmoothError",
    "a_b_closed_form",
    "b_opt_global",
    "kernel_weight",
    "ll_fit",
    "load_dataset",
    "loocv_select",
    "lscv_select",
    "mesh",
    "mise_asymptotic",
    "nw_estimate",
    "predict",
    "psi",
    "simplex_lattice",
    "simulate",
    "target_value",
    "uniform_points",
]
