"""Spectral ground-motion bases and nonlinear response surrogates.

The heavy lifting happens in the compiled extension; this package just
re-exports the public names.
"""

from ._gms import (
    Basis,
    GmsConfigError,
    GmsError,
    Model,
    Suite,
    explained_variance,
    fit,
    intensity_measures,
    load_basis,
    load_model,
    load_suite,
    project,
    r2_score,
    reconstruct,
    sample_weights,
    simulate,
    svd_basis,
    synthetic_suite,
    truncate_rank,
    truncate_variance,
    weight_bounds,
)

__all__ = [
    "Basis",
    "GmsConfigError",
    "GmsError",
    "Model",
    "Suite",
    "explained_variance",
    "fit",
    "intensity_measures",
    "load_basis",
    "load_model",
    "load_suite",
    "project",
    "r2_score",
    "reconstruct",
    "sample_weights",
    "simulate",
    "svd_basis",
    "synthetic_suite",
    "truncate_rank",
    "truncate_variance",
    "weight_bounds",
]

__version__ = "0.1.0"
