# Copyright The holofredholm Authors
# SPDX-License-Identifier: Apache-2.0
"""Galerkin eigenvalue approximation for holomorphic Fredholm operator functions."""

from ._core import (
    Contour,
    Eigenpair,
    SolverOptions,
    build_model,
    convergence_study,
    fit_order,
    list_models,
    min_max_gsv,
    solve,
)

__all__ = [
    "Contour",
    "Eigenpair",
    "SolverOptions",
    "build_model",
    "convergence_study",
    "fit_order",
    "list_models",
    "min_max_gsv",
    "solve",
]
