"""Second-order extragradient solvers for convex-concave saddle problems."""

from ._core import (
    ConfigError,
    CubicBilinear,
    FiniteSumProblem,
    GlmQuadraticSum,
    Problem,
    QuadraticSaddle,
    cli,
    cubic_bilinear,
    eg_solve,
    glm_quadratic_sum,
    inexact_newton_minmax,
    newton_minmax,
    random_quadratic,
    restricted_gap,
    select_lambda,
    soc_project,
    subsampled_newton_minmax,
)

__all__ = [
    "ConfigError",
    "CubicBilinear",
    "FiniteSumProblem",
    "GlmQuadraticSum",
    "Problem",
    "QuadraticSaddle",
    "cli",
    "cubic_bilinear",
    "eg_solve",
    "glm_quadratic_sum",
    "inexact_newton_minmax",
    "newton_minmax",
    "random_quadratic",
    "restricted_gap",
    "select_lambda",
    "soc_project",
    "subsampled_newton_minmax",
]
