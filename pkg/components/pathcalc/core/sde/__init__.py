"""Pathwise SDEs solved by Picard iteration."""

from .oracles import affine_drift_solution, euler_maruyama, gbm_closed_form
from .picard import (
    PicardReport,
    iterate_picard,
    picard_bound,
    picard_constant,
    picard_step,
    solve_sde,
)
from .spec import (
    PicardSettings,
    PicardState,
    SdeSpec,
    affine_drift,
    constant_diffusion,
    constant_drift,
    linear_diffusion,
    time_driver,
)

__all__ = [
    "PicardReport",
    "PicardSettings",
    "PicardState",
    "SdeSpec",
    "affine_drift",
    "affine_drift_solution",
    "constant_diffusion",
    "constant_drift",
    "euler_maruyama",
    "gbm_closed_form",
    "iterate_picard",
    "linear_diffusion",
    "picard_bound",
    "picard_constant",
    "picard_step",
    "solve_sde",
    "time_driver",
]
