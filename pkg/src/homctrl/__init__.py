"""Dilation-homogeneous finite/fixed-time control with state resets,
applied to global rigid-body attitude tracking in exponential coordinates."""

from .so3 import (
    hat,
    vee,
    exp_so3,
    log_so3,
    left_jacobian,
    inv_left_jacobian,
    d_left_jacobian,
    d_inv_left_jacobian,
    rotated_hat_residual,
    project_so3,
)
from .homnorm import (
    DilationSpec,
    dilate,
    hom_norm,
    hom_norm_gradient,
    homogeneity_residual,
)
from .synthesis import (
    PlantMatrices,
    GainSet,
    DesignReport,
    solve_generator_equations,
    dilation_generator,
    default_free_parameters,
    synthesize_gains,
    validate_design,
    homogeneous_feedback,
)
from .impulsive import (
    JumpSpec,
    JumpEvent,
    SimRecord,
    simulate_impulsive,
    settling_estimate,
    measure_settling,
)
from .attitude import (
    InertiaSpec,
    BodyState,
    TrajectorySpec,
    NoiseSpec,
    ErrorState,
    desired_kinematics,
    error_state,
    jump_check,
    torque,
    simulate_tracking,
    iss_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "hat", "vee", "exp_so3", "log_so3", "left_jacobian", "inv_left_jacobian",
    "d_left_jacobian", "d_inv_left_jacobian", "rotated_hat_residual", "project_so3",
    "DilationSpec", "dilate", "hom_norm", "hom_norm_gradient", "homogeneity_residual",
    "PlantMatrices", "GainSet", "DesignReport", "solve_generator_equations",
    "dilation_generator", "default_free_parameters", "synthesize_gains",
    "validate_design", "homogeneous_feedback",
    "JumpSpec", "JumpEvent", "SimRecord", "simulate_impulsive",
    "settling_estimate", "measure_settling",
    "InertiaSpec", "BodyState", "TrajectorySpec", "NoiseSpec", "ErrorState",
    "desired_kinematics", "error_state", "jump_check", "torque",
    "simulate_tracking", "iss_sweep",
]
