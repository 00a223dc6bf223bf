"""Random walks in Dirichlet environment."""

from ._rwde import (
    ParameterError,
    ResourceError,
    StructuralError,
    UsageError,
    d_alpha,
    dirichlet_joint_moment,
    experiments,
    h1_cdf,
    hyp2f1,
    kappa,
    kappa_lambda_box,
    kesten_constant,
    lattice_ball_resistance,
    log_mgf,
    rate_function,
    regime,
    return_probabilities,
    run_experiment,
    sample_dirichlet,
    sample_R,
    solomon_speed,
)

__all__ = [
    "ParameterError",
    "ResourceError",
    "StructuralError",
    "UsageError",
    "d_alpha",
    "dirichlet_joint_moment",
    "experiments",
    "h1_cdf",
    "hyp2f1",
    "kappa",
    "kappa_lambda_box",
    "kesten_constant",
    "lattice_ball_resistance",
    "log_mgf",
    "rate_function",
    "regime",
    "return_probabilities",
    "run_experiment",
    "sample_dirichlet",
    "sample_R",
    "solomon_speed",
]
