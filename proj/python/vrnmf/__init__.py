"""Volume-regularized nonnegative matrix factorization."""

from ._vrnmf import (
    ContractError,
    DegeneracyError,
    DimensionError,
    InfeasibleError,
    IoError,
    UndefinedError,
    VrnmfError,
    __version__,
    eval_objective,
    eval_volume,
    mrsa_matched,
    mrsa_pair,
    null_space_basis,
    project_simplex,
    read_matrix,
    recovery_curve,
    run,
    segmentation_map,
    solve_h,
    spa_init,
    spectral_norm_sq,
    svt,
    synth_generate,
    tune_lambda,
    write_matrix,
)

__all__ = [
    "ContractError",
    "DegeneracyError",
    "DimensionError",
    "InfeasibleError",
    "IoError",
    "UndefinedError",
    "VrnmfError",
    "__version__",
    "eval_objective",
    "eval_volume",
    "mrsa_matched",
    "mrsa_pair",
    "null_space_basis",
    "project_simplex",
    "read_matrix",
    "recovery_curve",
    "run",
    "segmentation_map",
    "solve_h",
    "spa_init",
    "spectral_norm_sq",
    "svt",
    "synth_generate",
    "tune_lambda",
    "write_matrix",
]
