"""Optimal polynomial eigenstate filtering, simulated classically.

The package evaluates minimax filter polynomials of block-encoded Hermitian
matrices on exact statevectors, and uses them to drive two linear-system
solvers whose query ledgers scale near-linearly in the condition number: an
adiabatically seeded filter and a measurement-driven eigenpath traversal. A
Chebyshev matrix-inversion baseline with quadratic scaling and a seeded
experiment harness round out the toolkit.
"""

from .aqc import AqcConfig, evolve, schedule_p, solve_aqc_filtered
from .baseline import InversionPolySpec, build_inversion_poly, solve_qsp_direct
from .blockenc import BlockEncoding, encode, linear_combine, multiply, verify
from .chebpoly import (
    FilterSpec,
    degree_for_accuracy,
    filter_eval,
    minimax_oracle,
    reflection_eval,
)
from .filtering import MeasurementOutcome, apply_filter, projector_error
from .harness import (
    experiment_ell_vs_kappa,
    experiment_fidelity_vs_ell,
    experiment_kappa_scaling,
    gen_instance,
    planted_hermitian,
    planted_tridiag_instance,
)
from .numerics import DenseOperator, StateRegister, fidelity
from .qlsp import (
    QlspInstance,
    eigenpath_length,
    eigenpath_state,
    gap_lower_bound,
    make_hf,
    solution_state,
)
from .report import ExperimentResult, SolverReport
from .storage import StorageError, io_roundtrip, load, save
from .zeno import ZenoParams, solve_zeno, validate_zeno_bounds, zeno_params

__all__ = [
    "AqcConfig",
    "BlockEncoding",
    "DenseOperator",
    "ExperimentResult",
    "FilterSpec",
    "InversionPolySpec",
    "MeasurementOutcome",
    "QlspInstance",
    "SolverReport",
    "StateRegister",
    "StorageError",
    "ZenoParams",
    "apply_filter",
    "build_inversion_poly",
    "degree_for_accuracy",
    "eigenpath_length",
    "eigenpath_state",
    "encode",
    "evolve",
    "experiment_ell_vs_kappa",
    "experiment_fidelity_vs_ell",
    "experiment_kappa_scaling",
    "fidelity",
    "filter_eval",
    "gap_lower_bound",
    "gen_instance",
    "io_roundtrip",
    "linear_combine",
    "load",
    "make_hf",
    "minimax_oracle",
    "multiply",
    "planted_hermitian",
    "planted_tridiag_instance",
    "projector_error",
    "reflection_eval",
    "save",
    "schedule_p",
    "solution_state",
    "solve_aqc_filtered",
    "solve_qsp_direct",
    "solve_zeno",
    "validate_zeno_bounds",
    "verify",
    "zeno_params",
]
