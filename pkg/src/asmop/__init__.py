"""Additional-sampling trust-region method for finite-sum multi-objective problems."""

from .baselines import SmgConfig, deterministic_motr, run_smg, smg_step
from .errors import AsmopError, ConfigError, InputError, InvariantError, NumericError
from .front import FrontArchive, FrontConfig, build_front, nondominated_filter
from .marginal import MarginalResult, marginal_subsampled, marginal_true, min_norm_point
from .problems import (
    CostMeter,
    MultiObjectiveProblem,
    eval_component_subsampled,
    make_least_squares_problem,
    make_logistic_problem,
    make_mixed_problem,
    make_quadratic_problem,
    make_synthetic_classification,
    scalarize,
)
from .sampling import SampleState, SamplingConfig
from .solver import IterateRecord, RunTrace, SolverConfig, run

__version__ = "0.1.0"
