"""Checkpoint merging with Bayesian-optimized merge weights.

The hot numeric kernels live in ``ckptmerge.kernels``; set
``CKPTMERGE_DISABLE_NUMBA=1`` to use the pure-numpy implementations.
"""

__version__ = "0.1.0"

from .acquisition import AcqConfig, HedgeState, expected_improvement, hedge_weights, probability_of_improvement, ucb
from .baselines import BaselineConfig, greedy_search, grid_search, random_search
from .bayesopt import OptConfig, OptResult, SearchBounds, optimize, optimize_merge
from .checkpoint import Checkpoint, CompatReport, load_checkpoint, save_checkpoint, validate_compat
from .errors import *  # noqa: F401,F403
from .gp import GPModel, KernelParams, KernelPolicy, Observation, gp_fit, gp_posterior, posterior
from .merge import greedy_soup, pairwise_merge, soup, uniform_soup

__all__ = [
    "AcqConfig",
    "BaselineConfig",
    "Checkpoint",
    "CompatReport",
    "GPModel",
    "HedgeState",
    "KernelParams",
    "KernelPolicy",
    "Observation",
    "OptConfig",
    "OptResult",
    "SearchBounds",
    "expected_improvement",
    "gp_fit",
    "gp_posterior",
    "greedy_search",
    "greedy_soup",
    "grid_search",
    "hedge_weights",
    "load_checkpoint",
    "optimize",
    "optimize_merge",
    "pairwise_merge",
    "posterior",
    "probability_of_improvement",
    "random_search",
    "save_checkpoint",
    "soup",
    "ucb",
    "uniform_soup",
    "validate_compat",
]
