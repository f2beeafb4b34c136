"""Conditional DAG structure estimation (C++ core)."""

from ._core import (
    InputError,
    NumericError,
    c_separated,
    d_separated,
    estimate,
    log_marginal_likelihood,
    run_benchmark,
    run_misspec_sweep,
    shd,
    simulate,
)

__version__ = "0.1.0"
