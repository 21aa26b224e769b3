"""Compound causal tail coefficients for extremes in multivariate time series."""
from .bootstrap import BootstrapConfig, BootstrapResult, mbb_test, test_both_directions, time_shift
from .ctc import (
    CtcEstimate,
    GpdFit,
    Variant,
    compound_ctc,
    conditional_compound_ctc,
    gpd_ctc,
    gpd_fit,
    max_ctc,
    multivariate_compound_ctc,
)
from .delay import LagProfile, cross_extremogram, pccf, select_delay
from .impact import ImpactParams, evaluate, evaluate_log_domain, impact, normalize
from .series import EcdfTable, Series, ecdf_build, kth_largest
from .weights import DeConfig, optimize_weights, softmax

__version__ = "0.1.0"
