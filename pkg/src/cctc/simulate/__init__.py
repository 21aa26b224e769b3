"""Benchmark model zoo, comparator methods and the Monte Carlo driver."""
from .models import (
    MODEL_IDS,
    ModelSpec,
    NoiseFamily,
    Pareto,
    Poisson,
    StudentT,
    generate,
    threshold_u_x,
    true_edges,
)
from .benchmark import BenchmarkRow, BenchmarkSettings, Method, run_benchmark
from .comparators import gpd_permutation_test, granger_test, hard_threshold_decision
