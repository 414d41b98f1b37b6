"""Bayesian optimization over combinatorial search spaces.

Gaussian-process surrogate with a per-variable diffusion kernel on a product
of category graphs, slice-sampled hyperparameter posteriors, and expected
improvement maximized by random candidates plus local search.
"""

__version__ = "0.1.0"

from .errors import (
    EnumerationRefusedError,
    GraphboError,
    InvalidVariableError,
    NumericError,
    SearchSpaceExhaustedError,
    VertexBoundsError,
    WcnfParseError,
)
from .graphs import (
    Eigensystem,
    SearchSpace,
    SubGraph,
    Vertex,
    eigensystem,
    laplacian,
    shortest_path_oracle,
)
from .kernel import KernelFactors, gram, kernel_entry, kernel_factors
from .surrogate import (
    Dataset,
    GpParams,
    GpPosterior,
    PredictiveDistribution,
    neg_log_marginal_likelihood,
    predict,
)
from .inference import (
    PriorConfig,
    SamplerConfig,
    SamplerState,
    fit_surrogate,
    log_prior_horseshoe,
    log_prior_mean,
    log_prior_signal_variance,
    slice_sample_univariate,
)
from .acquisition import (
    AcquisitionConfig,
    FactorCache,
    acquisition_value,
    bfls,
    expected_improvement,
    next_vertex,
    spray_vertices,
)
from .benchmarks import Benchmark, benchmark_names, make_benchmark
from .harness import (
    RunConfig,
    Trace,
    TraceRecord,
    emit_summary,
    read_trace,
    run,
    run_combo,
    run_random_search,
    run_simulated_annealing,
    write_trace,
)

__all__ = [
    "EnumerationRefusedError",
    "GraphboError",
    "InvalidVariableError",
    "NumericError",
    "SearchSpaceExhaustedError",
    "VertexBoundsError",
    "WcnfParseError",
    "Eigensystem",
    "SearchSpace",
    "SubGraph",
    "Vertex",
    "eigensystem",
    "laplacian",
    "shortest_path_oracle",
    "KernelFactors",
    "gram",
    "kernel_entry",
    "kernel_factors",
    "Dataset",
    "GpParams",
    "GpPosterior",
    "PredictiveDistribution",
    "neg_log_marginal_likelihood",
    "predict",
    "PriorConfig",
    "SamplerConfig",
    "SamplerState",
    "fit_surrogate",
    "log_prior_horseshoe",
    "log_prior_mean",
    "log_prior_signal_variance",
    "slice_sample_univariate",
    "AcquisitionConfig",
    "FactorCache",
    "acquisition_value",
    "bfls",
    "expected_improvement",
    "next_vertex",
    "spray_vertices",
    "Benchmark",
    "benchmark_names",
    "make_benchmark",
    "RunConfig",
    "Trace",
    "TraceRecord",
    "emit_summary",
    "read_trace",
    "run",
    "run_combo",
    "run_random_search",
    "run_simulated_annealing",
    "write_trace",
    "__version__",
]
