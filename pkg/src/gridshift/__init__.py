"""Basin-aware grid-shift gradient descent, benchmark objectives, and trace checks."""

from .analysis import (
    RateCheckReport,
    check_gradient_fd,
    detect_ball_entry,
    estimate_lipschitz,
    verify_monotone_descent,
    verify_rate_bound,
)
from .benchmarks import (
    BENCHMARK_NAMES,
    BenchmarkParams,
    ObjectiveHandle,
    benchmark_gradient,
    benchmark_value,
    make_benchmark,
    published_params,
)
from .core import (
    DimensionError,
    EvalCounters,
    HypercubeDomain,
    NonFiniteError,
    RunConfig,
    ScanBudgetError,
    ScanStrategy,
    clamp_to_domain,
    contains,
)
from .limitcheck import WitnessOutcome, WitnessStatus, find_nonzero_witness, h_z
from .optimizer import (
    DivergenceError,
    IterateRecord,
    Termination,
    Trace,
    gd_step,
    run_basin_gd,
    run_multistart_gd,
    run_plain_gd,
)
from .scan import ScanResult, diagonal_points, lattice_points, scan_argmin

__version__ = "0.1.0"
