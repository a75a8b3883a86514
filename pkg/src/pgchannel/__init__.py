"""Poisson-Gaussian hybrid noise model, differential entropies, and the
classical capacity of a unity-envelope channel, validated against a seeded
Monte-Carlo oracle."""

__version__ = "0.1.0"

from .capacity import (
    MODE_NORMALIZED,
    MODE_PAPER_LITERAL,
    CapacityResult,
    OptimizerSpec,
    SweepRow,
    SweepTable,
    channel_capacity,
    mutual_information,
    snr,
    sweep_capacity_vs_sigma,
    sweep_mi_vs_mux,
)
from .errors import (
    DegenerateInput,
    InsufficientCoverage,
    InvalidParams,
    NonConvergent,
    NonFinite,
    OutOfDomain,
    PgChannelError,
    Singularity,
    UnsupportedMode,
)
from .montecarlo import (
    HistogramSpec,
    SampleSpec,
    empirical_entropy,
    ks_distance,
    sample_hybrid,
    substream,
)
from .noise import (
    NoiseParams,
    TabulatedDensity,
    TruncationPolicy,
    gaussian_pdf,
    hybrid_log_pdf,
    hybrid_moments,
    hybrid_pdf,
    moment_by_quadrature,
    noise_entropy,
    poisson_pmf,
    tabulate_noise,
)
from .quadrature import (
    DEFAULT_SPEC,
    DEFAULT_TAIL_MASS,
    Interval,
    QuadratureSpec,
    integrate,
    integrate_batch,
    noise_support,
)
from .signal_model import (
    RabiConfig,
    TransmitEstimate,
    WorkingPoint,
    bloch_angles,
    received_entropy,
    received_mean,
    received_pdf,
    working_point,
)

__all__ = [
    "__version__",
    "MODE_NORMALIZED",
    "MODE_PAPER_LITERAL",
    "CapacityResult",
    "OptimizerSpec",
    "SweepRow",
    "SweepTable",
    "channel_capacity",
    "mutual_information",
    "snr",
    "sweep_capacity_vs_sigma",
    "sweep_mi_vs_mux",
    "DegenerateInput",
    "InsufficientCoverage",
    "InvalidParams",
    "NonConvergent",
    "NonFinite",
    "OutOfDomain",
    "PgChannelError",
    "Singularity",
    "UnsupportedMode",
    "HistogramSpec",
    "SampleSpec",
    "empirical_entropy",
    "ks_distance",
    "sample_hybrid",
    "substream",
    "NoiseParams",
    "TabulatedDensity",
    "TruncationPolicy",
    "gaussian_pdf",
    "hybrid_log_pdf",
    "hybrid_moments",
    "hybrid_pdf",
    "moment_by_quadrature",
    "noise_entropy",
    "poisson_pmf",
    "tabulate_noise",
    "DEFAULT_SPEC",
    "DEFAULT_TAIL_MASS",
    "Interval",
    "QuadratureSpec",
    "integrate",
    "integrate_batch",
    "noise_support",
    "RabiConfig",
    "TransmitEstimate",
    "WorkingPoint",
    "bloch_angles",
    "received_entropy",
    "received_mean",
    "received_pdf",
    "working_point",
]
