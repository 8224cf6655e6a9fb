"""Born-machine training on numerical data under interchangeable binary codes."""

from .codes import (
    BinaryCode,
    CodeStats,
    code_stats,
    hamming,
    make_code,
    mgc_decode,
    mgc_encode,
    render_code_table,
    rgc_decode,
    rgc_encode,
    standard_decode,
    standard_encode,
)
from .mmd import KernelConfig, diagnostics, kernel, mmd2, mmd2_exact
from .simulator import (
    CircuitParams,
    CircuitShape,
    born_probabilities,
    build_state,
    init_params,
    sample_shots,
)
from .target import (
    Dataset,
    DiscretizedSpace,
    discretize,
    discretized_target,
    make_space,
    pushforward,
    sample_centered_gaussian,
    sample_gaussian_mixture,
    sample_sawtooth_mixture,
)
from .training import (
    AdamConfig,
    TrainingConfig,
    TrainingRecord,
    adam_step,
    q_score,
    reference_loss,
    shift_gradient,
    train,
)

__all__ = [
    "BinaryCode",
    "CodeStats",
    "code_stats",
    "hamming",
    "make_code",
    "mgc_decode",
    "mgc_encode",
    "render_code_table",
    "rgc_decode",
    "rgc_encode",
    "standard_decode",
    "standard_encode",
    "KernelConfig",
    "diagnostics",
    "kernel",
    "mmd2",
    "mmd2_exact",
    "CircuitParams",
    "CircuitShape",
    "born_probabilities",
    "build_state",
    "init_params",
    "sample_shots",
    "Dataset",
    "DiscretizedSpace",
    "discretize",
    "discretized_target",
    "make_space",
    "pushforward",
    "sample_centered_gaussian",
    "sample_gaussian_mixture",
    "sample_sawtooth_mixture",
    "AdamConfig",
    "TrainingConfig",
    "TrainingRecord",
    "adam_step",
    "q_score",
    "reference_loss",
    "shift_gradient",
    "train",
]

__version__ = "0.1.0"
