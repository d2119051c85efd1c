"""Randomized rank-revealing factorizations and their verification suite.

The package centers on a projection-based two-sided triangular factorization
(``A ~ Q L P^T``) computed from a Gaussian sketch, alongside reference
implementations of a randomized SVD, a compressed UTV factorization, pivoted
QR/QLP, and truncated SVD.  Supporting modules provide test-matrix
generators, PGM image I/O, a numerical inequality suite for the
factorization's accuracy guarantees, scikit-learn style transformers, and a
command-line benchmark harness (``pbpqlp --help``).
"""

from .algorithms import (
    QlpFactors,
    RsvdFactors,
    SketchRecord,
    UtvFactors,
    cor_utv,
    pbp_qlp,
    pivoted_qlp,
    r_svd,
    truncated_svd,
)
from .analysis import (
    ALGORITHMS,
    DETERMINISTIC_ALGORITHMS,
    RANDOMIZED_ALGORITHMS,
    error_curve,
    factorize,
    l2_norm_ratio,
    low_rank_approx,
    rank_reveal_report,
    singular_value_estimates,
    subspace_distance,
)
from .bounds import (
    BLOCK12_CHOICES,
    TOLERANCE_SCALE,
    BoundContext,
    BoundEntry,
    BoundReport,
    eval_deterministic_bounds,
    eval_highprob_bounds,
    eval_sv_ratio_bound,
    inequality_tolerance,
    tail_constant,
)
from .estimators import CorUtv, PbpQlp, PivotedQlp, RandomizedSvd, TruncatedSvd
from .exceptions import (
    ContextError,
    ConvergenceError,
    DimensionError,
    MatrixInputError,
    ParameterError,
    PgmFormatError,
    RankDeficiencyWarning,
    ResourceLimitError,
)
from .hansen import HANSEN_NAMES, gen_hansen
from .linalg import (
    QrFactors,
    SvdFactors,
    column_pivoted_qr,
    gaussian_matrix,
    householder_qr,
    orth,
    spectral_norm,
    svd_full,
)
from .matgen import (
    SpectrumSpec,
    gen_decay,
    gen_devils_stairs,
    gen_low_rank_plus_noise,
)
from .pgm import load_pgm, write_pgm

__version__ = "0.1.0"

__all__ = [
    "inequality_tolerance",
    "TOLERANCE_SCALE",
    "BLOCK12_CHOICES",
    "ALGORITHMS",
    "DETERMINISTIC_ALGORITHMS",
    "HANSEN_NAMES",
    "RANDOMIZED_ALGORITHMS",
    "BoundContext",
    "BoundEntry",
    "BoundReport",
    "ContextError",
    "ConvergenceError",
    "CorUtv",
    "DimensionError",
    "MatrixInputError",
    "ParameterError",
    "PbpQlp",
    "PgmFormatError",
    "PivotedQlp",
    "QlpFactors",
    "QrFactors",
    "RandomizedSvd",
    "RankDeficiencyWarning",
    "ResourceLimitError",
    "RsvdFactors",
    "SketchRecord",
    "SpectrumSpec",
    "SvdFactors",
    "TruncatedSvd",
    "UtvFactors",
    "column_pivoted_qr",
    "cor_utv",
    "error_curve",
    "eval_deterministic_bounds",
    "eval_highprob_bounds",
    "eval_sv_ratio_bound",
    "factorize",
    "gaussian_matrix",
    "gen_decay",
    "gen_devils_stairs",
    "gen_hansen",
    "gen_low_rank_plus_noise",
    "householder_qr",
    "l2_norm_ratio",
    "load_pgm",
    "low_rank_approx",
    "orth",
    "pbp_qlp",
    "pivoted_qlp",
    "r_svd",
    "rank_reveal_report",
    "singular_value_estimates",
    "spectral_norm",
    "subspace_distance",
    "svd_full",
    "tail_constant",
    "truncated_svd",
    "write_pgm",
    "__version__",
]
