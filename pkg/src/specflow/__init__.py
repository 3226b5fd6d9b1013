"""Spectral flow for paths of Hermitian matrices.

The package computes the spectral flow of a continuous path of Hermitian
matrices by several independent routes (spectral-projection partitions,
eigenvalue tracking, crossing forms and the Morse-index identity) and keeps
them honest against each other.
"""

from .crossings import (
    Crossing,
    CrossingOptions,
    Inertia,
    crossing_form,
    find_crossings,
    regularity_report,
    regularize,
    sfl_crossings,
)
from .engine import (
    PartitionCertificate,
    SflOptions,
    SflResult,
    build_partition,
    certify,
    homotopy_invariance_check,
    sfl_morse_oracle,
    sfl_partition,
    sfl_tracking,
    verify_certificate,
)
from .errors import SpecflowError
from .hermitian import (
    HermitianOperator,
    Spectrum,
    UnitaryMatrix,
    cayley,
    delta_distance,
    eigh,
    gap_distance,
    inverse_cayley,
    norm_distance,
    resolvent,
    resolvent_series,
    riesz_distance,
    riesz_map,
    spectrum,
)
from .paths import OperatorPath, concatenate, constant_path, reverse, sampled_path
from .projections import ContourDescriptor, SpectralProjection, contour_projection, eigen_projection

__version__ = "0.1.0"

__all__ = [
    "ContourDescriptor",
    "Crossing",
    "CrossingOptions",
    "HermitianOperator",
    "Inertia",
    "OperatorPath",
    "PartitionCertificate",
    "SflOptions",
    "SflResult",
    "SpecflowError",
    "SpectralProjection",
    "Spectrum",
    "UnitaryMatrix",
    "build_partition",
    "cayley",
    "certify",
    "concatenate",
    "constant_path",
    "contour_projection",
    "crossing_form",
    "delta_distance",
    "eigen_projection",
    "eigh",
    "find_crossings",
    "gap_distance",
    "homotopy_invariance_check",
    "inverse_cayley",
    "norm_distance",
    "regularity_report",
    "regularize",
    "resolvent",
    "resolvent_series",
    "reverse",
    "riesz_distance",
    "riesz_map",
    "sampled_path",
    "sfl_crossings",
    "sfl_morse_oracle",
    "sfl_partition",
    "sfl_tracking",
    "spectrum",
    "verify_certificate",
]
