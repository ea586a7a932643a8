"""Block Jacobi matrices and the matrix Hamburger moment problem.

Numerical library for regular block Jacobi matrices: matrix orthogonal
polynomials of the first and second kind, moment maps in both directions,
block Hankel positivity, determinacy classification through deficiency
indices, block Gauss quadrature, and the full solution-parametrization
machinery of the completely indeterminate case (entire quartet, extremal
transforms, contraction parametrization, extension spectra).
"""

from .errors import (ClassificationUnavailableError, HalfPlaneError,
                     IllConditionedError, InvalidInputError,
                     InvalidMeasureError, NumericalFailureError,
                     OutOfRangeError, PoleError, RefusedError,
                     SingularInputError)
from .jacobi import (BlockJacobiMatrix, RegularityReport, ch_fixture,
                     ds_fixture, from_scalar_band, ind_fixture, truncate,
                     validate_regular)
from .matkernel import (hermitian_inv_sqrt, hermitian_sqrt, loewner_leq,
                        numerical_rank, spectral_norm)
from .measures import StepMeasure, cumulative, normalize, stieltjes_transform
from .moments import (MomentSequence, PositivityReport, hankel_positive,
                      jacobi_from_moments, moments_from_jacobi,
                      moments_of_measure, moments_oracle)
from .nevanlinna import (QuartetValue, SecondKindBasis, extension_bracket,
                         extension_spectrum, jump_bound, quartet,
                         second_kind, stieltjes_invert, transform_extremal,
                         transform_from_V)
from .polys import MatrixPoly, OrthoBasis, expand, form, generate_first_kind
from .spectral import (DeficiencyReport, Determinacy, DeterminacyClass,
                       KernelSummary, classify, deficiency_indices,
                       estimate_H, gauss_quadrature, growth_diagnostic,
                       kernel_partial)

__version__ = "0.1.0"

__all__ = [
    "BlockJacobiMatrix", "ch_fixture", "classify",
    "ClassificationUnavailableError", "cumulative", "DeficiencyReport",
    "deficiency_indices", "Determinacy", "DeterminacyClass", "ds_fixture",
    "estimate_H", "expand", "extension_bracket", "extension_spectrum",
    "form", "from_scalar_band", "gauss_quadrature", "generate_first_kind",
    "growth_diagnostic", "HalfPlaneError", "hankel_positive",
    "hermitian_inv_sqrt", "hermitian_sqrt", "IllConditionedError",
    "ind_fixture", "InvalidInputError", "InvalidMeasureError",
    "jacobi_from_moments", "jump_bound", "kernel_partial", "KernelSummary",
    "loewner_leq", "MatrixPoly", "MomentSequence", "moments_from_jacobi",
    "moments_of_measure", "moments_oracle", "normalize",
    "NumericalFailureError", "numerical_rank", "OrthoBasis",
    "OutOfRangeError", "PoleError", "PositivityReport", "quartet",
    "QuartetValue", "RefusedError", "RegularityReport", "second_kind",
    "SecondKindBasis", "SingularInputError", "spectral_norm", "StepMeasure",
    "stieltjes_invert", "stieltjes_transform", "transform_extremal",
    "transform_from_V", "truncate", "validate_regular",
]
