"""Exception taxonomy shared by the whole package.

Two families, matching the CLI exit-code contract:

* ``InvalidInputError`` (a ``ValueError``): malformed shapes or documents,
  dimension mismatches, out-of-range lengths, and preconditions that can be
  checked directly on the inputs (wrong half-plane, non-contraction V,
  non-unitary U, non-positive moment data).  CLI exit code 1.
* ``NumericalFailureError`` (a ``RuntimeError``): problems that only show up
  while computing -- ill-conditioned normalizations, indecisive divergence
  classification, refusals that depend on a computed determinacy class,
  singular denominators / poles.  CLI exit code 2.
"""


class InvalidInputError(ValueError):
    """Input does not satisfy a documented, directly checkable contract."""


class OutOfRangeError(InvalidInputError):
    """A requested length/index exceeds what the stored data can provide."""


class HalfPlaneError(InvalidInputError):
    """Evaluation point lies in the wrong (or on no) complex half-plane."""


class InvalidMeasureError(InvalidInputError):
    """Step-measure data with a weight that is not positive semidefinite."""


class SingularInputError(InvalidInputError):
    """A matrix required to be positive definite / nonsingular is not.

    Carries the offending smallest eigenvalue when known.
    """

    def __init__(self, message: str, min_eigenvalue: float | None = None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class NumericalFailureError(RuntimeError):
    """A computation failed or its result cannot be trusted."""


class IllConditionedError(NumericalFailureError):
    """A normalization step fell below the positive-definiteness floor.

    ``step`` names the recursion index at which the failure occurred.
    """

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


class RefusedError(NumericalFailureError):
    """Operation refused because a computed precondition does not hold."""


class ClassificationUnavailableError(NumericalFailureError):
    """Deficiency-index sampling was indecisive; no class can be reported."""


class PoleError(NumericalFailureError):
    """Evaluation hit (or got too close to) a pole of the target function."""
