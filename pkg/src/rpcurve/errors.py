"""Exception types raised across the package.

Every error names the offending item, row, column, or parameter in its
message so callers can report failures without re-deriving context.
"""


class RankingError(Exception):
    """Base class for all package-specific errors."""


class LoadError(RankingError):
    """Base class for table/schema loading and validation failures."""


class MissingCell(LoadError):
    """A row is missing a value for some indicator column."""


class NonNumericCell(LoadError):
    """A cell could not be parsed as a finite number."""


class ConstantColumn(LoadError):
    """An indicator column has fewer than two distinct values."""


class UnknownIndicator(LoadError):
    """Header and orientation schema disagree about indicator names."""


class SchemaError(LoadError):
    """Malformed schema or CSV structure (bad orientation value, duplicate
    or misnamed header fields, wrong field count)."""


class DomainError(RankingError):
    """A curve parameter t lies outside [0, 1]."""


class DegenerateCurve(RankingError):
    """Control points do not describe a usable curve (non-finite
    coordinates, or coincident endpoints where forbidden)."""


class DegenerateChord(RankingError):
    """The chord between the curve endpoints has zero length."""


class NotMonotoneInPair(RankingError):
    """Shape classification requested for a dimension pair in which the
    curve is not monotone."""


class TooFewItems(RankingError):
    """Not enough items for the requested operation."""


class DegenerateParameterSpread(RankingError):
    """All projection parameters coincide; the curve-update step is
    rank-deficient beyond what damping can stabilise."""


class TransformMismatch(RankingError):
    """A table does not match the normalization transform stored with a
    curve (different dimension count or indicator names)."""


class BadWeights(RankingError):
    """Baseline weights are not positive or do not sum to 1."""


class NonPositiveAfterShift(RankingError):
    """Geometric aggregation saw a non-positive value after the documented
    epsilon shift (or raw ratio-scale input that is not strictly positive)."""


class DegenerateEntropy(RankingError):
    """Entropy weighting is undefined because every column carries zero
    information (all entropies equal 1)."""


class LengthMismatch(RankingError):
    """Rankings being compared do not cover the same items."""


class PipelineFailure(RankingError):
    """A ranking pipeline raised during an invariance trial; carries the
    trial context in its message."""
