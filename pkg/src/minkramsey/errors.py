"""Exception hierarchy.

Every error raised for bad geometric input or a failed procedure derives
from :class:`DomainError`; the CLI maps it to exit code 1.
"""


class DomainError(Exception):
    """Base class for all domain-level failures."""

    code = "domain_error"

    def to_json(self):
        return {"error": self.code, "message": str(self)}


class InvalidNorm(DomainError):
    code = "invalid_norm"


class NotCentrallySymmetric(InvalidNorm):
    code = "not_centrally_symmetric"


class NotConvex(InvalidNorm):
    code = "not_convex"


class DegenerateSide(InvalidNorm):
    code = "degenerate_side"


class ZeroVector(DomainError):
    code = "zero_vector"


class PreconditionViolated(DomainError):
    code = "precondition_violated"


class LengthMismatch(DomainError):
    code = "length_mismatch"


class NoWitness(DomainError):
    code = "no_witness"


class SamplerExhausted(DomainError):
    code = "sampler_exhausted"


class OutOfRange(DomainError):
    code = "out_of_range"


class CorrespondenceMismatch(DomainError):
    code = "correspondence_mismatch"


class NoAccumulation(DomainError):
    code = "no_accumulation"


class TooLarge(DomainError):
    code = "too_large"


class InfeasibleCore(DomainError):
    code = "infeasible_core"


class TooFewPoints(DomainError):
    code = "too_few_points"


class SegmentTooShort(DomainError):
    code = "segment_too_short"


class Inconclusive(DomainError):
    """Sampling could not settle a segment's colour at the density cap."""

    code = "inconclusive"

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class IterationLimit(DomainError):
    code = "iteration_limit"


class UnknownOracle(DomainError):
    code = "unknown_oracle"


class MalformedInput(DomainError):
    code = "malformed_input"
