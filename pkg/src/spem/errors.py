"""Exception hierarchy for the embedding engine.

Validation failures (bad shapes, bad flags, degenerate configuration) raise
subclasses of :class:`ValidationError`; failures of the numerics at runtime
raise subclasses of :class:`RuntimeFailure`.  The CLI maps the former to exit
code 2 and the latter to exit code 3.
"""

from __future__ import annotations


class SpemError(Exception):
    """Base class for all engine errors."""


class ValidationError(SpemError):
    """Input or configuration violates a documented precondition."""


class RuntimeFailure(SpemError):
    """A numeric procedure failed after validation passed."""


# --- graph -----------------------------------------------------------------

class NonFiniteInput(ValidationError):
    """Input matrix contains NaN or Inf entries."""


class SigmaSearchFailed(RuntimeFailure):
    """Bandwidth bisection could not bracket its target."""

    def __init__(self, point: int, message: str = ""):
        self.point = point
        super().__init__(message or f"sigma search failed for point {point}")


class IsolatedVertex(ValidationError):
    """A vertex has zero degree; caller must drop or reconnect it."""


# --- spectral ----------------------------------------------------------------

class NotSymmetric(ValidationError):
    """Matrix violates the symmetry tolerance."""


class ConvergenceFailure(RuntimeFailure):
    """Eigensolver did not converge all requested pairs."""

    def __init__(self, converged: int, requested: int):
        self.converged = converged
        self.requested = requested
        super().__init__(
            f"eigensolver converged {converged} of {requested} requested pairs"
        )


class SubspaceTooLarge(ValidationError):
    """Requested more spectral modes than are available."""


# --- optimizer ---------------------------------------------------------------

class FitDiverged(RuntimeFailure):
    """Similarity-curve least squares did not converge."""

    def __init__(self, last_iterate, message: str):
        self.last_iterate = last_iterate
        super().__init__(message)


class TooLargeForDense(ValidationError):
    """Dense full-sum loss requested above its quadratic-cost guard."""


class NonFiniteUpdate(RuntimeFailure):
    """Optimization produced NaN/Inf coefficients (bad lr or clip)."""

    def __init__(self, stage: int | None, epoch: int):
        self.stage = stage
        self.epoch = epoch
        where = f"epoch {epoch}" if stage is None else f"stage {stage}, epoch {epoch}"
        super().__init__(
            f"non-finite projection update at {where}; "
            "lower the learning rate or tighten grad_clip"
        )


# --- progressive -------------------------------------------------------------

class DegenerateSchedule(ValidationError):
    """Stage schedule collapsed to nothing after deduplication."""


# --- metrics -----------------------------------------------------------------

class KTooLarge(ValidationError):
    """Neighborhood size too large for the rank-based metric."""


class ZeroReference(ValidationError):
    """Reconstruction error is undefined against an all-zero reference."""


class DegenerateDistances(ValidationError):
    """All pairwise distances equal; stress is undefined."""


class GraphTooFragmented(RuntimeFailure):
    """Geodesic graph's largest component covers < 50% of the points."""

    def __init__(self, coverage: float):
        self.coverage = coverage
        super().__init__(
            f"largest connected component covers only {coverage:.1%} of points"
        )


class ShapeMismatch(ValidationError):
    """Arrays that must agree in shape do not."""


# --- explain -----------------------------------------------------------------

class MissingThumbnails(ValidationError):
    """Grid aggregation requested but the data carries no thumbnails."""


# --- datasets ----------------------------------------------------------------

class CenterPlacementFailed(RuntimeFailure):
    """Rejection sampling could not place blob centers far enough apart."""


# --- cli / io ----------------------------------------------------------------

class FormatError(ValidationError):
    """File content violates the documented matrix or artifact format."""


class PortInUse(RuntimeFailure):
    """Requested server port is already bound."""
