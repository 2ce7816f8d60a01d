"""Discrete Moreau envelopes and compensated convex transforms on grids."""

__version__ = "0.1.0"

from .grid_field import ScalarField, FrameSpec  # noqa: E402
from .moreau import EnvelopeParams, ConvergenceReport  # noqa: E402

__all__ = ["ScalarField", "FrameSpec", "EnvelopeParams", "ConvergenceReport", "__version__"]
