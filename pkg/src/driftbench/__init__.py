"""Concept-drift detection on parallel activations of a frozen random network."""
from driftbench.core import Chunk, ParameterError, Rng, ShapeError, Verdict, derive

__version__ = "0.1.0"

__all__ = ["Chunk", "ParameterError", "Rng", "ShapeError", "Verdict", "derive"]
