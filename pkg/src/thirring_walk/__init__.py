"""Two-particle Thirring quantum walk."""

from .core import WalkParams, principal_arccos, reduce_to_zone

__version__ = "0.1.0"

__all__ = ["WalkParams", "principal_arccos", "reduce_to_zone", "__version__"]
