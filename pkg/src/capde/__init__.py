"""Computer-assisted existence proofs for semilinear parabolic PDEs."""

from .interval import CIArray, CInterval, IArray, Interval

__version__ = "0.1.0"

__all__ = ["Interval", "IArray", "CIArray", "CInterval", "__version__"]
