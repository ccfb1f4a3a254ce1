"""Numerical special Kähler and Hessian geometry with exact jet derivatives."""

from skgeom.jets import KERNEL, Jet, jet_eval

__version__ = "0.1.0"

__all__ = ["Jet", "jet_eval", "KERNEL", "__version__"]
