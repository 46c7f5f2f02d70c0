"""Numerical verification of calibrated subbundle constructions in explicit
special-holonomy metrics: the Calabi-Yau structure on the cotangent bundle
of the sphere, and the cross-product structures on the anti-self-dual
2-form bundle and the negative spinor bundle over the 4-sphere.
"""

from ._backend import KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]
