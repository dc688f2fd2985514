"""Bivariate spline solver for exterior 2D Helmholtz scattering with a PML."""

from splinepml.bernstein import BFormPoly

__all__ = ["BFormPoly"]
