"""Numerical checks for almost complex structures on OT-FKM isoparametric hypersurfaces."""
from . import algebra, calculus, frames, geometry, structures

__all__ = ["algebra", "geometry", "structures", "calculus", "frames"]
__version__ = "0.1.0"
