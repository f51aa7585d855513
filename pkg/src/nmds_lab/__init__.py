"""Exhaustive finite-geometry engine for caps and near-MDS point sets."""

__version__ = "0.1.0"

from .gf import FiniteField, make_field, gf, extension_embed  # noqa: F401
from .projgeom import ProjectiveSpace, PointSet  # noqa: F401
