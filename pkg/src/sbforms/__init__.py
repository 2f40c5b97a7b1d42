"""Super automorphic forms on the complex super unit ball: Möbius group,
cusp Fourier expansion and weight-threshold L^s integrability."""

__version__ = "0.1.0"

from .domain import BoundaryError, DomainError, PoleError, Realization, Region
from .fourier import CuspData, FourierMode
from .grassmann import GrassmannVector, MultiIndex
from .group import GroupElement
from .satake import GrowthProfile, Verdict
from .superfunc import SuperFunction

__all__ = [
    "BoundaryError",
    "CuspData",
    "DomainError",
    "FourierMode",
    "GrassmannVector",
    "GroupElement",
    "GrowthProfile",
    "MultiIndex",
    "PoleError",
    "Realization",
    "Region",
    "SuperFunction",
    "Verdict",
    "__version__",
]
