"""Exact Fourier expansions of degree-2 Hermitian modular forms and mod-p congruence checks."""

from .krieg import eisenstein, krieg_expansion, KriegParams
from .lambda2 import HermIndex, parse_gauss
from .number_theory import QuadField
from .qseries import FourierExpansion

__all__ = ["eisenstein", "krieg_expansion", "KriegParams", "HermIndex", "parse_gauss", "QuadField",
           "FourierExpansion"]
__version__ = "0.1.0"
