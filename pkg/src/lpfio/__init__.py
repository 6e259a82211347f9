"""Littlewood-Paley decompositions, Besov/Triebel-Lizorkin quasi-norms and
Fourier integral operators on periodic grids."""

from .grid import GridFunction, GridSpec, Spectrum, forward_transform, inverse_transform, lp_quasinorm
from .littlewood_paley import MOLLIFIER, SMOOTHSTEP, BumpProfile, DyadicCutoffFamily, build_cutoffs

__version__ = "0.1.0"
