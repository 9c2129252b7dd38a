"""Kronig-Penney lattice of truncated harmonic-oscillator wells."""

from .model import LatticeConfig

__all__ = ["LatticeConfig"]
__version__ = "0.1.0"
