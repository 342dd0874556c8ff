"""Staggered Dirac fermions on a discretized AdS2 black-hole background."""

from .geometry import LatticeGeometry
from .model import (
    ModelParams,
    PauliString,
    SingleParticleHamiltonian,
    SpinHamiltonian,
    build_single_particle,
    build_spin_hamiltonian,
)

__version__ = "0.1.0"

__all__ = [
    "LatticeGeometry",
    "ModelParams",
    "PauliString",
    "SingleParticleHamiltonian",
    "SpinHamiltonian",
    "build_single_particle",
    "build_spin_hamiltonian",
]
