"""Quantum turbo code simulator and EXIT-chart design workbench."""

__version__ = "0.1.0"

from .channel import DepolarizingChannel, hashing_bound
from .interleaver import QuantumInterleaver
from .pauli import SeedTransform, random_symplectic
from .qcc import CodeSpec, SyndromeSequence, distance_spectrum, siso_decode
from .registry import Registry

__all__ = [
    "CodeSpec",
    "DepolarizingChannel",
    "QuantumInterleaver",
    "Registry",
    "SeedTransform",
    "SyndromeSequence",
    "distance_spectrum",
    "hashing_bound",
    "random_symplectic",
    "siso_decode",
]
