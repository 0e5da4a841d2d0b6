"""Consistency lab: definitional checks of local consistency levels on
extensional binary networks, and the tightness lattice verifier."""

from .enforce import Inconsistent, brute_force_gac, enforce_ac, enforce_pc
from .levels import Level, check_level
from .network import BinaryNetwork, injection_network, permutation_network

__all__ = [
    "BinaryNetwork", "Inconsistent", "Level", "brute_force_gac", "check_level",
    "enforce_ac", "enforce_pc", "injection_network", "permutation_network",
]
