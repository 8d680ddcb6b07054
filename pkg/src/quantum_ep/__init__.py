"""Geometric quantum dynamics on the unitary group.

Modules
-------
hilbert          operators, states, pairings and character checks
integrators      exponential Lie-group integrators and trajectories
schrodinger      gauge-extended Schrodinger and von Neumann flows
fubini_study     Fubini-Study Lagrangian and projective geodesics
momentum_maps    momentum maps, coadjoint action, connections
heisenberg_dirac Heisenberg and Dirac pictures with isotropy gauge
wigner_moyal     discrete Wigner/Weyl transforms and Moyal bracket
hybrid           Heisenberg group, semidirect product, hybrid dynamics
config, cli      JSON configuration and the command-line runner
"""
from .hilbert import (
    CharacterError,
    DensityMatrix,
    DimensionError,
    Operator,
    StateVector,
    anticommutator,
    commutator,
    expectation,
    pairing,
)
from .integrators import TimeGrid, Trajectory

__all__ = [
    "CharacterError",
    "DensityMatrix",
    "DimensionError",
    "Operator",
    "StateVector",
    "TimeGrid",
    "Trajectory",
    "anticommutator",
    "commutator",
    "expectation",
    "pairing",
]
__version__ = "0.1.0"
