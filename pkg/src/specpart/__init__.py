"""Spectral partitions, nodal domains and Aharonov-Bohm operators on planar grids."""

from .errors import ConfigError, ConvergenceError, InvariantError, ResolutionError, SpecpartError
from .geometry import DISK1, HEXA1, SQ1, T1, DomainSpec, GridMask, rasterize
from .eigen import assemble_dirichlet_laplacian, groundstate_energy, lowest_eigenpairs
from .kernels import BACKEND
from .partition import Partition, energy, optimize_minimal_partition
from .report import BoundReport

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BoundReport", "ConfigError", "ConvergenceError", "DISK1", "DomainSpec", "GridMask",
    "HEXA1", "InvariantError", "Partition", "ResolutionError", "SQ1", "SpecpartError", "T1",
    "assemble_dirichlet_laplacian", "energy", "groundstate_energy", "lowest_eigenpairs",
    "optimize_minimal_partition", "rasterize",
]
