"""Spin-nematic squeezing and quantum Fisher information in arrays of
dipole-coupled three-level atoms.

Subpackages: algebra (SU(3) generator basis and embedded spin manifolds),
lattice (geometries, couplings, product states), exact (permutation-
symmetric and full-space propagation), dtwa (discrete truncated Wigner
sampling and mean-field flow), metrology (squeezing / Fisher extraction),
experiments (sweeps, fits, persistence), cli (command-line front end).
"""

__version__ = "0.1.0"

from .algebra import (
    ManifoldTriple,
    OperatorBasis,
    expand_in_basis,
    manifold_triple,
    spin_quadrupolar_basis,
    structure_constants,
)
from .dtwa import IntegratorConfig, MeanFieldRhs, run_trajectories, sample_phase_points
from .exact import collective_hamiltonian, evolve, full_hamiltonian, symmetric_basis
from .experiments import (
    FitResult,
    RunConfig,
    RunResult,
    SweepRecord,
    benchmark_compare,
    power_law_fit,
    run_scaling,
    run_single,
)
from .lattice import (
    CouplingSpec,
    Geometry,
    ProductState,
    build_geometry,
    coupling_matrix,
    initial_state,
)
from .metrology import SpinMoments, SqueezingResult, squeezing_and_fisher

__all__ = [
    "__version__",
    "ManifoldTriple",
    "OperatorBasis",
    "expand_in_basis",
    "manifold_triple",
    "spin_quadrupolar_basis",
    "structure_constants",
    "IntegratorConfig",
    "MeanFieldRhs",
    "run_trajectories",
    "sample_phase_points",
    "collective_hamiltonian",
    "evolve",
    "full_hamiltonian",
    "symmetric_basis",
    "FitResult",
    "RunConfig",
    "RunResult",
    "SweepRecord",
    "benchmark_compare",
    "power_law_fit",
    "run_scaling",
    "run_single",
    "CouplingSpec",
    "Geometry",
    "ProductState",
    "build_geometry",
    "coupling_matrix",
    "initial_state",
    "SpinMoments",
    "SqueezingResult",
    "squeezing_and_fisher",
]
