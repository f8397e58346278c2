"""Random QUBO laboratory: instances, PCA/Metropolis/exhaustive solvers, statistics."""
from .analysis import (BlockAccumulator, BlockStats, OptimumStats, OrderingAccumulator,
                       OrderingCurve, block_partition, block_stats, entropy,
                       gaussian_bound_constants, optimum_stats, ordering_curve)
from .energy import (Configuration, apply_flip, delta_flip, energy, exact_free_energy,
                     local_fields)
from .errors import CapacityError, FormatError
from .instance import (CouplingMatrix, Diluted, ShiftedExponential, StandardGaussian,
                       UniformInteger, generate, normalization_constant, symmetrize)
from .solvers import (Objective, PcaParams, SolveResult, brute_force, default_grid,
                      metropolis_solve, pca_best, pca_solve, pca_solve_batch, pca_step)

__version__ = "0.1.0"
