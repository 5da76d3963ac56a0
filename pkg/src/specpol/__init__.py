"""Data-driven spectral analysis of composition and transfer operators.

EDMD over configurable inner-product spaces, residual-based pseudospectral
error control, kernelized variants with compressed residuals, and benchmark
circle dynamics with analytically known spectra.
"""

from . import analysis, dictionaries, dynamics, edmd, kernels, spaces, validation
from .analysis import (MetastablePartition, SpectralReport, classify_eigenvalues,
                       hausdorff_to_truth, metastable_partition, select_near_one)
from .dictionaries import (DataMatrices, Dictionary, SamplingScheme, SnapshotSet,
                           assemble_data_matrices, fourier_dictionary, make_snapshots,
                           snapshots_from_trajectory)
from .dynamics import (CircleMap, MapKind, TrueSpectrum, attracting_fixed_point,
                       blaschke1, blaschke2, eval_map, map_derivative, preimages,
                       transfer_apply, true_spectrum)
from .edmd import (EdmdOperators, ResdmdEvaluator, ResidualField, deviation_from_normality,
                   fit_edmd, make_grid, naive_transfer_residual, operator_eigs,
                   resdmd_grid, residual_at, residual_of_pair)
from .kernels import (KedmdResult, KernelGrams, KernelSpec, KresEvaluator, TruncatedSvd,
                      auto_covariance_bandwidth, gaussian_kernel, kedmd, kernel_grams,
                      kresdmd_modified_grid, kresdmd_original_grid, truncated_eig)
from .spaces import (GramTriple, InnerProductSpec, SpaceKind, assemble_gram_triple,
                     empirical_l2, fourier_weights, hardy_dual, orthonormalize, sobolev)

__version__ = "0.1.0"
