"""Laplacian eigenmaps of sparse, noisy kernel matrices.

Building blocks for embedding occluded and corrupted similarity matrices,
plus empirical checks of the associated concentration and eigenspace
perturbation bounds.
"""

from .matrixcore import Spectrum, as_symmetric, eigh, frobenius_distance, svd
from .datasets import (
    gaussian_kernel,
    load_edge_list,
    load_kernel_csv,
    pairwise_distances,
    planted_partition,
    sample_swiss_roll,
)
from .corruption import NoiseSpec, ObservedMatrix, corrupt, occlude
from .laplacian import RegularizedMatrix, normalized_laplacian, regularize, squared
from .embedding import Embedding, EigenSelection, eigengap, eigenmaps_embed, select_eigenspace
from .alignment import AlignmentReport, procrustes, subspace_distance
from .evaluation import adjusted_rand_index, average_precision, kmeans
from .baselines import UsvtConfig, usvt_complete

__version__ = "0.1.0"
