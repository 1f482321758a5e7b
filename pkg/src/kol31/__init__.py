"""Kolakoski-(3,1) as a cut-and-project model set.

Exact cubic-field arithmetic, the window IFS of the block substitution, the
two-sided tiling point set, and its pure-point diffraction before and after
the bond-length deformations.
"""

__version__ = "0.1.0"

from .cubic import (
    CONSTANTS,
    CubicNumber,
    EmbeddingConstants,
    InternalPoint,
    cubic_inv,
    cubic_mul,
    embed_internal,
    embed_real,
    internal_decompose,
)
from .sequences import (
    bi_word,
    block_fixed_point,
    block_fixed_point_biinfinite,
    classify,
    decode_blocks,
    empirical_frequencies,
    kol_alternating,
    kol_selfread,
    mirror_check,
    patch_statistics,
    substitution_data,
    verify_runlength_fixed,
)
from .windows import (
    AffineSimilarity,
    attractor_cloud,
    boundary_cloud,
    membership,
    rhombus_verify,
    verify_map_identities,
    verify_point_identities,
)
from .modelset import (
    SitePoint,
    SiteSet,
    WindowSpec,
    coset_locate,
    cut_and_project,
    density_empirical,
    genericity_probe,
    inversion_symmetry_check,
    lattice_basis,
    sigma_kol_sites,
    star,
    verify_window_subset,
)
from .diffraction import (
    DeformationParams,
    cross_validate,
    deform_sites,
    deformation_params,
    dual_basis,
    fb_sum,
    fb_window,
    peak_position,
    periodicity_check,
    spectrum_table,
)
