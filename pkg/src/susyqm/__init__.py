"""Exactly solvable partners of one-dimensional Schrodinger operators.

Darboux transformations of first and second order, hypergeometric seed
machinery for the trigonometric Poschl-Teller well, Floquet band structure
with the single-gap Lame potential, and ladder / coherent-state algebra.
"""

from .errors import (
    InconsistentSeedError,
    IntegratorAccuracyError,
    ParameterDegeneracyError,
    SingularTransformError,
    SusyError,
    TruncationError,
    ValidationError,
)
from .numerics import (
    DEFAULT_N_POINTS,
    Grid1D,
    SampledFunction,
    count_nodes,
    inner_product,
    integrate_schrodinger,
    l2_norm,
    normalized,
    offset_grid,
    quadrature,
    residual_schrodinger,
)
from .susy import (
    NewState,
    PartnerResult,
    PotentialModel,
    SecondOrderParams,
    SeedSolution,
    SpectralChange,
    first_order_partner,
    map_eigenfunction_first,
    map_eigenfunction_second,
    second_order_complex,
    second_order_confluent,
    second_order_real,
    seed_from_initial_data,
    verify_intertwining,
    verify_susy_algebra,
)
from .poschl_teller import (
    PTParams,
    PTSeedRecipe,
    pt_ab_coefficients,
    pt_confluent_w,
    pt_eigenvalue,
    pt_grid,
    pt_model,
    pt_normalized_eigenfunction,
    pt_potential,
    pt_recipe_ab,
    pt_recipe_eigen,
    pt_recipe_from_q,
    pt_seed,
)
from .shooting import shooting_eigenvalues
from .periodic import (
    BandEdge,
    BandStructure,
    FloquetData,
    LameParams,
    TransferMatrix,
    band_edges,
    combination_seed,
    discriminant,
    lame_model,
    lame_potential,
    lame1_band_edge_states,
    sin2_model,
    susy_periodic_first,
    susy_periodic_first_general,
    susy_periodic_second,
    transfer_matrix,
)
from .algebra_cs import (
    CoherentState,
    LadderSpec,
    SpectrumFunction,
    coherent_coefficients,
    evolution_check,
    kernel_degeneracy,
    linear_kernel_reference,
    lowering_residual,
    moment_check,
    oscillator_spectrum,
    pt_spectrum,
    reproducing_kernel,
    rho_moments,
)

__version__ = "0.1.0"
