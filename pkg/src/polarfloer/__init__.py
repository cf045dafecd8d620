"""Chain-level Z/2-equivariant and polarization-twisted Floer/Morse algebra
over F2, F2[Z/2], F2[t] and F2[t,t^-1]."""

from .complexes import (
    ChainMap,
    ComplexError,
    FreeComplex,
    ModuleReport,
    cone,
    direct_sum,
    graded_piece_dims,
    homology,
    tensor_over_pid,
    truncation_cone,
    verify_homotopy,
)
from .equiv_floer import (
    EquivariantDataset,
    FullComplexData,
    LocalizationResult,
    assemble_equivariant,
    diagonal_model,
    kunneth_point_model,
    localization_map,
    map_G,
    morse_canonical_form,
    smith_report,
    sq_components,
    ss_truncate,
    steenrod_square,
    truncation_tower,
)
from .equivariant import (
    BorelComparison,
    TComplex,
    Z2FreeComplex,
    a_f2,
    ainfty_f2,
    borel,
    classify_window_pattern,
    comparison_F,
    derived_tensor,
    finite_type_block,
    tensor_z2,
    verify_monoidal,
)
from .linalg import F2Homology, f2_kernel, f2_rank, f2_solve
from .morse_km import (
    KMDataset,
    KMTriple,
    assemble,
    canonical_trn_dataset,
    validate_relations,
    verify_triangle,
)
from .rings import (
    F2LAU,
    F2T,
    F2Z2,
    GF2,
    F2Laurent,
    F2Poly,
    GroupRingElem,
    laurent_inverse_series,
    parse_ring_element,
)
from .smith import pid_homology_report, pid_kernel, pid_solve, smith_normal_form
from .spectral import spectral_pages
from .twisted import (
    LocalSystemXi,
    TrajectoryClass,
    TwistedDataset,
    build_twisted,
    e2_page,
    point_dataset,
    porteous_coefficient,
    two_point_twisted,
    verify_T_invertible,
)

__version__ = "0.1.0"
