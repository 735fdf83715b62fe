"""lorcut: exact verification and enumeration of multiplicative inequalities
("bounded ratios") on Lorentzian matrices.

The library certifies boundedness of entrywise monomial ratios against the cut
cone, enumerates the primitive ratios as cut-cone facets in exact rational
arithmetic, evaluates closed-form optimal bounding constants with independent
numerical cross-checks, approximates hyperbolic log-metrics by tree metrics,
and tests the subtraction-free property by exact polynomial expansion.
"""

__version__ = "0.1.0"

from .constants import (
    BarycentricRatio,
    SupEstimate,
    XYZCheck,
    XYZQuantities,
    estimate_sup,
    numeric_constant_n3,
    optimal_constant_n3,
    tp_constant_n3,
    tp_constant_n3_by_vertices,
    xyz_product_check,
    xyz_quantities,
)
from .cutcone import (
    CutVector,
    FacetNormal,
    Orbit,
    OrbitReport,
    cut_cone_rays,
    cut_vector,
    enumerate_facets,
    hypermetric_ratio,
    orbit_classify,
)
from .errors import (
    CapabilityError,
    DomainError,
    InvariantViolation,
    LorcutError,
    ResourceLimitError,
    StructuralError,
)
from .matrices import (
    EigenSignature,
    LorentzianResult,
    Rank2Params,
    SampleConfig,
    SymMatrix,
    exact_rank,
    is_lorentzian,
    normalize_diagonal,
    permute,
    rank2_hessian,
    sample_rank2,
    sample_rank2_params,
    scale,
    witness_pentagonal,
    witness_tp,
)
from .metrics import (
    CutDecomposition,
    LogMetric,
    PhyloTree,
    cut_decomposition,
    four_point_check,
    gromov_tree_approx,
    hyperbolicity_delta,
    in_delta_tp,
    log_metric_from_matrix,
    random_tree,
    tree_metric,
    tree_reconstruct,
)
from .ratios import (
    BoundednessCertificate,
    FullRatio,
    ReducedRatio,
    complete_diagonal,
    decompose,
    evaluate,
    evaluate_with_flags,
    full_from_facet,
    full_from_h,
    is_bounded,
    named_ratio,
    normalize_ratio,
    reduced_from_facet,
)
from .subfree import IntPoly, SubfreeReport, poly_from_entry, subfree_check
