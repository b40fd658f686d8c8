"""Periodic bar-and-joint frameworks from finite linkages.

The toolkit converts finite linkages with marked vertex pairs into periodic
frameworks, counts degrees of freedom through rigidity-matrix rank analysis,
certifies (strictly) auxetic motions by checking Gram-matrix tangents
against the positive-semidefinite cone, and follows one-parameter motions
numerically to locate the interval on which they stay auxetic.
"""

from .errors import (
    BudgetExhausted,
    DegenerateHinge,
    DegeneratePlacement,
    DegenerateSimplex,
    DimensionMismatch,
    Disconnected,
    DuplicateEdge,
    DuplicateOrbit,
    IllConditionedPosition,
    InconsistentIdentification,
    MarkedPairsNotBasis,
    NonRigidScaffold,
    NotAuxeticAtStart,
    NotOneDof,
    PeriodicaError,
    RankToleranceAmbiguous,
    RedundantAttachment,
    SchemaError,
    SingularMatrix,
    UnsupportedDimension,
    VersionUnsupported,
    WrongPairCount,
    ZeroLengthEdge,
)
from .geometry import (
    EdgeOrbit,
    FiniteLinkage,
    InfinitesimalDeformation,
    PeriodicFramework,
    SymmetricMatrix,
    build_framework,
    build_linkage,
    canonical_orbit,
    gram,
    lattice_matrix,
)
from .rigidity import (
    DeformationSpace,
    DofCount,
    deformation_basis,
    finite_dof,
    finite_rigidity_matrix,
    finite_trivial_motions,
    flex_residual,
    matrix_rank,
    periodic_dof,
    periodic_rigidity_matrix,
    periodic_trivial_motions,
    relative_deformation_basis,
)
from .quotient import QuotientReport, periodic_flex_from_finite, quotient, to_periodic
from .auxetics import (
    Auxeticity,
    AuxeticVerdict,
    StrictDirection,
    affine_invariance_check,
    apply_affine,
    basis_gram_velocities,
    deformation_gram_velocity,
    gauge_fix,
    gram_velocity,
    integer_direction_minimum,
    marked_velocity_matrix,
    stationary_scale,
    strict_direction,
    verdict,
)
from .builders import (
    Cadelniza,
    HingeSpec,
    LkClosedForm,
    LkGallery,
    PaneledSimplex,
    add_edge_orbit,
    altitude_directions,
    build_gallery,
    cadelniza,
    double_arrowhead,
    gallery_lk,
    hinge_attach,
    joint_velocity,
    lk_closed_form,
    paneled_simplex,
    reduce_to_one_dof,
    roofed_cadelniza,
    roofing_adapted_basis,
    roofing_preset,
)
from .trace import (
    AuxeticInterval,
    BoundaryKind,
    GramPath,
    PathSample,
    TraceConfig,
    TraceTermination,
    auxetic_interval,
    step_from,
    trace,
)
from .documents import (
    export_obj,
    framework_document,
    linkage_document,
    parse_document,
    serialize,
)

__version__ = "0.1.0"
