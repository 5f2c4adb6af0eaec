"""berkpatch: exact disc geometry, quadratic-form isotropy, and annulus
patching on the projective line over Q_p."""

from .exponents import (
    Exponent,
    OrderBaseData,
    ValueVector,
    compare,
    order_base,
    order_of,
    rebase,
    reduce_even_order,
    reduce_odd_order,
)
from .padic import (
    DomainError,
    PadicScalar,
    SquareClass,
    hensel_sqrt,
    padic_valuation,
    square_class,
)
from .ratfunc import (
    Polynomial,
    RationalFunction,
    parse_ratfunc,
    point_norm_exponent,
)
from .series import AnnulusRing, AnnulusSeries, annulus_norm, parse_series
from .formal import FormalElement, SyntheticField
from .forms import (
    Block,
    BlockDecomposition,
    DiagonalForm,
    FieldProfile,
    PadicField,
    SpringerSplit,
    UBound,
    WittSplit,
    springer_split,
    u_bound,
    unit_block_decomposition,
    witt_split_trivial,
)
from .isotropy import (
    FiniteField,
    IsotropyCertificate,
    PointField,
    bruteforce_isotropic_padic,
    isotropic_finite_field,
    isotropic_padic,
    local_isotropy_at_point,
)
from .berkovich import (
    INFINITY,
    WHOLE_LINE,
    AffinoidDomain,
    BerkPoint,
    Disc,
    NiceCover,
    SwissCheese,
    boundary,
    classify_point,
    cover_with_intersections,
    is_nice_cover,
    membership,
    nice_refinement,
    parity_function,
    refine_pair,
)
from .patching import (
    CHARTS,
    AnnulusSplit,
    ApproximationResult,
    BoundViolation,
    MatrixFactorization,
    PatchingProblem,
    PatchResult,
    TraceRow,
    factor_matrix,
    laurent_split,
    patch_over_cover,
    successive_approximation,
)

__version__ = "0.1.0"
