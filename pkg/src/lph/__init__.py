"""Linear-product homotopy continuation for structured polynomial systems
and real witness set computation."""

from .linalg import (
    InvalidBetaError,
    SingularMatrixError,
    beta_normalizer,
    determinant,
    lu_solve,
)
from .poly import (
    Monomial,
    MultiPoly,
    ParseError,
    PolySystem,
    jacobian_transpose,
    parse,
    parse_poly,
)
from .solver import (
    ChoiceIndex,
    LinearProductG,
    LPHProblem,
    LPHResult,
    NormalizedProblem,
    backsolve_lambda,
    build_G,
    enumerate_choices,
    h1_track,
    lph_solve,
    normalize,
    root_bound,
)
from .start_systems import (
    SlicedSystem,
    TotalDegreeStart,
    random_slice,
    solve_square,
    total_degree_roots,
    witness_points,
)
from .tracker import (
    CONVERGED,
    DIVERGENT,
    FAILED,
    HomotopyPair,
    PathResult,
    TrackConfig,
    davidenko_rhs,
    homotopy_eval,
    newton_correct,
    track_path,
)
from .witness import (
    RealFilterConfig,
    RealWitnessSet,
    WitnessPoint,
    augment,
    build_critical_system,
    full_rank_check,
    real_filter,
    real_witness_set,
    witness_bound,
)

__version__ = "0.1.0"
