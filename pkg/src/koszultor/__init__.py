"""Exact depth, grade and Tor-pair computations over quotients of F_p[x_1, ..., x_n]."""

__version__ = "0.1.0"

from .ringcore import (
    Ideal,
    ParseError,
    Polynomial,
    QuotientRing,
    Session,
    SessionError,
    parse_session,
    serialize_session,
)
from .groebner import (
    BudgetExceeded,
    FreeModuleMap,
    GroebnerBasis,
    buchberger,
    free_resolution,
    normal_form,
    syzygies,
)
from .homalg import (
    ChainComplex,
    IndeterminateError,
    PresentedModule,
    annihilator,
    cocycle_module,
    ext,
    hom_from_cyclic,
    homology_at,
    koszul_chain,
    koszul_cochain,
    syzygy_module,
    tor,
    vanishes_at_prime,
)
from .depthlab import (
    INF,
    DepthProfile,
    ExtendedNat,
    PrimeEntry,
    PrimeTable,
    ass_member,
    depth_table,
    grade,
    grade_table,
    grade_via_ext,
    height,
    krull_dim,
    local_depth,
)
from .torpairs import (
    ClassificationReport,
    GeneratorSpec,
    PhiFunction,
    PhiViolation,
    RecoveryRefused,
    almost_cm_check,
    both_definable_check,
    class_membership,
    classify,
    cotilting_check,
    enumerate_phi,
    generator_set,
    is_order_preserving,
    recover_phi,
    regular_dual,
    rfd,
    rfd_small_lower,
    sequence_view,
    tor_oracle_membership,
    validate_phi,
)
