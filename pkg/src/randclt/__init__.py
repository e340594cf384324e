"""Numerical diagnostics for central limit theorems of random sums.

Condition functionals (Lyapunov, Lindeberg, Feller, infinitesimality, and the
normal-comparison tail functional) with their index-randomized counterparts,
seeded Monte Carlo simulation of normalized random sums, and approximation-
rate audits against the index-averaged bound shapes.
"""

from .conditions import (
    Condition,
    ConditionReport,
    ImplicationAudit,
    feller,
    implication_audit,
    infinitesimality,
    lindeberg,
    lyapunov,
    random_feller,
    random_lindeberg,
    random_rotar,
    rotar,
)
from .families import (
    BUILTIN_FAMILY_KINDS,
    NormalComparator,
    PartialVariance,
    SummandFamily,
    comparator_family,
    make_family,
    parse_family,
)
from .indices import (
    BUILTIN_INDEX_KINDS,
    RandomIndexModel,
    WeightedExpectation,
    deterministic,
    make_index,
    shifted_geometric,
    shifted_poisson,
    uniform_index,
)
from .montecarlo import (
    EmpiricalSample,
    KolmogorovEstimate,
    cf_identity_check,
    clt_sweep,
    kolmogorov_distance,
    simulate,
)
from .quadrature import (
    IntegralResult,
    adaptive_integral,
    rotar_tail_integral,
    tail_abs_moment,
    tail_second_moment,
)
from .rates import (
    BUILTIN_TEST_FUNCTIONS,
    RateCurve,
    SmallOCurve,
    TestFunction,
    large_o_audit,
    make_test_function,
    modulus_of_continuity,
    small_o_audit,
    smooth_metric,
)

__version__ = "0.1.0"
