"""Heat content of bounded Euclidean sets.

Computes ``H(t)`` (the double integral of the heat kernel over a set against
itself) by several independent engines, estimates its time derivatives, and
verifies a catalog of quantitative monotonicity and convexity bounds with
explicit error propagation.
"""

from .derivatives import DerivativeEstimate, fd_derivative, sign_pattern
from .engines import (
    Estimate,
    Field,
    GridConfig,
    MCConfig,
    hc_bruteforce_pairs,
    hc_closed_box,
    hc_closed_interval,
    hc_d2_semigroup,
    hc_grid,
    hc_mc,
    hc_upper_bound,
    heat_content,
    laplacian_field,
    make_engine,
    smoothed_indicator,
)
from .errors import EngineError, NoisyEngineError, OracleScaleError, ResolutionError
from .geometry import (
    Ball,
    Box,
    BoxUnion,
    Domain,
    Interval,
    Raster,
    contains,
    diameter,
    domain_from_dict,
    domain_to_dict,
    load_domain,
    rasterize,
    sample_uniform,
    volume,
)
from .inequalities import (
    CASE_IDS,
    InequalityCase,
    VerificationReport,
    bg24_constants,
    build_case,
    compare_constants,
    improved_constants,
    sharpness_compare,
    standard_t_grid,
    verify,
)
from .kernel import (
    heat_kernel,
    heat_kernel_dt,
    kernel_dt_bound_check,
    kernel_lower_bound,
)

__version__ = "0.1.0"
