"""Random piecewise-linear maps on [0, 1]: exact hypothesis certificates and
Monte-Carlo checks of stability, proximality and the central limit theorem."""

__version__ = "0.1.0"

from .pwlin import (
    BreakpointBudgetError,
    PwlError,
    PwlMap,
    RatInterval,
    StepFunction,
    banach_vitali_variation,
    compose,
    identity,
    image_interval,
    ordered_blocks_bound_check,
    preimage_count,
    preimage_count_function,
    total_variation,
)
from .hypotheses import (
    CertificateReport,
    StochasticSystem,
    certify,
    check_above_diagonal_right,
    check_below_diagonal_left,
    check_condition_A,
    check_mu_injectivity,
    example22_system,
    injectivity_profile,
    sublevel_set,
)
from .measure import (
    AtomMeasure,
    WalkRng,
    invariant_estimate,
    iterate_markov,
    markov_step,
    max_window_mass,
    pushforward,
    wasserstein1,
)
from .systemfile import parse_system, serialize_system
