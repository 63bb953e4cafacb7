"""Monotone rearrangement (quantile function) of sampled functions.

Sample f on an asymptotically uniform grid, keep the points inside the
domain, sort the values and interpolate them linearly over equally spaced
nodes in [0, 1]. A counting oracle provides an independent reference.
"""

from .diagnostics import (
    convergence_study,
    dirichlet_counterexample,
    equimeasurability_check,
    grid_fraction_check,
    hat,
    hat_family,
    riemann_sum_check,
)
from .domain import (
    RegularSet,
    annulus,
    contains,
    difference,
    disk,
    domain_from_text,
    estimate_measure,
    from_expression,
    indices_in,
    intersection,
    l_shape,
    rectangle,
    union,
)
from .errors import (
    ConfigurationError,
    EvaluationError,
    InsufficientSamplesError,
    InvalidIndexError,
    NumericalError,
    ParseError,
    RangeError,
    RearrangementError,
)
from .expr import ScalarField, evaluate, field_from_text, parse, to_text
from .grid import Grid, GridSpec, Rectangle, au_deviation, cell, generate
from .kernels import BACKEND
from .multi_index import IndexRange, MultiIndex, lex_iterate, product_count
from .oracle import DistributionEstimate, empirical_cdf, generalized_inverse, oracle_quantile
from .rearrange import (
    RearrangementSpline,
    SampleVector,
    StepRearrangement,
    eval_spline,
    eval_step,
    rearrange_pipeline,
    sample_sort,
)

__version__ = "0.1.0"
