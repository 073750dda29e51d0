"""Exact trimming of finite metric spaces, trimming cylinders and tight spans."""

from .cylinder import (
    Cylinder,
    EdgeInterior,
    QuotientCylinder,
    Vertex,
    build_cylinder,
    path_distance,
    quotient_cylinder,
    rho,
    sigma_point,
    special_and_roots,
)
from .errors import InvariantError, TrimspanError
from .metric import (
    FiniteMetricSpace,
    FinitePseudometricSpace,
    QuotientMap,
    drift,
    gromov_product,
    is_trim,
    metric_quotient,
    underline_d,
    validate_space,
)
from .tightspan import (
    Classification,
    TightSpanFunction,
    d_T,
    decompose,
    f_point,
    is_member,
    lift,
    project,
    tau_lift,
    verify_main_theorem,
)
from .treegen import ChainSpec, MetricTree, chain_metric, leaf_space, parse_newick
from .trimming import TrimSequence, meeting_index, sigma, sigma_partial, trim_step, trimming_sequence

__all__ = [
    "ChainSpec",
    "Classification",
    "Cylinder",
    "EdgeInterior",
    "FiniteMetricSpace",
    "FinitePseudometricSpace",
    "InvariantError",
    "MetricTree",
    "QuotientCylinder",
    "QuotientMap",
    "TightSpanFunction",
    "TrimSequence",
    "TrimspanError",
    "Vertex",
    "build_cylinder",
    "chain_metric",
    "d_T",
    "decompose",
    "drift",
    "f_point",
    "gromov_product",
    "is_member",
    "is_trim",
    "leaf_space",
    "lift",
    "meeting_index",
    "metric_quotient",
    "parse_newick",
    "path_distance",
    "project",
    "quotient_cylinder",
    "rho",
    "sigma",
    "sigma_partial",
    "sigma_point",
    "special_and_roots",
    "tau_lift",
    "trim_step",
    "trimming_sequence",
    "underline_d",
    "validate_space",
    "verify_main_theorem",
]
