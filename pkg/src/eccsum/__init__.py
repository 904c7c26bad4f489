"""Eccentric p-summing constants, Pietsch measures and graph path metrics."""

from .errors import DegenerateSequence, InputError, NumericalFailure, UnsupportedError
from .graphs import (
    PathMatrix,
    PathResult,
    WeightedGraph,
    check_t2,
    circle_graph,
    d_p,
    d_p_mu,
    e_p,
    graph_lip_constant,
    graph_space,
    path_graph,
    q_p,
    sequence_graph,
    symmetry_classes,
    two_apex_graph,
)
from .lp import LinearProgram, LpSolution, LpStatus, solve_lp
from .metric import (
    FiniteMetricSpace,
    Molecule,
    PairSequence,
    WcResult,
    ae_norm,
    d_ac,
    d_cc,
    d_wc,
    eccentric_pseudometric,
    empirical_k_norming,
    f_y,
    lip_constant,
    pairing,
    validate_metric,
)
from .summing import (
    MetricMap,
    PietschCertificate,
    ProbabilityMeasure,
    approximating_constant,
    domination_constant,
    mix_measures,
    pietsch_functional,
    pietsch_map,
    summing_ratio_oracle,
    verify_domination,
    verify_mixed_domination,
)
from .tolerances import DEFAULT_TOL, ToleranceConfig

__version__ = "0.1.0"
