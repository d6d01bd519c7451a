"""Markov-chain toolkit for message passing on graphs.

Models per-layer feature aggregation as (possibly time-inhomogeneous) Markov
chains on the node set and provides the machinery to analyze when and how
fast node representations collapse onto a stationary distribution, plus the
gap-preserving regularizer that counteracts the collapse.
"""

from .graph import (
    Graph,
    add_self_loops,
    build_graph,
    generate,
    is_bipartite,
    is_connected,
    load_edge_list,
)
from .operators import (
    StochasticMatrix,
    SymmetricOperator,
    attention_operator,
    dobrushin_coefficient,
    dropedge_expected,
    gcn_operator,
    gen_softmax_operator,
    lazy_walk,
    simple_rw,
)
from .homogeneous import (
    LazyComparison,
    SpectralDecomposition,
    convergence_rate,
    d_curve,
    fit_decay_rate,
    l1_distance,
    mixing_time,
    spectral_decomposition,
    spectral_propagate,
    stationary_analytic,
    stationary_power,
    tv_distance,
    verify_lazy_slower,
)
from .inhomogeneous import (
    ChainSchedule,
    DimReport,
    NecessaryConditionReport,
    attention_stationary,
    cauchy_gap_series,
    dim_check,
    necessary_condition_check,
    propagate_inhomogeneous,
)
from .mcre import (
    EnvironmentSample,
    EnvironmentSpec,
    degree_law_check,
    exhaustive_expected,
    monte_carlo_expected,
    random_transition,
    sample_environment,
)
from .oversmoothing import (
    feature_view_inverse,
    feature_view_transform,
    min_layer_gap,
    node_std_metric,
    propagate_features,
    rt_penalty,
)
from .trainer import AttentionParams, TrainConfig, TrainReport, forward, loss, train

__version__ = "0.1.0"
