"""Lifted Markov chains at desk scale: constructions, exact mixing
measurements, conductance programs, and scenario-bound verdicts."""

from ._version import __version__
from .errors import (
    BadChoiceMap,
    BadColumnSum,
    BadGamma,
    BadScenario,
    BadSize,
    DimensionMismatch,
    DisconnectedGraph,
    EmptyChain,
    EmptyCutWeight,
    GammaTooLarge,
    GammaTooLargeForDelta,
    InfeasibleLP,
    LengthMismatch,
    LiftmixError,
    LocalityViolation,
    MissingInitMap,
    MissingReferenceChain,
    NegativeEntry,
    NoConvergence,
    NoSpanningTree,
    NotStationary,
    ReducibleChain,
    TooManyNodes,
    ZeroMarginalSupport,
)
from .graph_core import (
    Cut,
    Graph,
    barbell,
    complete,
    cycle,
    diameter,
    distance_matrix,
    enumerate_cuts,
    graph_from_edges,
    graph_from_json,
    graph_to_json,
    is_connected,
    load_graph,
    path,
    rooted_spanning_tree,
    shortest_path,
)
from .markov import (
    UNMIXED,
    Distribution,
    StochasticMatrix,
    TimeVaryingChain,
    check_stationary,
    default_t_max,
    distribution_from_json,
    ergodic_flows,
    evolve,
    is_irreducible,
    lazy_walk,
    matrix_from_json,
    metropolis_chain,
    mixing_time,
    point_distribution,
    stationary,
    tv_distance,
    uniform_distribution,
)
from .conductance import (
    clock_contraction_check,
    diameter_conductance_check,
    lemma1_check,
    phi_chain,
    phi_chain_cycle,
    phi_cut,
    phi_graph,
)
from .lift import (
    InitMap,
    Lift,
    LiftMap,
    ScenarioSpec,
    adversarial_init,
    check_flow_match,
    check_invariance,
    conditional_unlift,
    fiber_uniform_init,
    format_scenario,
    full_mixing_time,
    induced_chain,
    lift_from_json,
    lift_to_json,
    lifted_stationary,
    marginal,
    marginal_mixing_time,
    parse_scenario,
    scenario_report,
    unlift_si,
    validate_lift,
)
from .constructions import (
    clock_lift,
    diaconis_cycle_lift,
    diameter_mixer,
    four_cycle_lift,
    mixer_default_reference,
    node_clock_lift,
    periodic_clock_lift,
    periodic_node_clock_lift,
    si_replicated_lift,
    spanning_tree_correction,
    stochastic_bridge,
)
from .randomgen import (
    random_connected_graph,
    random_distribution,
    random_local_chain,
    random_reversible_chain,
    random_zero_sum,
    rng_from_seed,
)
