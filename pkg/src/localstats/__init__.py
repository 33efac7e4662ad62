"""Exact local statistics of bounded-degree graphs and free-group Schreier graphs."""

__version__ = "0.1.0"

from .graphs import (
    BoundedDegreeGraph,
    GraphError,
    RootedBall,
    SchreierGraph,
    ball,
    schreier_ball,
    validate_schreier,
)
from .canon import action_code, canonical_code, decode_code, graph_code
from .statistics import (
    BallCatalog,
    StatVector,
    count_schreier_balls,
    enumerate_balls,
    enumerate_graphs,
    enumerate_schreier_balls,
    neighborhood_stats,
    schreier_stats,
    stat_distance,
)
from .freegroup import (
    PseudoSubgroup,
    ResourceCapExceeded,
    Window,
    enumerate_pseudo_subgroups,
    fold,
    is_pseudo_subgroup,
    parse_word,
    pseudo_to_ball,
    stab_window,
    stallings_membership,
    window,
)
from .lp import LinearSystem, LPResult, feasible, maximize, minimize
from .localtests import (
    LocalTest,
    SoficBracket,
    enumerate_schreier_graphs,
    eval_test,
    sofic_bracket,
    sofic_lower_search,
    val,
)
from .pirs import (
    PirsPolytope,
    Region,
    build_pirs,
    check_containment,
    empirical_distribution,
    image_maximum,
    irs_upper_bound,
    m_machine,
    stats_map,
)
from .encodings import GadgetLayout, decode_graph, decode_schreier, encode_graph, encode_schreier
from .reductions import (
    BoundOracle,
    EpsilonNet,
    LsdfAnswer,
    capped_lsdf,
    greedy_net,
    lsdf_from_bound,
    net_from_lsdf,
    schreier_bound_from_sparse,
    sparse_bound_from_schreier,
)
