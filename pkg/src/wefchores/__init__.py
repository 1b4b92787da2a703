"""Weighted fair division of indivisible chores with exact arithmetic."""

__version__ = "0.1.0"

from .audit import (  # noqa: E402
    FairnessReport,
    Witness,
    check_goods_wef1,
    check_po_bruteforce,
    check_wef,
    check_wef1,
    check_wef1t,
    check_wefxy,
    check_wprop1,
    check_wpropx,
    check_wwef1,
)
from .bivalued import (  # noqa: E402
    MarketState,
    check_pwef1,
    initial_equilibrium,
    solve_wef1_po,
    verify_equilibrium,
)
from .budget import EnumerationBudget  # noqa: E402
from .core import (  # noqa: E402
    Allocation,
    BivaluedProfile,
    Instance,
    classify_bivalued,
    dump_allocation,
    dump_instance,
    load_allocation,
    load_instance,
    normalize_costs,
    scale_weights,
    social_cost,
)
from .oracle import (  # noqa: E402
    aps_exact,
    check_alpha_aps,
    enumerate_allocations,
    existence_sweep,
    opt_social_cost,
    price_of_fairness,
    wef1_exists,
)
from .picking import (  # noqa: E402
    PickingSequence,
    SizeTrajectory,
    check_sequence_condition,
    execute_picking,
    generate_rwps_sequence,
    generate_wefxy_sequence,
    goods_weighted_protocol,
    rwps,
    witness_instance,
)
from .two_agent import weighted_adjusted_winner, wef1_po_two_agents  # noqa: E402
