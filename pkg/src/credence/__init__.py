"""Cheap talk in credence-goods markets: envelopes, equilibria, checks."""

from .alt_games import (
    FlwProfile,
    SignalPricingPair,
    flw_from_client_worst,
    flw_verify,
    path_probabilities,
    relabeled_paths,
    transform_nonsignalling,
)
from .binary import (
    BinaryEquilibriumSet,
    Regime,
    client_value,
    closed_form_qcav,
    mirrored_closed_form_qcav,
    qhat,
    services_value,
    solve_above,
    solve_below,
)
from .envelope import (
    BenefitResult,
    LevelSplitting,
    SecurabilityWitness,
    Verdict,
    benefit_test,
    p_equilibrium_value,
    qcav,
    qcav_value,
    securable,
)
from .equilibrium import (
    EquilibriumProfile,
    ProfileKind,
    VerificationReport,
    client_worst_equilibrium,
    silent_equilibrium,
    solve_equilibrium,
    verify_p_equilibrium,
)
from .errors import *  # noqa: F401,F403
from .model import (
    EPS_EQ,
    EPS_NUM,
    Belief,
    MarketModel,
    PriceList,
    Splitting,
    load_model,
    reduce_support,
    validate_model,
)
from .oracle import SimplexGrid, hull_membership, qcav_grid_oracle
from .profits import (
    client_best_response,
    client_utilities,
    envelope_profit,
    expert_payoffs,
    expert_value,
    hyperplane_profits,
    monopoly_prices,
    profit_summary,
    surplus_stats,
)

__version__ = "0.1.0"
