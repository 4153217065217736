"""Three-player simplified full-street Kuhn poker.

Exact expected values for the eleven-frequency game, the complete analytic
equilibrium catalog with verification, and the differential-equation model
of repeated play with stability analysis and trajectory classification.
"""

from .analytic_ev import GradientVector, expected_profit, gradient
from .catalog import (
    CriticalPots,
    EquilibriumSolution,
    FreeParamViolation,
    PotOutOfRange,
    SOLUTION_IDS,
    catalog_json,
    critical_pots,
    equilibrium_profit,
    instantiate,
    solutions_for_pot,
    validity_range,
)
from .dynamics import (
    ClassifierConfig,
    DynamicsClassification,
    IntegratorConfig,
    Label,
    Trajectory,
    average_profit_rate,
    classify,
    integrate,
    integrate_direct,
    random_initial_profile,
    vector_field,
)
from .game_model import (
    Card,
    Deal,
    FREQ_NAMES,
    ProfitVector,
    StrategyProfile,
    enumerate_deals,
    expected_profit_bruteforce,
    hand_value,
)
from .stability import StabilityReport, classify_equilibrium, eigenvalues, jacobian
from .verify import (
    BestResponseReport,
    best_response_check,
    exploitability,
    structural_lemma_tests,
)

__version__ = "0.1.0"

__all__ = [
    "BestResponseReport",
    "Card",
    "ClassifierConfig",
    "CriticalPots",
    "Deal",
    "DynamicsClassification",
    "EquilibriumSolution",
    "FREQ_NAMES",
    "FreeParamViolation",
    "GradientVector",
    "IntegratorConfig",
    "Label",
    "PotOutOfRange",
    "ProfitVector",
    "SOLUTION_IDS",
    "StabilityReport",
    "StrategyProfile",
    "Trajectory",
    "average_profit_rate",
    "best_response_check",
    "catalog_json",
    "classify",
    "classify_equilibrium",
    "critical_pots",
    "eigenvalues",
    "enumerate_deals",
    "equilibrium_profit",
    "expected_profit",
    "expected_profit_bruteforce",
    "exploitability",
    "gradient",
    "hand_value",
    "instantiate",
    "integrate",
    "integrate_direct",
    "jacobian",
    "random_initial_profile",
    "solutions_for_pot",
    "structural_lemma_tests",
    "validity_range",
    "vector_field",
]
