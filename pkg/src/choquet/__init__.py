"""Capacities, Choquet integrals, capacity learning and axiom scans."""

from .axioms import (
    FiniteRelation,
    ViolationWitness,
    check_convexity_axiom,
    check_lattice_axiom,
    check_ordinal_axiom,
    interaction_groups,
    interaction_groups_scan,
    reverify,
    tradeoff_grid,
    triple_cancellation_violations,
)
from .capacity import (
    Capacity,
    MobiusRepresentation,
    index_report,
    interaction_index,
    is_convex,
    is_supermodular,
    mobius,
    mobius_convexity_criterion,
    random_capacity,
    shapley,
    validate,
    zeta,
)
from .estimators import ChoquetRanker, JointChoquetRanker
from .exceptions import (
    ChoquetError,
    DomainError,
    InfeasibleError,
    InternalConsistencyError,
    MalformedInputError,
    ResourceError,
    ValidationError,
)
from .integral import (
    LatticePolynomial,
    choquet,
    choquet_batch,
    choquet_mobius,
    dualize,
    eval_lattice_poly,
    extract_dnf,
    order_statistic_capacity,
)
from .joint import (
    ExperimentSpec,
    JointConfig,
    identifiability_experiment,
    learn_joint,
    sample_preferences,
    synth_model,
)
from .learn import (
    Deltas,
    IdentificationConfig,
    InteractionStatement,
    LearnStatus,
    Preference,
    PreferenceDataset,
    ShapleyComparison,
    build_constraints,
    check_fit,
    identify,
)
from .lp import LinearProgram, LpSolution, solve
from .values import ValueFunctionSet

__version__ = "0.1.0"
