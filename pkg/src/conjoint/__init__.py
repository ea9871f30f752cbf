"""
Measurement statistics for bipartite experimenter/system experiments.

Two descriptions are computed side by side: the conventional one, where the
system starts in a classical mixture of prepared states and the Born rule
gives ``p(b|a)``, and the complete one, where the experimenter stays
entangled with the system and a conjoint final measurement yields joint
probabilities ``p(a, b)``.
"""
from .linalg import DEFAULT_TOL, Subsystem, Tolerance
from .model import (
    BipartiteState,
    Evolution,
    EvolutionKind,
    InvalidScenarioError,
    MeasurementBasis,
    Preparation,
    Scenario,
    TimeLabels,
    ValidationReport,
    assemble_complete_state,
    validate_scenario,
)
from .oracle import SampleRun, enumerate_joint, sample_joint, tv_distance
from .probability import (
    CoefficientMatrix,
    ConditionalTable,
    Direction,
    DivergenceReport,
    JointTable,
    bayes_check,
    coefficient_matrix,
    conditional,
    conventional_conditional,
    conventional_mixture,
    divergence_report,
    joint_distribution,
    marginal_a,
    marginal_b,
    reduced_density,
)
from .scenario_io import (
    ParseDiagnostic,
    ScenarioDocument,
    ScenarioParseError,
    load_scenario,
    parse_scenario,
    write_scenario,
)

__version__ = "0.1.0"
