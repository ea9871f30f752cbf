"""
Measurement statistics under the conventional and the complete description.

The conventional description hands the system a prepared state ``|chi_a>``
with probability ``|alpha_a|^2`` and supplies Born-rule conditionals
``p(b|a)``. The complete description keeps the experimenter in the state,
so the final conjoint measurement yields a joint table ``p(a, b)`` from
which both predictive and retrodictive conditionals follow.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    DimensionError,
    Subsystem,
    Tolerance,
    inner,
    outer,
    partial_trace,
)
from .model import (
    BipartiteState,
    Evolution,
    InvalidScenarioError,
    MeasurementBasis,
    Preparation,
    Scenario,
    Violation,
    assemble_complete_state,
    require_valid,
    validate_basis,
    validate_evolution,
    validate_preparation,
    validate_scenario,
    validate_state,
)

__all__ = [
    "CLAMP",
    "Direction",
    "JointTable",
    "ConditionalTable",
    "CoefficientMatrix",
    "DivergenceReport",
    "conventional_conditional",
    "coefficient_matrix",
    "joint_distribution",
    "marginal_a",
    "marginal_b",
    "conditional",
    "bayes_check",
    "reduced_density",
    "conventional_mixture",
    "divergence_report",
]

# probabilities below this are floating-point dust and treated as exactly 0
CLAMP = 1e-14


class Direction(str, enum.Enum):
    PREDICTIVE = "predictive"      # p(B=b | A=a)
    RETRODICTIVE = "retrodictive"  # p(A=a | B=b)


@dataclass(frozen=True, eq=False)
class JointTable:
    """Joint probabilities ``p[a, b]`` of a conjoint A/B measurement."""

    p: np.ndarray

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        if p.ndim != 2:
            raise DimensionError(f"joint table must be 2-d, got shape {p.shape}")
        p[np.abs(p) < CLAMP] = 0.0
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @property
    def shape(self) -> tuple:
        return self.p.shape

    def check(self, tol: Tolerance = DEFAULT_TOL) -> "JointTable":
        """Raise ``ValueError`` unless entries are non-negative and sum to 1."""
        if not np.all(np.isfinite(self.p)):
            raise ValueError("joint table has non-finite entries")
        if np.any(self.p < 0):
            raise ValueError(f"joint table has negative entries (min {self.p.min():.3g})")
        residual = abs(float(self.p.sum()) - 1.0)
        if residual > tol.eps:
            raise ValueError(f"joint table sums to 1{'+' if self.p.sum() > 1 else '-'}{residual:.3g}")
        return self


@dataclass(frozen=True, eq=False)
class ConditionalTable:
    """
    Conditional probabilities, always indexed ``p[a, b]``.

    For ``PREDICTIVE`` tables row ``a`` holds ``p(b|a)``; for
    ``RETRODICTIVE`` tables column ``b`` holds ``p(a|b)``. ``supported``
    has one flag per conditioning outcome; unsupported rows/columns hold NaN.
    """

    direction: Direction
    p: np.ndarray
    supported: np.ndarray

    @property
    def masked(self) -> np.ndarray:
        """Conditioning outcomes with zero marginal (conditional undefined)."""
        return ~self.supported

    def conditioning_sums(self) -> np.ndarray:
        axis = 1 if self.direction is Direction.PREDICTIVE else 0
        return self.p.sum(axis=axis)


@dataclass(frozen=True, eq=False)
class CoefficientMatrix:
    """``mu[i, j] = alpha_i * beta_ij``: amplitudes of the complete state in the pulled-back basis."""

    mu: np.ndarray
    amplitudes: np.ndarray

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.mu) ** 2

    def beta(self, i: int) -> np.ndarray:
        """Row ``i`` of ``beta``; undefined (``ValueError``) when ``alpha_i == 0``."""
        alpha = self.amplitudes[i]
        if alpha == 0:
            raise ValueError(f"beta[{i}] is undefined: alpha_{i} = 0")
        return self.mu[i] / alpha


@dataclass(frozen=True, eq=False)
class DivergenceReport:
    conventional_joint: JointTable
    complete_joint: JointTable
    total_variation: float
    max_entry_gap: float


def _require_local(evo: Evolution, what: str) -> None:
    if not evo.is_local:
        raise InvalidScenarioError(
            [Violation("evolution.kind", f"{what} needs a local evolution; the conventional "
                                         "description cannot express a joint experimenter/system evolution")]
        )


def _check_local_inputs(prep: Preparation, evo: Evolution, basis_b: MeasurementBasis, tol: Tolerance) -> None:
    _require_local(evo, "the conventional description")
    report = validate_preparation(prep, tol)
    require_valid(report)
    report.extend(validate_evolution(evo, prep.dim_a, prep.dim_b, tol))
    report.extend(validate_basis(basis_b, prep.dim_b, tol, "basis_b"))
    require_valid(report)


def conventional_conditional(prep: Preparation, evo: Evolution, basis_b: MeasurementBasis,
                             tol: Tolerance = DEFAULT_TOL) -> ConditionalTable:
    """Born rule ``p(b|a) = |<b| V |chi_a>|^2``, one row per prepared state."""
    _check_local_inputs(prep, evo, basis_b, tol)
    v = np.asarray(evo.operator)
    p = np.empty((prep.dim_a, prep.dim_b))
    for a, chi in enumerate(prep.conditional_states):
        evolved = v @ chi
        for b, ket in enumerate(basis_b.vectors):
            p[a, b] = abs(inner(ket, evolved)) ** 2
    p[p < CLAMP] = 0.0
    return ConditionalTable(Direction.PREDICTIVE, p, np.ones(prep.dim_a, dtype=bool))


def coefficient_matrix(prep: Preparation, evo: Evolution, basis_b: MeasurementBasis,
                       tol: Tolerance = DEFAULT_TOL) -> CoefficientMatrix:
    """
    ``mu[i, j] = alpha_i <j| V |chi_i>``, i.e. the components of the complete
    state along ``|i>_A (x) V^dagger |j>_B``.
    """
    _check_local_inputs(prep, evo, basis_b, tol)
    chis = np.hstack(prep.conditional_states)            # (dim_b, dim_a)
    beta = (basis_b.matrix.conj().T @ evo.operator @ chis).T
    mu = prep.amplitudes[:, None] * beta
    return CoefficientMatrix(mu, np.array(prep.amplitudes))


def joint_distribution(state: BipartiteState, evo: Evolution, basis_a: MeasurementBasis | None = None,
                       basis_b: MeasurementBasis | None = None, tol: Tolerance = DEFAULT_TOL) -> JointTable:
    """
    ``p(a, b) = |(<a|_A (x) <b|_B) U |psi>|^2`` with ``U = I_A (x) V`` for a
    local evolution or the full joint operator otherwise. Bases default to
    the standard ones.
    """
    basis_a = basis_a or MeasurementBasis.standard(state.dim_a)
    basis_b = basis_b or MeasurementBasis.standard(state.dim_b)
    report = validate_state(state, tol)
    require_valid(report)
    report.extend(validate_evolution(evo, state.dim_a, state.dim_b, tol))
    report.extend(validate_basis(basis_a, state.dim_a, tol, "basis_a"))
    report.extend(validate_basis(basis_b, state.dim_b, tol, "basis_b"))
    require_valid(report)

    psi = state.amplitude_matrix()
    if evo.is_local:
        # (I (x) V)|psi> reshaped is Psi V^T
        evolved = psi @ evo.operator.T
    else:
        evolved = (evo.operator @ state.vector).reshape(state.dim_a, state.dim_b)
    amp = basis_a.matrix.conj().T @ evolved @ basis_b.matrix.conj()
    return JointTable(np.abs(amp) ** 2).check(tol)


def marginal_a(jt: JointTable) -> np.ndarray:
    """``p(A=a) = sum_b p(a, b)``."""
    return jt.p.sum(axis=1)


def marginal_b(jt: JointTable) -> np.ndarray:
    """``p(B=b) = sum_a p(a, b)``."""
    return jt.p.sum(axis=0)


def conditional(jt: JointTable, direction: Direction | str) -> ConditionalTable:
    direction = Direction(direction)
    if direction is Direction.PREDICTIVE:
        marg = marginal_a(jt)
        supported = marg >= CLAMP
        p = np.full(jt.shape, np.nan)
        p[supported] = jt.p[supported] / marg[supported, None]
    else:
        marg = marginal_b(jt)
        supported = marg >= CLAMP
        p = np.full(jt.shape, np.nan)
        p[:, supported] = jt.p[:, supported] / marg[None, supported]
    return ConditionalTable(direction, p, supported)


def bayes_check(jt: JointTable, tol: Tolerance = DEFAULT_TOL, *,
                predictive: ConditionalTable | None = None,
                retrodictive: ConditionalTable | None = None) -> bool:
    """
    True iff ``p(a|b) p(b) == p(b|a) p(a) == p(a, b)`` within ``tol`` wherever
    the conditioning outcome is supported.

    Conditionals are derived from ``jt`` unless supplied, which lets callers
    test conditionals obtained elsewhere against a joint table.
    """
    predictive = predictive or conditional(jt, Direction.PREDICTIVE)
    retrodictive = retrodictive or conditional(jt, Direction.RETRODICTIVE)
    if predictive.p.shape != jt.shape or retrodictive.p.shape != jt.shape:
        return False
    pa, pb = marginal_a(jt), marginal_b(jt)
    for a in range(jt.shape[0]):
        for b in range(jt.shape[1]):
            joint = jt.p[a, b]
            if pa[a] >= CLAMP:
                if not predictive.supported[a] or not abs(predictive.p[a, b] * pa[a] - joint) <= tol.eps:
                    return False
            if pb[b] >= CLAMP:
                if not retrodictive.supported[b] or not abs(retrodictive.p[a, b] * pb[b] - joint) <= tol.eps:
                    return False
    return True


def reduced_density(state: BipartiteState, over: Subsystem | str, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Partial trace of ``|psi><psi|`` over the named subsystem."""
    require_valid(validate_state(state, tol))
    return partial_trace(outer(state.vector), state.dim_a, state.dim_b, over)


def conventional_mixture(prep: Preparation, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Classical mixture ``sum_a |alpha_a|^2 |chi_a><chi_a|``."""
    require_valid(validate_preparation(prep, tol))
    rho = np.zeros((prep.dim_b, prep.dim_b), dtype=np.complex128)
    for weight, chi in zip(prep.outcome_probabilities, prep.conditional_states):
        rho += weight * outer(chi)
    return rho


def divergence_report(s: Scenario, tol: Tolerance = DEFAULT_TOL) -> DivergenceReport:
    """
    Contrast the conventional joint ``|alpha_a|^2 p_conv(b|a)`` with the
    complete joint obtained from the actual evolution.

    For a joint evolution the conventional side uses the scenario's declared
    local evolution, i.e. what the experimenter believes happens to B.
    """
    require_valid(validate_scenario(s, tol))
    prep = s.preparation
    born = conventional_conditional(prep, s.conventional_evolution, s.basis_b, tol)
    conventional = JointTable(prep.outcome_probabilities[:, None] * born.p)
    state = assemble_complete_state(prep, tol)
    complete = joint_distribution(state, s.evolution, s.basis_a, s.basis_b, tol)
    gap = np.abs(conventional.p - complete.p)
    return DivergenceReport(conventional, complete, float(0.5 * gap.sum()), float(gap.max()))
