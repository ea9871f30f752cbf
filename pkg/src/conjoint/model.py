"""
Data model for a bipartite experimenter/system experiment.

A :class:`Scenario` bundles the preparation (amplitudes over experimenter
outcomes plus the system state attached to each), the evolution between
preparation and the final conjoint measurement, and the two measurement
bases. Construction only normalizes array shapes; physical invariants are
checked by :func:`validate_scenario`, which reports every problem at once
instead of stopping at the first.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    MAX_SUBSYSTEM_DIM,
    Tolerance,
    basis_ket,
    identity,
    tensor_product,
    unitarity_residual,
)

__all__ = [
    "EvolutionKind",
    "Preparation",
    "MeasurementBasis",
    "Evolution",
    "BipartiteState",
    "TimeLabels",
    "Scenario",
    "Violation",
    "ValidationReport",
    "InvalidScenarioError",
    "validate_preparation",
    "validate_evolution",
    "validate_basis",
    "validate_state",
    "validate_scenario",
    "require_valid",
    "assemble_complete_state",
]


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.complex128)
    arr.setflags(write=False)
    return arr


def _column(v) -> np.ndarray:
    arr = np.array(v, dtype=np.complex128)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    arr.setflags(write=False)
    return arr


class EvolutionKind(str, enum.Enum):
    LOCAL = "local"
    JOINT = "joint"


@dataclass(frozen=True, eq=False)
class Preparation:
    """
    Amplitudes ``alpha_i`` over experimenter outcomes and the conditional
    system state ``|chi_i>`` attached to each outcome.

    The conditional states need not be mutually orthogonal.
    """

    amplitudes: np.ndarray
    conditional_states: tuple

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", _frozen(self.amplitudes).reshape(-1))
        object.__setattr__(self, "conditional_states", tuple(_column(c) for c in self.conditional_states))

    @property
    def dim_a(self) -> int:
        return int(self.amplitudes.shape[0])

    @property
    def dim_b(self) -> int:
        return int(self.conditional_states[0].shape[0]) if self.conditional_states else 0

    @property
    def outcome_probabilities(self) -> np.ndarray:
        """``p(a) = |alpha_a|^2`` as assumed by the conventional description."""
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True, eq=False)
class MeasurementBasis:
    """Projective measurement basis; ``vectors[j]`` is the ket for outcome ``j``."""

    vectors: tuple

    def __post_init__(self):
        object.__setattr__(self, "vectors", tuple(_column(v) for v in self.vectors))

    @classmethod
    def standard(cls, dim: int) -> "MeasurementBasis":
        return cls(tuple(basis_ket(j, dim) for j in range(dim)))

    @property
    def dim(self) -> int:
        return len(self.vectors)

    @property
    def matrix(self) -> np.ndarray:
        """Basis kets as the columns of a square matrix."""
        return np.hstack(self.vectors)

    def is_standard(self) -> bool:
        return all(v.shape == (self.dim, 1) for v in self.vectors) and bool(
            np.array_equal(self.matrix, identity(self.dim))
        )


@dataclass(frozen=True, eq=False)
class Evolution:
    """
    Unitary evolution between preparation and measurement.

    ``LOCAL`` carries an operator on the system alone, applied as
    ``I_A (x) V``; ``JOINT`` carries an arbitrary operator on the composite
    space, so it can describe residual experimenter/system interaction.
    """

    kind: EvolutionKind
    operator: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "kind", EvolutionKind(self.kind))
        object.__setattr__(self, "operator", _frozen(self.operator))

    @classmethod
    def local(cls, operator) -> "Evolution":
        return cls(EvolutionKind.LOCAL, operator)

    @classmethod
    def joint(cls, operator) -> "Evolution":
        return cls(EvolutionKind.JOINT, operator)

    @property
    def is_local(self) -> bool:
        return self.kind is EvolutionKind.LOCAL

    def composite_operator(self, dim_a: int) -> np.ndarray:
        """The operator acting on the composite space."""
        if self.is_local:
            return tensor_product(identity(dim_a), self.operator)
        return np.array(self.operator)


@dataclass(frozen=True, eq=False)
class BipartiteState:
    dim_a: int
    dim_b: int
    vector: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "vector", _column(self.vector))

    def amplitude_matrix(self) -> np.ndarray:
        """Amplitudes reshaped to ``(dim_a, dim_b)``: entry ``[i, k]`` is ``<i,k|psi>``."""
        return self.vector.reshape(self.dim_a, self.dim_b)


@dataclass(frozen=True)
class TimeLabels:
    """Descriptive names for the preparation and measurement stages."""

    prepared: str = "t_A"
    measured: str = "t_B"


@dataclass(frozen=True, eq=False)
class Scenario:
    """
    A complete experiment.

    ``declared_local`` is the system-only evolution the conventional
    description believes in. It is required when ``evolution`` is joint
    and must be absent otherwise.
    """

    preparation: Preparation
    evolution: Evolution
    basis_a: MeasurementBasis
    basis_b: MeasurementBasis
    declared_local: Optional[Evolution] = None
    labels: Optional[TimeLabels] = None

    @classmethod
    def build(
        cls,
        preparation: Preparation,
        evolution: Evolution,
        basis_a: MeasurementBasis | None = None,
        basis_b: MeasurementBasis | None = None,
        declared_local: Evolution | None = None,
        labels: TimeLabels | None = None,
    ) -> "Scenario":
        """Convenience constructor defaulting both bases to the standard ones."""
        return cls(
            preparation=preparation,
            evolution=evolution,
            basis_a=basis_a or MeasurementBasis.standard(preparation.dim_a),
            basis_b=basis_b or MeasurementBasis.standard(preparation.dim_b),
            declared_local=declared_local,
            labels=labels,
        )

    @property
    def dim_a(self) -> int:
        return self.preparation.dim_a

    @property
    def dim_b(self) -> int:
        return self.preparation.dim_b

    @property
    def conventional_evolution(self) -> Evolution:
        """The local evolution used by the conventional description."""
        if self.evolution.is_local:
            return self.evolution
        if self.declared_local is None:
            raise InvalidScenarioError(
                [Violation("declared_local", "joint evolution requires a declared local evolution")]
            )
        return self.declared_local


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    path: str
    message: str
    residual: Optional[float] = None

    def __str__(self):
        if self.residual is None:
            return f"{self.path}: {self.message}"
        return f"{self.path}: {self.message} (residual {self.residual:.3g})"


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    def __bool__(self):
        return not self.violations

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, path: str, message: str, residual: float | None = None) -> None:
        self.violations.append(Violation(path, message, residual))

    def extend(self, other: "ValidationReport") -> None:
        self.violations.extend(other.violations)

    def __iter__(self):
        return iter(self.violations)

    def __len__(self):
        return len(self.violations)


class InvalidScenarioError(ValueError):
    """Raised at the probability-engine boundary when inputs fail validation."""

    def __init__(self, violations: Sequence[Violation]):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations) or "invalid input")


def _check_dim(report: ValidationReport, path: str, dim: int) -> bool:
    if not 1 <= dim <= MAX_SUBSYSTEM_DIM:
        report.add(path, f"dimension {dim} outside 1..{MAX_SUBSYSTEM_DIM}")
        return False
    return True


def _finite(report: ValidationReport, path: str, arr: np.ndarray) -> bool:
    if not np.all(np.isfinite(arr)):
        report.add(path, "non-finite entries")
        return False
    return True


def validate_preparation(prep: Preparation, tol: Tolerance = DEFAULT_TOL, path: str = "preparation") -> ValidationReport:
    report = ValidationReport()
    dim_a = prep.dim_a
    if not _check_dim(report, f"{path}.amplitudes", dim_a):
        return report
    if len(prep.conditional_states) != dim_a:
        report.add(
            f"{path}.conditional_states",
            f"expected {dim_a} conditional states (one per amplitude), got {len(prep.conditional_states)}",
        )
        return report
    dim_b = prep.dim_b
    if not _check_dim(report, f"{path}.conditional_states[0]", dim_b):
        return report

    if _finite(report, f"{path}.amplitudes", prep.amplitudes):
        residual = abs(float(np.sum(np.abs(prep.amplitudes) ** 2)) - 1.0)
        if residual > tol.eps:
            report.add(f"{path}.amplitudes", "squared amplitudes must sum to 1", residual)

    for i, chi in enumerate(prep.conditional_states):
        where = f"{path}.conditional_states[{i}]"
        if chi.shape != (dim_b, 1):
            report.add(where, f"expected a length-{dim_b} column, got shape {chi.shape}")
            continue
        if not _finite(report, where, chi):
            continue
        residual = abs(float(np.sqrt(np.sum(np.abs(chi) ** 2))) - 1.0)
        if residual > tol.eps:
            report.add(where, "conditional state must have unit norm", residual)
    return report


def validate_evolution(evo: Evolution, dim_a: int, dim_b: int, tol: Tolerance = DEFAULT_TOL,
                       path: str = "evolution") -> ValidationReport:
    report = ValidationReport()
    side = dim_b if evo.is_local else dim_a * dim_b
    op = evo.operator
    if op.ndim != 2 or op.shape != (side, side):
        report.add(f"{path}.operator", f"{evo.kind.value} operator must be {side}x{side}, got shape {op.shape}")
        return report
    if not _finite(report, f"{path}.operator", op):
        return report
    residual = unitarity_residual(op)
    if residual > tol.eps:
        report.add(f"{path}.operator", "operator is not unitary", residual)
    return report


def validate_basis(basis: MeasurementBasis, dim: int, tol: Tolerance = DEFAULT_TOL,
                   path: str = "basis") -> ValidationReport:
    report = ValidationReport()
    if basis.dim != dim:
        report.add(path, f"expected {dim} basis vectors, got {basis.dim}")
        return report
    ok = True
    for j, v in enumerate(basis.vectors):
        if v.shape != (dim, 1):
            report.add(f"{path}[{j}]", f"expected a length-{dim} vector, got shape {v.shape}")
            ok = False
        elif not _finite(report, f"{path}[{j}]", v):
            ok = False
    if not ok:
        return report
    m = basis.matrix
    residual = float(np.max(np.abs(m.conj().T @ m - np.eye(dim))))
    if residual > tol.eps:
        report.add(path, "basis vectors are not orthonormal", residual)
    return report


def validate_state(state: BipartiteState, tol: Tolerance = DEFAULT_TOL, path: str = "state") -> ValidationReport:
    report = ValidationReport()
    if _check_dim(report, f"{path}.dim_a", state.dim_a) and _check_dim(report, f"{path}.dim_b", state.dim_b):
        side = state.dim_a * state.dim_b
        if state.vector.shape != (side, 1):
            report.add(f"{path}.vector", f"expected a length-{side} column, got shape {state.vector.shape}")
        elif _finite(report, f"{path}.vector", state.vector):
            residual = abs(float(np.sqrt(np.sum(np.abs(state.vector) ** 2))) - 1.0)
            if residual > tol.eps:
                report.add(f"{path}.vector", "state must have unit norm", residual)
    return report


def validate_scenario(s: Scenario, tol: Tolerance = DEFAULT_TOL) -> ValidationReport:
    """
    Check every invariant of ``s``. Never raises; an empty report means valid.
    """
    report = validate_preparation(s.preparation, tol)
    dim_a, dim_b = s.preparation.dim_a, s.preparation.dim_b
    dims_known = (
        1 <= dim_a <= MAX_SUBSYSTEM_DIM
        and len(s.preparation.conditional_states) == dim_a
        and 1 <= dim_b <= MAX_SUBSYSTEM_DIM
    )
    if not dims_known:
        # everything downstream is sized from the preparation
        return report

    report.extend(validate_evolution(s.evolution, dim_a, dim_b, tol, "evolution"))
    if s.evolution.is_local:
        if s.declared_local is not None:
            report.add("declared_local", "only allowed when the evolution is joint")
    elif s.declared_local is None:
        report.add("declared_local", "joint evolution requires a declared local evolution")
    elif not s.declared_local.is_local:
        report.add("declared_local.kind", "declared evolution must be local")
    else:
        report.extend(validate_evolution(s.declared_local, dim_a, dim_b, tol, "declared_local"))
    report.extend(validate_basis(s.basis_a, dim_a, tol, "basis_a"))
    report.extend(validate_basis(s.basis_b, dim_b, tol, "basis_b"))
    return report


def require_valid(report: ValidationReport) -> None:
    if not report.ok:
        raise InvalidScenarioError(report.violations)


def assemble_complete_state(prep: Preparation, tol: Tolerance = DEFAULT_TOL) -> BipartiteState:
    """
    Entangled experimenter/system state ``sum_i alpha_i |i>_A (x) |chi_i>``.

    Experimenter outcome ``i`` is the ``i``-th standard basis vector of H_A.
    """
    require_valid(validate_preparation(prep, tol))
    dim_a, dim_b = prep.dim_a, prep.dim_b
    psi = np.zeros((dim_a * dim_b, 1), dtype=np.complex128)
    for i, (alpha, chi) in enumerate(zip(prep.amplitudes, prep.conditional_states)):
        psi += alpha * tensor_product(basis_ket(i, dim_a), chi)
    state = BipartiteState(dim_a, dim_b, psi)
    require_valid(validate_state(state, tol))
    return state
