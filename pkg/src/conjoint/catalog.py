"""
Worked scenarios shipped as golden ``.scenario`` fixtures.

Each builder returns the :class:`~conjoint.scenario_io.ScenarioDocument`
whose canonical serialization is committed under ``conjoint/fixtures``.
"""
from __future__ import annotations

from importlib import resources
from pathlib import Path

import numpy as np

from .linalg import basis_ket, identity, tensor_product
from .model import Evolution, MeasurementBasis, Preparation, Scenario, TimeLabels
from .randomized import random_preparation, random_unitary
from .scenario_io import Metadata, ScenarioDocument

__all__ = ["FIXTURE_NAMES", "RANDOM_FIXTURE_SEED", "build", "fixture_path", "CNOT", "HADAMARD"]

_R2 = 1 / np.sqrt(2)

# A controls B in the (A-major, B-minor) composite ordering
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) * _R2
RANDOM_FIXTURE_SEED = 20261016

_KET0, _KET1 = basis_ket(0, 2), basis_ket(1, 2)
_PLUS = (_KET0 + _KET1) * _R2


def _bell_prep() -> Preparation:
    return Preparation([_R2, _R2], (_KET0, _KET1))


def bell() -> ScenarioDocument:
    s = Scenario.build(_bell_prep(), Evolution.local(identity(2)), labels=TimeLabels())
    return ScenarioDocument(s, Metadata("bell", "Experimenter maximally entangled with a qubit; no evolution."))


def single_outcome() -> ScenarioDocument:
    s = Scenario.build(Preparation([1.0], (_KET0,)), Evolution.local(identity(2)))
    return ScenarioDocument(s, Metadata("single-outcome", "One preparation outcome; the final outcome is certain."))


def non_orthogonal() -> ScenarioDocument:
    s = Scenario.build(Preparation([_R2, _R2], (_KET0, _PLUS)), Evolution.local(identity(2)))
    return ScenarioDocument(s, Metadata("non-orthogonal", "Conditional states |0> and |+> overlap; no evolution."))


def cnot_interaction() -> ScenarioDocument:
    s = Scenario.build(
        _bell_prep(),
        Evolution.joint(CNOT),
        declared_local=Evolution.local(identity(2)),
        labels=TimeLabels(),
    )
    return ScenarioDocument(s, Metadata(
        "cnot-interaction",
        "Residual controlled-NOT from the experimenter onto the system; the conventional "
        "description believes nothing happens.",
    ))


def embedded_local_joint() -> ScenarioDocument:
    s = Scenario.build(
        Preparation([_R2, _R2], (_KET0, _PLUS)),
        Evolution.joint(tensor_product(identity(2), HADAMARD)),
        declared_local=Evolution.local(HADAMARD),
    )
    return ScenarioDocument(s, Metadata(
        "embedded-local-joint", "Joint evolution I (x) H, i.e. no interaction; declared evolution H.",
    ))


def random_seeded() -> ScenarioDocument:
    rng = np.random.default_rng(RANDOM_FIXTURE_SEED)
    dim_a, dim_b = 2, 3
    prep = random_preparation(rng, dim_a, dim_b)
    s = Scenario.build(
        prep,
        Evolution.joint(random_unitary(rng, dim_a * dim_b)),
        basis_b=MeasurementBasis(tuple(random_unitary(rng, dim_b).T)),
        declared_local=Evolution.local(random_unitary(rng, dim_b)),
    )
    return ScenarioDocument(s, Metadata(
        "random-seeded", f"Random 2x3 joint scenario from numpy default_rng({RANDOM_FIXTURE_SEED}).",
    ))


_BUILDERS = {
    "bell": bell,
    "single-outcome": single_outcome,
    "non-orthogonal": non_orthogonal,
    "cnot-interaction": cnot_interaction,
    "embedded-local-joint": embedded_local_joint,
    "random-seeded": random_seeded,
}
FIXTURE_NAMES = tuple(_BUILDERS)


def build(name: str) -> ScenarioDocument:
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(FIXTURE_NAMES)}") from None


def fixture_path(name: str) -> Path:
    """Filesystem path of the committed ``<name>.scenario`` fixture."""
    if name not in _BUILDERS:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(FIXTURE_NAMES)}")
    return Path(str(resources.files("conjoint") / "fixtures" / f"{name}.scenario"))
