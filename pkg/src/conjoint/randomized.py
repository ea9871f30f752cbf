"""Random states, unitaries and scenarios for property tests and fixtures."""
from __future__ import annotations

import numpy as np

from .linalg import identity, tensor_product
from .model import Evolution, MeasurementBasis, Preparation, Scenario

__all__ = [
    "random_complex",
    "random_unit_vector",
    "random_unitary",
    "random_preparation",
    "random_scenario",
    "embed_local",
]


def random_complex(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_unit_vector(rng: np.random.Generator, n: int) -> np.ndarray:
    v = random_complex(rng, (n, 1))
    return v / np.linalg.norm(v)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-distributed unitary from the QR orthonormalization of a Ginibre matrix."""
    q, r = np.linalg.qr(random_complex(rng, (n, n)))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_preparation(rng: np.random.Generator, dim_a: int, dim_b: int) -> Preparation:
    """Random normalized amplitudes with generally non-orthogonal conditional states."""
    alpha = random_complex(rng, dim_a)
    alpha /= np.linalg.norm(alpha)
    return Preparation(alpha, tuple(random_unit_vector(rng, dim_b) for _ in range(dim_a)))


def random_scenario(rng: np.random.Generator, dim_a: int, dim_b: int, *, joint: bool = False,
                    random_bases: bool = False) -> Scenario:
    """
    Random scenario. Joint scenarios get a random operator on the composite
    space and a random declared local evolution; ``random_bases`` replaces
    both standard measurement bases by random orthonormal ones.
    """
    prep = random_preparation(rng, dim_a, dim_b)
    v = random_unitary(rng, dim_b)
    if joint:
        evolution = Evolution.joint(random_unitary(rng, dim_a * dim_b))
        declared = Evolution.local(v)
    else:
        evolution, declared = Evolution.local(v), None
    if random_bases:
        basis_a = MeasurementBasis(tuple(random_unitary(rng, dim_a).T))
        basis_b = MeasurementBasis(tuple(random_unitary(rng, dim_b).T))
    else:
        basis_a, basis_b = MeasurementBasis.standard(dim_a), MeasurementBasis.standard(dim_b)
    return Scenario(prep, evolution, basis_a, basis_b, declared)


def embed_local(v: np.ndarray, dim_a: int) -> Evolution:
    """The non-interacting joint evolution ``I_A (x) V``."""
    return Evolution.joint(tensor_product(identity(dim_a), v))
