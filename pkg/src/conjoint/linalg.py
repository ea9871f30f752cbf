"""
Dense complex linear algebra kernel.

Matrices are ``numpy`` complex128 arrays of rank 2; kets are ``(n, 1)``
columns. Composite spaces use the (A-index major, B-index minor) ordering
of :func:`tensor_product`, so the composite index of ``(i, k)`` is
``i * dim_b + k`` everywhere in the package.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "DimensionError",
    "Subsystem",
    "Tolerance",
    "DEFAULT_TOL",
    "ARITHMETIC_TOL",
    "MAX_SUBSYSTEM_DIM",
    "as_matrix",
    "as_column",
    "identity",
    "basis_ket",
    "matmul",
    "adjoint",
    "tensor_product",
    "trace",
    "partial_trace",
    "is_unitary",
    "unitarity_residual",
    "vector_norm",
    "inner",
    "outer",
]

MAX_SUBSYSTEM_DIM = 64


class DimensionError(ValueError):
    """Operand shapes are incompatible with the requested operation."""


class Subsystem(str, enum.Enum):
    A = "A"
    B = "B"


@dataclass(frozen=True)
class Tolerance:
    """Absolute tolerance used for structural checks (unitarity, norms)."""

    eps: float = 1e-10

    def __post_init__(self):
        eps = float(self.eps)
        if not (0.0 < eps < 1e-3):
            raise ValueError(f"tolerance eps must satisfy 0 < eps < 1e-3, got {self.eps!r}")
        object.__setattr__(self, "eps", eps)


DEFAULT_TOL = Tolerance(1e-10)
ARITHMETIC_TOL = Tolerance(1e-12)

MatrixLike = Union[np.ndarray, list, tuple]


def as_matrix(m: MatrixLike, *, name: str = "matrix") -> np.ndarray:
    """Coerce ``m`` to a finite complex128 rank-2 array."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionError(f"{name} must be a non-empty 2-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def as_column(v: MatrixLike, *, name: str = "vector") -> np.ndarray:
    """Coerce a flat sequence or an ``(n, 1)`` array to a column ket."""
    arr = np.asarray(v, dtype=np.complex128)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    arr = as_matrix(arr, name=name)
    if arr.shape[1] != 1:
        raise DimensionError(f"{name} must be a column, got shape {arr.shape}")
    return arr


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)


def basis_ket(index: int, dim: int) -> np.ndarray:
    """Standard basis column ``|index>`` of dimension ``dim``."""
    if not 0 <= index < dim:
        raise IndexError(f"basis index {index} out of range for dimension {dim}")
    ket = np.zeros((dim, 1), dtype=np.complex128)
    ket[index, 0] = 1.0
    return ket


def matmul(a: MatrixLike, b: MatrixLike) -> np.ndarray:
    a = as_matrix(a, name="left operand")
    b = as_matrix(b, name="right operand")
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape[0]}x{a.shape[1]} by {b.shape[0]}x{b.shape[1]}")
    return a @ b


def adjoint(m: MatrixLike) -> np.ndarray:
    """Conjugate transpose."""
    return as_matrix(m).conj().T.copy()


def tensor_product(a: MatrixLike, b: MatrixLike) -> np.ndarray:
    """
    Kronecker product with ``result[i*rb + k, j*cb + l] = a[i, j] * b[k, l]``.
    """
    return np.kron(as_matrix(a), as_matrix(b))


def _require_square(m: np.ndarray, what: str) -> None:
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"{what} requires a square matrix, got {m.shape[0]}x{m.shape[1]}")


def trace(m: MatrixLike) -> complex:
    m = as_matrix(m)
    _require_square(m, "trace")
    return complex(np.trace(m))


def partial_trace(m: MatrixLike, dim_a: int, dim_b: int, over: Subsystem | str) -> np.ndarray:
    """
    Trace out one factor of an operator on ``H_A (x) H_B``.

    ``over`` names the subsystem that is traced away: ``over="A"`` returns
    the ``dim_b x dim_b`` operator on B.
    """
    m = as_matrix(m)
    _require_square(m, "partial_trace")
    if m.shape[0] != dim_a * dim_b:
        raise DimensionError(
            f"matrix side {m.shape[0]} does not match dim_a*dim_b = {dim_a}*{dim_b} = {dim_a * dim_b}"
        )
    over = Subsystem(over)
    t = m.reshape(dim_a, dim_b, dim_a, dim_b)
    if over is Subsystem.A:
        return np.einsum("ikil->kl", t)
    return np.einsum("ikjk->ij", t)


def unitarity_residual(m: MatrixLike) -> float:
    """Max-entry magnitude of ``m^dagger m - I``; ``inf`` for non-square input."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        return float("inf")
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


def is_unitary(m: MatrixLike, tol: Tolerance = DEFAULT_TOL) -> bool:
    return unitarity_residual(m) <= tol.eps


def vector_norm(v: MatrixLike) -> float:
    v = as_matrix(v, name="vector")
    if v.shape[1] != 1:
        raise DimensionError(f"vector_norm requires a column, got shape {v.shape}")
    return float(np.sqrt(np.sum(np.abs(v) ** 2)))


def inner(u: MatrixLike, v: MatrixLike) -> complex:
    """``<u|v>``, antilinear in the first argument."""
    u = as_column(u, name="bra vector")
    v = as_column(v, name="ket vector")
    if u.shape != v.shape:
        raise DimensionError(f"inner product of length {u.shape[0]} and {v.shape[0]} vectors")
    return complex((u.conj().T @ v)[0, 0])


def outer(u: MatrixLike, v: MatrixLike | None = None) -> np.ndarray:
    """``|u><v|``; ``v`` defaults to ``u`` (a projector when ``u`` is a unit vector)."""
    u = as_column(u)
    v = u if v is None else as_column(v)
    return u @ v.conj().T
