"""
Independent checks of the probability engine.

:func:`enumerate_joint` recomputes the joint table the slow way, as
``Tr(P_ab U rho U^dagger)`` with explicit projectors and the full evolved
density matrix. It shares nothing with :mod:`conjoint.probability` beyond
the linear-algebra kernel.

:func:`sample_joint` draws outcomes from the exact table by inverse CDF.
Random numbers come from NumPy's PCG64 bit generator (PCG XSL RR 128/64)
seeded through ``numpy.random.SeedSequence``. Samples are produced in
fixed-size chunks of ``CHUNK_SIZE`` draws; chunk ``k`` uses the substream
``SeedSequence(seed, spawn_key=(k,))`` and converts each raw 64-bit output
``x`` to the double ``(x >> 11) * 2**-53``. Counts are therefore a function
of ``(scenario, n, seed)`` alone, whatever the number of workers.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    DimensionError,
    Tolerance,
    adjoint,
    identity,
    matmul,
    outer,
    tensor_product,
    trace,
)
from .model import Scenario, require_valid, validate_scenario
from .probability import JointTable

__all__ = [
    "RNG_ALGORITHM",
    "CHUNK_SIZE",
    "SampleRun",
    "enumerate_joint",
    "sample_joint",
    "tv_distance",
    "uniform_stream",
]

RNG_ALGORITHM = "numpy.PCG64/SeedSequence-chunked-v1"
CHUNK_SIZE = 1 << 16
_MAX_SEED = 2**64


@dataclass(frozen=True, eq=False)
class SampleRun:
    seed: int
    n: int
    counts: np.ndarray

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / self.n

    def empirical(self) -> JointTable:
        return JointTable(self.frequencies)


def enumerate_joint(s: Scenario, tol: Tolerance = DEFAULT_TOL) -> JointTable:
    require_valid(validate_scenario(s, tol))
    prep = s.preparation
    dim_a, dim_b = prep.dim_a, prep.dim_b

    psi = np.zeros((dim_a * dim_b, 1), dtype=np.complex128)
    for i in range(dim_a):
        for k in range(dim_b):
            psi[i * dim_b + k, 0] = prep.amplitudes[i] * prep.conditional_states[i][k, 0]

    if s.evolution.is_local:
        u = tensor_product(identity(dim_a), s.evolution.operator)
    else:
        u = np.array(s.evolution.operator)
    rho = matmul(matmul(u, outer(psi)), adjoint(u))

    p = np.empty((dim_a, dim_b))
    for a, ket_a in enumerate(s.basis_a.vectors):
        for b, ket_b in enumerate(s.basis_b.vectors):
            projector = tensor_product(outer(ket_a), outer(ket_b))
            p[a, b] = trace(matmul(projector, rho)).real
    return JointTable(p).check(tol)


def uniform_stream(seed: int, chunk: int, size: int) -> np.ndarray:
    """Doubles in ``[0, 1)`` for chunk ``chunk`` of the stream rooted at ``seed``."""
    bitgen = np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(chunk,)))
    raw = bitgen.random_raw(size)
    return (raw >> np.uint64(11)).astype(np.float64) * 2.0**-53


def _inverse_cdf(probabilities: np.ndarray) -> np.ndarray:
    flat = probabilities.ravel()
    cdf = np.cumsum(flat) / flat.sum()
    # cells past the last positive one are unreachable; close the CDF exactly
    last = int(np.flatnonzero(flat > 0)[-1])
    cdf[last:] = 1.0
    return cdf


def sample_joint(s: Scenario, n: int, seed: int, *, workers: int = 1,
                 tol: Tolerance = DEFAULT_TOL) -> SampleRun:
    """``n`` independent conjoint outcomes drawn from the exact joint table."""
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"sample count must be a positive integer, got {n!r}")
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or not 0 <= seed < _MAX_SEED:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    n, seed = int(n), int(seed)

    table = enumerate_joint(s, tol)
    cdf = _inverse_cdf(table.p)
    cells = cdf.size

    def run_chunk(k: int) -> np.ndarray:
        size = min(CHUNK_SIZE, n - k * CHUNK_SIZE)
        u = uniform_stream(seed, k, size)
        return np.bincount(np.searchsorted(cdf, u, side="right"), minlength=cells)

    chunks = range((n + CHUNK_SIZE - 1) // CHUNK_SIZE)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run_chunk, chunks))
    else:
        parts = [run_chunk(k) for k in chunks]
    counts = np.sum(parts, axis=0).astype(np.int64).reshape(table.shape)
    return SampleRun(seed, n, counts)


def tv_distance(p, q) -> float:
    """Total variation ``0.5 * sum |p - q|`` between two tables of equal shape."""
    p = p.p if isinstance(p, JointTable) else np.asarray(p, dtype=float)
    q = q.p if isinstance(q, JointTable) else np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise DimensionError(f"tables have different shapes {p.shape} and {q.shape}")
    return float(0.5 * np.abs(p - q).sum())
