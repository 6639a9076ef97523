"""Complex linear algebra kernels shared by the whole simulator.

Deterministic wrappers around numpy/scipy primitives: Kronecker products,
Hermitian eigendecompositions with a fixed eigenvector phase convention,
the zeroth-order Bessel function of the first kind, and seeded circularly
symmetric complex Gaussian sampling on counter-based streams.
"""
from __future__ import annotations

import numbers
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import j0 as _scipy_j0

# Relative tolerance for treating a matrix as Hermitian.
HERMITIAN_TOL = 1e-10


@dataclass(frozen=True)
class EigenDecomposition:
    """Result of a Hermitian eigendecomposition.

    eigenvalues are real and sorted in descending order; eigenvectors are
    the matching unitary columns with the phase convention applied (the
    entry of largest modulus in each column is real and non-negative).
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass(frozen=True)
class RngStream:
    """Counter-based random stream addressed by (seed, stream id).

    An identical (seed, stream) pair always reproduces the same sample
    sequence, and distinct stream ids are statistically independent, so
    per-UE / per-TTI / per-realization streams can be consumed in any
    order without changing results.
    """

    seed: int
    stream: Union[int, tuple] = 0

    def generator(self) -> np.random.Generator:
        """Fresh Philox generator positioned at the start of the stream."""
        key = (self.stream,) if isinstance(self.stream, numbers.Integral) else tuple(self.stream)
        ss = np.random.SeedSequence(entropy=int(self.seed), spawn_key=tuple(int(k) for k in key))
        return np.random.Generator(np.random.Philox(ss))


def substream(seed: int, *path: int) -> np.random.Generator:
    """Generator for the stream addressed by an integer path under ``seed``."""
    return RngStream(seed, tuple(path)).generator()


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise ValueError("rng must be an RngStream or numpy Generator")


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two vectors or matrices."""
    return np.kron(np.asarray(a), np.asarray(b))


def kron_vec_apply(a: np.ndarray, b: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Compute (a kron b) @ x without materializing the product matrix.

    With a of shape (m, n) and b of shape (p, q), x must have length n*q
    laid out so that index i = i_a * q + i_b, matching ``kron``. The
    result has length m*p at cost O(m*n*q + n*p*q) instead of O(m*n*p*q).
    """
    a = np.asarray(a)
    b = np.asarray(b)
    x = np.asarray(x)
    m, n = a.shape
    p, q = b.shape
    if x.shape != (n * q,):
        raise ValueError(f"operand has shape {x.shape}, expected ({n * q},)")
    xm = x.reshape(n, q)
    return (a @ xm @ b.T).reshape(m * p)


def _fix_eigvec_phases(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-modulus entry is real non-negative.

    Ties in modulus resolve to the first (lowest-index) entry, which keeps
    the convention deterministic.
    """
    idx = np.argmax(np.abs(vectors), axis=0)
    pivots = vectors[idx, np.arange(vectors.shape[1])]
    mods = np.abs(pivots)
    phases = np.where(mods > 0, pivots / np.where(mods > 0, mods, 1.0), 1.0)
    return vectors * np.conj(phases)[None, :]


def hermitian_evd(a: np.ndarray) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    The input must be square and Hermitian within a relative tolerance of
    1e-10; it is symmetrized internally before the solve. Eigenvector
    phases follow the module convention so that repeated calls on equal
    inputs return identical arrays.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    scale = max(1.0, float(np.linalg.norm(a)))
    defect = float(np.linalg.norm(a - a.conj().T))
    if defect > HERMITIAN_TOL * scale:
        raise ValueError(f"matrix is not Hermitian (relative defect {defect / scale:.3e})")
    sym = (a + a.conj().T) / 2.0
    w, v = np.linalg.eigh(sym)
    order = np.argsort(-w, kind="stable")
    w = w[order]
    v = _fix_eigvec_phases(v[:, order])
    return EigenDecomposition(eigenvalues=w, eigenvectors=v)


def dominant_eigenvectors(a: np.ndarray, k: int) -> np.ndarray:
    """The k eigenvectors of a Hermitian matrix with largest eigenvalues.

    Columns are ordered by descending eigenvalue; ties keep the solver's
    original order and each column carries the deterministic phase fix.
    """
    a = np.asarray(a)
    if not 1 <= k <= a.shape[0]:
        raise ValueError(f"k must lie in [1, {a.shape[0]}], got {k}")
    return hermitian_evd(a).eigenvectors[:, :k]


def bessel_j0(x):
    """Zeroth-order Bessel function of the first kind, elementwise."""
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("bessel_j0 requires finite input")
    out = _scipy_j0(arr)
    if np.isscalar(x) or arr.ndim == 0:
        return float(out)
    return out


def complex_gaussian(rng, shape, covariance: np.ndarray | None = None) -> np.ndarray:
    """Zero-mean circularly symmetric complex Gaussian sample.

    With covariance None the entries are i.i.d. unit-variance (real and
    imaginary parts each carry variance 1/2). A covariance matrix, which
    must be Hermitian PSD, is applied along the last axis via its
    eigenfactorization; an all-zero covariance yields the zero vector.
    """
    gen = _as_generator(rng)
    if isinstance(shape, numbers.Integral):
        shape = (int(shape),)
    else:
        shape = tuple(int(s) for s in shape)
    z = (gen.standard_normal(shape) + 1j * gen.standard_normal(shape)) / np.sqrt(2.0)
    if covariance is None:
        return z
    cov = np.asarray(covariance, dtype=complex)
    n = shape[-1]
    if cov.shape != (n, n):
        raise ValueError(f"covariance shape {cov.shape} does not match dimension {n}")
    dec = hermitian_evd(cov)
    w = dec.eigenvalues
    lead = float(w[0]) if w.size else 0.0
    if w.size and float(w[-1]) < -1e-10 * max(1.0, lead):
        raise ValueError("covariance is not positive semidefinite")
    factor = dec.eigenvectors * np.sqrt(np.clip(w, 0.0, None))[None, :]
    return z @ factor.T
