"""Link-quality metrics, subspace distances, and runtime measurement."""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

UNIT_TOL = 1e-9


@dataclass(frozen=True)
class SinrReport:
    """Per-UE downlink SINR split into its power components.

    ``sinr`` is recomputed from the stored powers, so the report cannot
    drift out of sync with its inputs.
    """

    desired: float
    interference: float
    noise: float

    @property
    def sinr(self) -> float:
        return self.desired / (self.interference + self.noise)


@dataclass(frozen=True)
class RuntimeEcdf:
    """Sorted per-invocation durations (seconds) for one labelled method."""

    label: str
    samples: np.ndarray

    def quantile(self, q: float) -> float:
        if not 0.0 <= q <= 1.0:
            raise ValueError("quantile must lie in [0, 1]")
        return float(np.quantile(self.samples, q))

    @property
    def median(self) -> float:
        return self.quantile(0.5)


def _precoder_vectors(precoders) -> np.ndarray:
    from .precoding import Precoder, PrecoderSet

    if isinstance(precoders, PrecoderSet):
        return precoders.vectors()
    if isinstance(precoders, np.ndarray):
        return precoders
    return np.stack([p.f if isinstance(p, Precoder) else np.asarray(p) for p in precoders])


def sinr(true_channels: np.ndarray, precoders, noise_var: float, u: int) -> SinrReport:
    """SINR of user u (0-based) under the given precoders and true channels.

    desired = |h_u^H f_u|^2, interference sums |h_u^H f_j|^2 over j != u.
    """
    channels = np.asarray(true_channels)
    f = _precoder_vectors(precoders)
    if noise_var <= 0:
        raise ValueError("noise variance must be > 0")
    if not 0 <= u < channels.shape[0]:
        raise ValueError("user index out of range")
    cross = np.abs(channels[u].conj() @ f.T) ** 2
    desired = float(cross[u])
    interference = float(np.sum(cross) - cross[u])
    return SinrReport(desired=desired, interference=interference, noise=float(noise_var))


def sinr_all(channels: np.ndarray, precoders: np.ndarray, noise_var: float) -> np.ndarray:
    """Vectorized linear SINR for every user, shape (..., U).

    ``channels`` and ``precoders`` are (..., U, M) with matching leading
    axes; entry u of the result matches ``sinr(..., u=u)``.
    """
    h = np.asarray(channels)
    f = np.asarray(precoders)
    if noise_var <= 0:
        raise ValueError("noise variance must be > 0")
    cross = np.abs(np.einsum("...um,...jm->...uj", np.conj(h), f)) ** 2
    desired = np.einsum("...uu->...u", cross)
    interference = cross.sum(axis=-1) - desired
    return desired / (interference + noise_var)


def sum_rate(sinrs) -> float:
    """Instantaneous sum rate in b/s/Hz: sum of log2(1 + SINR_u)."""
    values = np.asarray([s.sinr if isinstance(s, SinrReport) else s for s in np.atleast_1d(sinrs)],
                        dtype=float)
    if np.any(values < 0):
        raise ValueError("SINRs must be >= 0")
    return float(np.sum(np.log2(1.0 + values)))


def chordal_distance_sq(u: np.ndarray, v: np.ndarray) -> float:
    """Squared chordal distance 1 - |u^H v|^2 between unit vectors."""
    u = np.asarray(u)
    v = np.asarray(v)
    if abs(np.linalg.norm(u) - 1.0) > UNIT_TOL or abs(np.linalg.norm(v) - 1.0) > UNIT_TOL:
        raise ValueError("chordal distance requires unit-norm inputs")
    overlap = abs(np.vdot(u, v)) ** 2
    return float(min(1.0, max(0.0, 1.0 - overlap)))


def subspace_chordal_distance_sq(basis_a: np.ndarray, basis_b: np.ndarray) -> float:
    """Normalized squared chordal distance between two k-dim subspaces.

    Bases must have orthonormal columns of equal count k; the distance is
    (k - ||A^H B||_F^2) / k, which lies in [0, 1] and reduces to the
    vector version for k = 1.
    """
    a = np.asarray(basis_a)
    b = np.asarray(basis_b)
    if a.ndim != 2 or a.shape != b.shape:
        raise ValueError("bases must share one (n, k) shape")
    k = a.shape[1]
    for mat in (a, b):
        if np.linalg.norm(mat.conj().T @ mat - np.eye(k)) > 1e-8:
            raise ValueError("basis columns must be orthonormal")
    overlap = float(np.linalg.norm(a.conj().T @ b) ** 2)
    return float(min(1.0, max(0.0, (k - overlap) / k)))


def sample_covariance(realizations: np.ndarray) -> np.ndarray:
    """Hermitian sample covariance (1/N) sum_n h_n h_n^H of stacked rows."""
    x = np.asarray(realizations)
    if x.ndim != 2 or x.shape[0] < 1:
        raise ValueError("realizations must be a non-empty (N, M) stack")
    c = x.T @ x.conj() / x.shape[0]
    return (c + c.conj().T) / 2.0


def measure_runtime(procedure: Callable[[], object], repetitions: int,
                    label: str = "") -> RuntimeEcdf:
    """Wall-clock duration of each invocation on the monotonic clock.

    The first 10% of invocations are treated as warm-up and discarded;
    remaining samples are returned sorted ascending.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    durations = np.empty(repetitions)
    for i in range(repetitions):
        t0 = time.perf_counter_ns()
        procedure()
        durations[i] = (time.perf_counter_ns() - t0) * 1e-9
    discard = int(0.1 * repetitions)
    return RuntimeEcdf(label=label, samples=np.sort(durations[discard:]))
