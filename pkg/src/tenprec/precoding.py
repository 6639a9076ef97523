"""Downlink precoders: MRT, ZF, and their tensor (Kronecker) variants.

ZF projects the target channel onto the orthogonal complement of the
interference subspace taken from an eigendecomposition of the full
M_BS x M_BS interference Gram, which costs O(M_BS^3) per UE. The tensor
variants operate on the horizontal and vertical sub-array factors only:
TMRT beamforms each factor independently and TZF removes the Kronecker
product of two sub-array interference projectors, applied through a
reshape identity so the M_BS x M_BS projector is never materialized.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneracyError, InfeasibilityError
from .linalg import dominant_eigenvectors, hermitian_evd, kron

# Relative threshold under which a projected channel counts as annihilated.
PROJECTION_TOL = 1e-12


@dataclass(frozen=True)
class Precoder:
    """One UE's precoding vector with its method tag and power budget.

    The constructor normalizes so that ||f||^2 equals ``power_budget``
    exactly, which keeps per-TTI transmit power bookkeeping trivial.
    """

    f: np.ndarray
    method: str
    power_budget: float


@dataclass(frozen=True)
class ProjectorPair:
    """Horizontal and vertical interference projectors used by TZF."""

    k_h: np.ndarray
    k_v: np.ndarray


@dataclass(frozen=True)
class PrecoderSet:
    """All per-UE precoders for one method at one design instant."""

    precoders: tuple
    e_tx_total: float

    def __post_init__(self):
        spent = sum(float(np.vdot(p.f, p.f).real) for p in self.precoders)
        if spent > self.e_tx_total + 1e-9:
            raise ValueError("precoder set exceeds the total power budget")

    def vectors(self) -> np.ndarray:
        return np.stack([p.f for p in self.precoders])


def allocate_power(e_tx_total: float, u_count: int) -> np.ndarray:
    """Equal per-UE power split of the total downlink budget."""
    if e_tx_total < 0:
        raise ValueError("total power must be >= 0")
    if u_count < 1:
        raise ValueError("u_count must be >= 1")
    return np.full(u_count, e_tx_total / u_count)


def interference_matrix(channels: np.ndarray, u: int) -> np.ndarray:
    """Stack h_j^H for every user j != u (0-based u) as matrix rows."""
    channels = np.asarray(channels)
    if channels.ndim != 2:
        raise ValueError("channels must be a (U, M) matrix")
    if not 0 <= u < channels.shape[0]:
        raise ValueError("user index out of range")
    return np.conj(np.delete(channels, u, axis=0))


def _normalized(w: np.ndarray, reference: np.ndarray, e_tx_u: float,
                method: str) -> Precoder:
    norm = float(np.linalg.norm(w))
    ref = float(np.linalg.norm(reference))
    if ref == 0.0:
        raise DegeneracyError(f"{method}: zero channel vector")
    if norm < PROJECTION_TOL * ref:
        raise DegeneracyError(f"{method}: projection annihilated the channel")
    return Precoder(f=np.sqrt(e_tx_u) * w / norm, method=method, power_budget=float(e_tx_u))


def mrt(h: np.ndarray, e_tx_u: float) -> Precoder:
    """Maximum ratio transmission: f = sqrt(E) h / ||h||."""
    h = np.asarray(h, dtype=complex)
    if e_tx_u < 0:
        raise ValueError("power budget must be >= 0")
    return _normalized(h, h, e_tx_u, "mrt")


def _dominant_factors(gram: np.ndarray, rank: int) -> np.ndarray:
    """Orthonormal basis of the ``rank`` dominant eigenvectors of a Gram."""
    v = dominant_eigenvectors(gram, rank)
    defect = float(np.linalg.norm(v.conj().T @ v - np.eye(rank)))
    if defect > 1e-9:
        raise DegeneracyError("interference subspace basis lost orthonormality")
    return v


def interference_gram(h_tilde: np.ndarray) -> np.ndarray:
    """Gram matrix H~^H H~ of an interference matrix with rows h_j^H."""
    h_tilde = np.asarray(h_tilde)
    return h_tilde.conj().T @ h_tilde


def zf(h_u: np.ndarray, h_tilde: np.ndarray, e_tx_u: float) -> Precoder:
    """Zero-forcing precoder through an interference-subspace projection.

    The U-1 dominant eigenvectors V of the full interference Gram define
    P = I - V V^H and f = sqrt(E) P h_u / ||P h_u||. With an empty
    interference matrix this reduces to MRT. Requires M_BS >= U.
    """
    h_u = np.asarray(h_u, dtype=complex)
    h_tilde = np.asarray(h_tilde, dtype=complex)
    if e_tx_u < 0:
        raise ValueError("power budget must be >= 0")
    m = h_u.shape[0]
    n_int = h_tilde.shape[0] if h_tilde.size else 0
    if m < n_int + 1:
        raise InfeasibilityError(f"zf needs M_BS >= U, got M_BS={m}, U={n_int + 1}")
    if n_int == 0:
        pre = mrt(h_u, e_tx_u)
        return Precoder(f=pre.f, method="zf", power_budget=pre.power_budget)
    v = _dominant_factors(interference_gram(h_tilde), n_int)
    w = h_u - v @ (v.conj().T @ h_u)
    return _normalized(w, h_u, e_tx_u, "zf")


def tmrt(h_h: np.ndarray, h_v: np.ndarray, e_tx_u: float) -> Precoder:
    """Tensor MRT: per-factor beamforming f = f_H kron f_V.

    Each factor is E^(1/4) h_X / ||h_X||, so the Kronecker product meets
    the power budget exactly.
    """
    h_h = np.asarray(h_h, dtype=complex)
    h_v = np.asarray(h_v, dtype=complex)
    if e_tx_u < 0:
        raise ValueError("power budget must be >= 0")
    n_h = float(np.linalg.norm(h_h))
    n_v = float(np.linalg.norm(h_v))
    if n_h == 0.0 or n_v == 0.0:
        raise DegeneracyError("tmrt: zero sub-array channel")
    root = e_tx_u ** 0.25
    f = kron(root * h_h / n_h, root * h_v / n_v)
    return Precoder(f=f, method="tmrt", power_budget=float(e_tx_u))


def tzf_feasible(m_h: int, m_v: int, u_count: int) -> bool:
    """TZF needs min(M_H, M_V) > U - 1 so both factors keep signal space."""
    return min(m_h, m_v) > u_count - 1


def tzf_projector_pair(h_tilde_h: np.ndarray, h_tilde_v: np.ndarray) -> ProjectorPair:
    """Dense sub-array interference projectors (K_H, K_V) for inspection.

    Each projector spans the U-1 dominant eigenvectors of its sub-array
    interference Gram. The TZF construction itself applies the thin
    factors and never forms these matrices.
    """
    n_int = np.asarray(h_tilde_h).shape[0]
    v_h = _dominant_factors(interference_gram(h_tilde_h), n_int)
    v_v = _dominant_factors(interference_gram(h_tilde_v), n_int)
    return ProjectorPair(k_h=v_h @ v_h.conj().T, k_v=v_v @ v_v.conj().T)


def tzf(h_h_u: np.ndarray, h_v_u: np.ndarray, h_tilde_h: np.ndarray,
        h_tilde_v: np.ndarray, e_tx_u: float) -> Precoder:
    """Tensor ZF: remove the Kronecker interference projector K_H kron K_V.

    The tensor channel t = h_H kron h_V is projected as
    t - (V_H V_H^H kron V_V V_V^H) t, evaluated through the reshape
    identity (A kron B) vec(X) = vec(A X B^T) with thin factors, at cost
    O(M_BS (U - 1)) after two sub-array eigendecompositions.
    """
    h_h_u = np.asarray(h_h_u, dtype=complex)
    h_v_u = np.asarray(h_v_u, dtype=complex)
    h_tilde_h = np.asarray(h_tilde_h, dtype=complex)
    h_tilde_v = np.asarray(h_tilde_v, dtype=complex)
    if e_tx_u < 0:
        raise ValueError("power budget must be >= 0")
    m_h = h_h_u.shape[0]
    m_v = h_v_u.shape[0]
    n_int = h_tilde_h.shape[0] if h_tilde_h.size else 0
    if h_tilde_v.size and h_tilde_v.shape[0] != n_int:
        raise ValueError("sub-array interference matrices disagree on user count")
    if not tzf_feasible(m_h, m_v, n_int + 1):
        raise InfeasibilityError(
            f"tzf needs min(M_H, M_V) > U - 1, got ({m_h}, {m_v}) with U={n_int + 1}")
    t = kron(h_h_u, h_v_u)
    if n_int == 0:
        pre = tmrt(h_h_u, h_v_u, e_tx_u)
        return Precoder(f=pre.f, method="tzf", power_budget=pre.power_budget)
    v_h = _dominant_factors(interference_gram(h_tilde_h), n_int)
    v_v = _dominant_factors(interference_gram(h_tilde_v), n_int)
    tm = t.reshape(m_h, m_v)
    core = v_h.conj().T @ tm @ np.conj(v_v)
    w = t - (v_h @ core @ v_v.T).reshape(m_h * m_v)
    return _normalized(w, t, e_tx_u, "tzf")


def column_space_projector(gram: np.ndarray, max_rank: int,
                           rel_threshold: float = 1e-10) -> np.ndarray:
    """Projector onto the column space of a Hermitian PSD Gram matrix.

    Keeps at most ``max_rank`` dominant eigenvectors but drops directions
    whose eigenvalue falls below ``rel_threshold`` times the largest, so
    a numerically rank-deficient Gram yields a projector of its true
    column-space rank rather than a padded one.
    """
    dec = hermitian_evd(np.asarray(gram))
    w = dec.eigenvalues
    if max_rank < 1 or max_rank > w.size:
        raise ValueError("max_rank out of range")
    lead = float(w[0])
    if lead <= 0.0:
        return np.zeros_like(np.asarray(gram), dtype=complex)
    rank = int(np.sum(w[:max_rank] > rel_threshold * lead))
    v = dec.eigenvectors[:, :rank]
    return v @ v.conj().T
