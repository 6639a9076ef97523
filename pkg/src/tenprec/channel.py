"""Rician fading channel over a uniform planar array (UPA).

The BS array has M_H columns and M_V rows in the x-z plane; element m
(1-based) corresponds to column m_H and row m_V through
m = m_V + (m_H - 1) * M_V, so the full steering vector factors as the
Kronecker product of a horizontal and a vertical steering vector. The
line-of-sight component is a phased steering vector, the diffuse
component follows a first-order Gauss-Markov recursion, and the two are
mixed by the Rician K-factor.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .linalg import bessel_j0, complex_gaussian


@dataclass(frozen=True)
class ArrayGeometry:
    """UPA dimensions and spacings (meters), plus the carrier wavelength."""

    m_h: int
    m_v: int
    spacing_h: float
    spacing_v: float
    wavelength: float

    def __post_init__(self):
        if self.m_h < 1 or self.m_v < 1:
            raise ValueError("array dimensions must be >= 1")
        if self.spacing_h <= 0 or self.spacing_v <= 0 or self.wavelength <= 0:
            raise ValueError("spacings and wavelength must be > 0")

    @property
    def size(self) -> int:
        return self.m_h * self.m_v

    @classmethod
    def half_wavelength(cls, m_h: int, m_v: int, wavelength: float) -> "ArrayGeometry":
        d = wavelength / 2.0
        return cls(m_h=m_h, m_v=m_v, spacing_h=d, spacing_v=d, wavelength=wavelength)

    def element_index(self, m_h: int, m_v: int) -> int:
        """1-based linear element index of column m_h, row m_v."""
        if not (1 <= m_h <= self.m_h and 1 <= m_v <= self.m_v):
            raise ValueError("element coordinates out of range")
        return m_v + (m_h - 1) * self.m_v


@dataclass(frozen=True)
class GainModel:
    """Per-element amplitude gain pattern.

    evaluator maps (theta, phi, element index m, 1-based) to a
    non-negative power gain; the steering vector is scaled by its square
    root. The isotropic model returns 1 everywhere.
    """

    evaluator: Callable[[float, float, int], float]

    def vector(self, geometry: ArrayGeometry, theta: float, phi: float) -> np.ndarray:
        g = np.array([float(self.evaluator(theta, phi, m))
                      for m in range(1, geometry.size + 1)], dtype=float)
        if np.any(g < 0) or not np.all(np.isfinite(g)):
            raise ValueError("element gains must be finite and >= 0")
        return g


ISOTROPIC = GainModel(evaluator=lambda theta, phi, m: 1.0)


@dataclass(frozen=True)
class SubArrayIndexSets:
    """1-based element indices of the horizontal and vertical sub-arrays."""

    i_h: np.ndarray
    i_v: np.ndarray


def subarray_index_sets(geometry: ArrayGeometry) -> SubArrayIndexSets:
    """Horizontal sub-array (first row) and vertical sub-array (first column).

    i_h = {1 + (m_h - 1) M_V : m_h = 1..M_H} and i_v = {1..M_V}; the two
    sets share exactly element 1.
    """
    i_h = 1 + np.arange(geometry.m_h) * geometry.m_v
    i_v = 1 + np.arange(geometry.m_v)
    return SubArrayIndexSets(i_h=i_h, i_v=i_v)


def extract_subarray(h: np.ndarray, indices: np.ndarray) -> np.ndarray:
    """Gather channel entries at 1-based element indices (last axis)."""
    h = np.asarray(h)
    idx = np.asarray(indices, dtype=int)
    if idx.size and (idx.min() < 1 or idx.max() > h.shape[-1]):
        raise ValueError("element indices out of range")
    return h[..., idx - 1]


def steering_horizontal(geometry: ArrayGeometry, theta, phi) -> np.ndarray:
    """Horizontal steering vector(s), shape (..., M_H).

    Entry m_h is exp(-j (2 pi / lambda) d_H (m_h - 1) cos(theta) cos(phi));
    the first entry is exactly 1.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    coef = 2.0 * np.pi / geometry.wavelength * geometry.spacing_h
    spatial = coef * np.cos(theta) * np.cos(phi)
    steps = np.arange(geometry.m_h)
    return np.exp(-1j * spatial[..., None] * steps)


def steering_vertical(geometry: ArrayGeometry, theta) -> np.ndarray:
    """Vertical steering vector(s), shape (..., M_V).

    Entry m_v is exp(-j (2 pi / lambda) d_V (m_v - 1) sin(theta)).
    """
    theta = np.asarray(theta, dtype=float)
    coef = 2.0 * np.pi / geometry.wavelength * geometry.spacing_v
    spatial = coef * np.sin(theta)
    steps = np.arange(geometry.m_v)
    return np.exp(-1j * spatial[..., None] * steps)


def steering_full(geometry: ArrayGeometry, theta, phi,
                  gains: GainModel | None = None) -> np.ndarray:
    """Full UPA steering vector(s), shape (..., M_H * M_V).

    The Kronecker factorization a_H kron a_V in the module element order;
    a non-isotropic ``gains`` model (scalar angles only) scales element m
    by sqrt(g_m).
    """
    a_h = steering_horizontal(geometry, theta, phi)
    a_v = steering_vertical(geometry, theta)
    full = (a_h[..., :, None] * a_v[..., None, :]).reshape(*a_h.shape[:-1], geometry.size)
    if gains is not None and gains is not ISOTROPIC:
        if full.ndim != 1:
            raise ValueError("gain models support scalar angles only")
        full = np.sqrt(gains.vector(geometry, float(theta), float(phi))) * full
    return full


def los_channel(psi, a: np.ndarray) -> np.ndarray:
    """Line-of-sight channel: the steering vector rotated by exp(j psi)."""
    psi = np.asarray(psi, dtype=float)
    return np.exp(1j * psi)[..., None] * np.asarray(a)


def temporal_correlation(speed: float, wavelength: float, tti_len: float) -> float:
    """Gauss-Markov coefficient rho = J0(2 pi f_D T) with f_D = speed / lambda."""
    if speed < 0:
        raise ValueError("speed must be >= 0")
    if wavelength <= 0 or tti_len <= 0:
        raise ValueError("wavelength and tti_len must be > 0")
    return float(bessel_j0(2.0 * np.pi * speed / wavelength * tti_len))


def nlos_step(state: np.ndarray, rho: float, rng,
              covariance: np.ndarray | None = None) -> np.ndarray:
    """One Gauss-Markov update: rho * state + sqrt(1 - rho^2) * innovation.

    The innovation is a fresh zero-mean complex Gaussian with the given
    covariance (identity when None), so starting from a stationary draw
    keeps the process stationary.
    """
    state = np.asarray(state)
    if not -1.0 <= rho <= 1.0:
        raise ValueError("rho must lie in [-1, 1]")
    innovation = complex_gaussian(rng, state.shape, covariance=covariance)
    return rho * state + np.sqrt(max(0.0, 1.0 - rho * rho)) * innovation


def rician_combine(k_factor: float, h_los: np.ndarray, h_nlos: np.ndarray) -> np.ndarray:
    """Mix LOS and diffuse parts with a linear (non-dB) K-factor >= 0."""
    if not np.isfinite(k_factor) or k_factor < 0:
        raise ValueError("k_factor must be finite and >= 0")
    h_los = np.asarray(h_los)
    h_nlos = np.asarray(h_nlos)
    if h_los.shape != h_nlos.shape:
        raise ValueError("LOS and NLOS parts must have equal shapes")
    return np.sqrt(k_factor / (k_factor + 1.0)) * h_los + np.sqrt(1.0 / (k_factor + 1.0)) * h_nlos


@dataclass
class ChannelState:
    """Per-UE channel at one TTI, kept in LOS/NLOS decomposed form.

    The combined channel is recomputed from the parts, so the Rician
    identity holds by construction at every TTI.
    """

    h_los: np.ndarray
    h_nlos: np.ndarray
    k_factor: float

    @property
    def h(self) -> np.ndarray:
        return rician_combine(self.k_factor, self.h_los, self.h_nlos)
