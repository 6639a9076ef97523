"""Uplink pilot transmission and least-squares channel estimation.

Users send orthogonal DFT-row pilots of length L >= U; the BS stacks the
received symbols into an M x L matrix and correlates with each pilot to
obtain per-UE least-squares estimates. Sub-array estimation applies the
same correlation to the horizontal/vertical sub-array rows only, which is
what makes the tensor precoders cheap to feed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import SubArrayIndexSets
from .errors import ConfigError
from .linalg import complex_gaussian


@dataclass
class CsiEstimate:
    """Channel estimates for one UE acquired at one uplink TTI.

    mode "full" fills ``h_hat``; mode "subarray" fills ``h_hat_h`` and
    ``h_hat_v``. ``acquired_tti`` records the TTI the estimate is from.
    """

    mode: str
    acquired_tti: int
    h_hat: np.ndarray | None = None
    h_hat_h: np.ndarray | None = None
    h_hat_v: np.ndarray | None = None


def generate_pilots(u_count: int, length: int) -> np.ndarray:
    """Orthogonal pilot sequences as rows of a (u_count, length) matrix.

    Row u holds the DFT sequence exp(-2 pi j u l / length); distinct rows
    are orthogonal with p_i^H p_j = length * delta_ij.
    """
    if u_count < 1:
        raise ValueError("u_count must be >= 1")
    if length < u_count:
        raise ConfigError(f"pilot length {length} shorter than user count {u_count}")
    u = np.arange(u_count)[:, None]
    l = np.arange(length)[None, :]
    return np.exp(-2j * np.pi * u * l / length)


def uplink_receive(channels: np.ndarray, pilots: np.ndarray, e_p: float,
                   noise_var: float, rng) -> np.ndarray:
    """Received uplink block X = sqrt(E_P) sum_u h_u p_u^H + noise.

    ``channels`` has shape (..., U, M); the result has shape (..., M, L).
    Noise entries are i.i.d. complex Gaussian with variance ``noise_var``.
    """
    channels = np.asarray(channels)
    pilots = np.asarray(pilots)
    if e_p < 0:
        raise ValueError("pilot energy must be >= 0")
    if noise_var < 0:
        raise ValueError("noise variance must be >= 0")
    if channels.shape[-2] != pilots.shape[0]:
        raise ValueError("channel and pilot user counts differ")
    x = np.sqrt(e_p) * np.einsum("...um,ul->...ml", channels, np.conj(pilots))
    if noise_var > 0:
        x = x + np.sqrt(noise_var) * complex_gaussian(rng, x.shape)
    return x


def _correlate_rows(x_rows: np.ndarray, pilot: np.ndarray, e_p: float) -> np.ndarray:
    length = pilot.shape[-1]
    return x_rows @ pilot / (length * np.sqrt(e_p))


def ls_estimate(x: np.ndarray, pilot: np.ndarray, e_p: float) -> np.ndarray:
    """Full-array least-squares estimate (1 / (L sqrt(E_P))) X p_u.

    Reads every antenna row of X; the estimation error per coefficient is
    zero-mean with variance noise_var / (L * E_P).
    """
    x = np.asanyarray(x)
    pilot = np.asarray(pilot)
    if e_p <= 0:
        raise ValueError("pilot energy must be > 0 for estimation")
    if x.shape[-1] != pilot.shape[-1]:
        raise ValueError("pilot length does not match received block")
    rows = x[..., np.arange(x.shape[-2]), :]
    return _correlate_rows(rows, pilot, e_p)


def ls_estimate_subarrays(x: np.ndarray, index_sets: SubArrayIndexSets,
                          pilot: np.ndarray, e_p: float) -> tuple[np.ndarray, np.ndarray]:
    """Sub-array least-squares estimates (horizontal, vertical).

    Only the M_H + M_V - 1 distinct antenna rows named by the index sets
    are read from X; per-row arithmetic is identical to the full-array
    estimator restricted to those rows.
    """
    x = np.asanyarray(x)
    pilot = np.asarray(pilot)
    if e_p <= 0:
        raise ValueError("pilot energy must be > 0 for estimation")
    if x.shape[-1] != pilot.shape[-1]:
        raise ValueError("pilot length does not match received block")
    rows_h = x[..., np.asarray(index_sets.i_h, dtype=int) - 1, :]
    rows_v = x[..., np.asarray(index_sets.i_v, dtype=int) - 1, :]
    return _correlate_rows(rows_h, pilot, e_p), _correlate_rows(rows_v, pilot, e_p)
