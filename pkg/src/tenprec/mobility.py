"""UE trajectories and angle geometry.

Positions evolve along parametric tracks (circular around a fixed center
or straight lines at constant height). Mean elevation/azimuth angles come
from the BS-to-UE direction, small Gaussian perturbations model per-TTI
angular spread, and the wave vector feeds the Doppler phase recursion.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import _as_generator


@dataclass(frozen=True)
class TrackSpec:
    """One UE trajectory at constant height and constant speed.

    kind "circular": motion on a circle of ``radius`` around ``center``
    (z component of center is the UE height), starting at angle
    ``phase0`` rad and turning counter-clockwise for direction +1.
    kind "linear": motion from ``start`` along the horizontal unit vector
    ``heading``. Speed 0 is allowed and models a static UE.
    """

    kind: str
    speed: float
    center: tuple | None = None
    radius: float | None = None
    phase0: float = 0.0
    direction: int = 1
    start: tuple | None = None
    heading: tuple | None = None

    def __post_init__(self):
        if self.kind not in ("circular", "linear"):
            raise ValueError(f"unknown track kind {self.kind!r}")
        if not np.isfinite(self.speed) or self.speed < 0:
            raise ValueError("track speed must be finite and >= 0")
        if self.kind == "circular":
            if self.center is None or self.radius is None:
                raise ValueError("circular track requires center and radius")
            if self.radius <= 0:
                raise ValueError("circular track radius must be > 0")
            if self.direction not in (-1, 1):
                raise ValueError("circular track direction must be +1 or -1")
        else:
            if self.start is None or self.heading is None:
                raise ValueError("linear track requires start and heading")
            head = np.asarray(self.heading, dtype=float)
            if head.shape != (3,) or abs(np.linalg.norm(head) - 1.0) > 1e-9:
                raise ValueError("heading must be a unit 3-vector")
            if abs(head[2]) > 1e-12:
                raise ValueError("heading must be horizontal (z component 0)")


def advance_track(track: TrackSpec, tti: int, tti_len: float) -> tuple[np.ndarray, np.ndarray]:
    """Position and velocity (two 3-vectors) of a track at TTI index ``tti``."""
    if tti < 0:
        raise ValueError("tti must be >= 0")
    if tti_len <= 0:
        raise ValueError("tti_len must be > 0")
    t = tti * tti_len
    if track.kind == "circular":
        center = np.asarray(track.center, dtype=float)
        omega = track.direction * track.speed / track.radius
        alpha = track.phase0 + omega * t
        pos = center + track.radius * np.array([np.cos(alpha), np.sin(alpha), 0.0])
        vel = track.radius * omega * np.array([-np.sin(alpha), np.cos(alpha), 0.0])
        return pos, vel
    start = np.asarray(track.start, dtype=float)
    heading = np.asarray(track.heading, dtype=float)
    return start + track.speed * t * heading, track.speed * heading


def relative_direction(bs_position: np.ndarray, ue_position: np.ndarray) -> np.ndarray:
    """Unit vector pointing from the BS towards the UE."""
    diff = np.asarray(ue_position, dtype=float) - np.asarray(bs_position, dtype=float)
    norm = np.linalg.norm(diff)
    if norm < 1e-15:
        raise ValueError("BS and UE positions coincide")
    return diff / norm


def mean_angles(direction: np.ndarray) -> tuple[float, float]:
    """Mean (elevation, azimuth) in rad of a unit direction vector.

    Elevation is arcsin of the z component; azimuth uses atan2 and is
    therefore quadrant-correct over (-pi, pi]. The zenith direction maps
    to azimuth 0 by convention.
    """
    d = np.asarray(direction, dtype=float)
    if d.shape != (3,) or abs(np.linalg.norm(d) - 1.0) > 1e-9:
        raise ValueError("direction must be a unit 3-vector")
    theta = float(np.arcsin(np.clip(d[2], -1.0, 1.0)))
    phi = float(np.arctan2(d[1], d[0]))
    return theta, phi


def perturb_angles(theta_bar: float, phi_bar: float, sigma_theta: float,
                   sigma_phi: float, rng, size=None):
    """Mean angles plus fresh zero-mean Gaussian perturbations (rad).

    With ``size`` set, returns two arrays of that shape; the elevation
    draw always precedes the azimuth draw for stream reproducibility.
    """
    if sigma_theta < 0 or sigma_phi < 0:
        raise ValueError("angle spread must be >= 0")
    gen = _as_generator(rng)
    theta = theta_bar + gen.normal(0.0, sigma_theta, size=size)
    phi = phi_bar + gen.normal(0.0, sigma_phi, size=size)
    if size is None:
        return float(theta), float(phi)
    return theta, phi


def wave_vector(theta, phi, wavelength: float) -> np.ndarray:
    """Propagation wave vector(s) for given elevation/azimuth (rad).

    Returns (..., 3) with components (2*pi/lambda) * (cos(theta)cos(phi),
    cos(theta)sin(phi), sin(theta)).
    """
    if wavelength <= 0:
        raise ValueError("wavelength must be > 0")
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    coef = 2.0 * np.pi / wavelength
    return coef * np.stack([np.cos(theta) * np.cos(phi),
                            np.cos(theta) * np.sin(phi),
                            np.sin(theta)], axis=-1)


def doppler_phase_step(k: np.ndarray, velocity: np.ndarray, tti_len: float, psi_prev):
    """Advance the Doppler phase by one TTI: psi + (k . v) * tti_len.

    Broadcasts over leading axes of ``k`` and ``velocity`` (last axis is
    the spatial component).
    """
    if tti_len <= 0:
        raise ValueError("tti_len must be > 0")
    dot = np.sum(np.asarray(k, dtype=float) * np.asarray(velocity, dtype=float), axis=-1)
    out = np.asarray(psi_prev, dtype=float) + dot * tti_len
    if out.ndim == 0:
        return float(out)
    return out
