"""Scenario configuration: JSON schema, defaults, validation, fingerprint.

An empty configuration document resolves to the full default scenario:
a 16x16 half-wavelength UPA at 6 GHz, three users at 30 m/s with 20 dB
K-factor, 20/10 dB uplink/downlink SNR, 1 ms TTIs over 1000 TTIs with an
uplink slot every 250 TTIs. Unknown keys are rejected rather than
ignored so that typos cannot silently change an experiment.
"""
from __future__ import annotations

import hashlib
import json
import sys
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

from .channel import ArrayGeometry
from .errors import ConfigError
from .mobility import TrackSpec
from .precoding import tzf_feasible

KNOWN_METHODS = ("mrt", "zf", "tmrt", "tzf")

_KNOWN_KEYS = {
    "m_h", "m_v", "spacing_wavelengths", "carrier_hz", "ue_count",
    "k_factor_db", "snr_ul_db", "snr_dl_db", "angle_spread_deg",
    "tti_len_s", "total_ttis", "uplink_period_ttis", "realizations",
    "sumrate_realizations", "subspace_stride", "runtime_designs",
    "speed_mps", "bs_position", "ue_height_m", "tracks", "precoders",
    "tzf_update_policy", "doppler_mode", "seed",
}

_TRACK_KEYS = {"kind", "speed_mps", "radius_m", "phase0_deg", "center_xy",
               "direction", "start_xy", "heading_xy"}


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully resolved simulation scenario (all fields populated)."""

    m_h: int = 16
    m_v: int = 16
    spacing_wavelengths: float = 0.5
    carrier_hz: float = 6e9
    ue_count: int = 3
    k_factor_db: float = 20.0
    snr_ul_db: float = 20.0
    snr_dl_db: float = 10.0
    angle_spread_deg: tuple = (1.0, 1.0)
    tti_len_s: float = 1e-3
    total_ttis: int = 1000
    uplink_period_ttis: int = 250
    realizations: int = 256
    sumrate_realizations: int = 64
    subspace_stride: int = 1
    runtime_designs: int = 1000
    speed_mps: float = 30.0
    bs_position: tuple = (0.0, 0.0, 25.0)
    ue_height_m: float = 1.5
    tracks: tuple = ()
    precoders: tuple = ("mrt", "zf", "tmrt", "tzf")
    tzf_update_policy: str = "both"
    doppler_mode: str = "accumulate"
    seed: int = 0

    def __post_init__(self):
        if not self.tracks:
            object.__setattr__(self, "tracks", default_circular_tracks(
                self.ue_count, self.ue_height_m, self.speed_mps))

    # Derived quantities -------------------------------------------------

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_hz

    @property
    def geometry(self) -> ArrayGeometry:
        d = self.spacing_wavelengths * self.wavelength
        return ArrayGeometry(m_h=self.m_h, m_v=self.m_v, spacing_h=d,
                             spacing_v=d, wavelength=self.wavelength)

    @property
    def k_factor(self) -> float:
        """Linear Rician K-factor."""
        return 10.0 ** (self.k_factor_db / 10.0)

    @property
    def e_p(self) -> float:
        """Uplink pilot energy for unit noise variance."""
        return 10.0 ** (self.snr_ul_db / 10.0)

    @property
    def e_tx(self) -> float:
        """Total downlink transmit energy for unit noise variance."""
        return 10.0 ** (self.snr_dl_db / 10.0)

    @property
    def angle_spread_rad(self) -> tuple:
        return tuple(np.deg2rad(s) for s in self.angle_spread_deg)

    @property
    def uplink_ttis(self) -> tuple:
        return tuple(range(0, self.total_ttis, self.uplink_period_ttis))

    def fingerprint(self) -> str:
        """SHA-256 hex digest of the canonicalized configuration."""
        payload = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def to_dict(self) -> dict:
        tracks = []
        for t in self.tracks:
            if t.kind == "circular":
                tracks.append({
                    "kind": "circular", "speed_mps": t.speed,
                    "center_xy": [t.center[0], t.center[1]],
                    "radius_m": t.radius,
                    "phase0_deg": float(np.rad2deg(t.phase0)),
                    "direction": t.direction,
                })
            else:
                tracks.append({
                    "kind": "linear", "speed_mps": t.speed,
                    "start_xy": [t.start[0], t.start[1]],
                    "heading_xy": [t.heading[0], t.heading[1]],
                })
        return {
            "m_h": self.m_h, "m_v": self.m_v,
            "spacing_wavelengths": self.spacing_wavelengths,
            "carrier_hz": self.carrier_hz, "ue_count": self.ue_count,
            "k_factor_db": self.k_factor_db, "snr_ul_db": self.snr_ul_db,
            "snr_dl_db": self.snr_dl_db,
            "angle_spread_deg": list(self.angle_spread_deg),
            "tti_len_s": self.tti_len_s, "total_ttis": self.total_ttis,
            "uplink_period_ttis": self.uplink_period_ttis,
            "realizations": self.realizations,
            "sumrate_realizations": self.sumrate_realizations,
            "subspace_stride": self.subspace_stride,
            "runtime_designs": self.runtime_designs,
            "speed_mps": self.speed_mps,
            "bs_position": list(self.bs_position),
            "ue_height_m": self.ue_height_m, "tracks": tracks,
            "precoders": list(self.precoders),
            "tzf_update_policy": self.tzf_update_policy,
            "doppler_mode": self.doppler_mode, "seed": self.seed,
        }


def default_circular_tracks(ue_count: int, ue_height: float, speed: float) -> tuple:
    """Concentric circles around the BS ground projection.

    The first UE rides a 20 m circle; the remaining UEs share a 35 m
    circle at evenly spread starting phases, so every interferer of UE 1
    keeps one common, constant elevation angle.
    """
    tracks = [TrackSpec(kind="circular", speed=speed, center=(0.0, 0.0, ue_height),
                        radius=20.0, phase0=float(np.deg2rad(90.0)), direction=1)]
    n_int = max(0, ue_count - 1)
    for j in range(n_int):
        phase = 210.0 + j * (360.0 / n_int)
        tracks.append(TrackSpec(kind="circular", speed=speed,
                                center=(0.0, 0.0, ue_height), radius=35.0,
                                phase0=float(np.deg2rad(phase)), direction=1))
    return tuple(tracks[:ue_count])


def default_linear_tracks(ue_count: int, ue_height: float, speed: float) -> tuple:
    """Parallel straight tracks heading +y from staggered x offsets."""
    return tuple(
        TrackSpec(kind="linear", speed=speed,
                  start=(10.0 + 10.0 * u, -40.0, ue_height),
                  heading=(0.0, 1.0, 0.0))
        for u in range(ue_count)
    )


def _parse_track(doc: dict, ue_height: float, default_speed: float) -> TrackSpec:
    unknown = set(doc) - _TRACK_KEYS
    if unknown:
        raise ConfigError(f"unknown track keys: {sorted(unknown)}")
    kind = doc.get("kind")
    speed = float(doc.get("speed_mps", default_speed))
    try:
        if kind == "circular":
            cx, cy = doc.get("center_xy", (0.0, 0.0))
            return TrackSpec(kind="circular", speed=speed,
                             center=(float(cx), float(cy), ue_height),
                             radius=float(doc["radius_m"]),
                             phase0=float(np.deg2rad(float(doc.get("phase0_deg", 0.0)))),
                             direction=int(doc.get("direction", 1)))
        if kind == "linear":
            sx, sy = doc["start_xy"]
            hx, hy = doc["heading_xy"]
            norm = float(np.hypot(hx, hy))
            if norm == 0.0:
                raise ConfigError("track heading_xy must be non-zero")
            return TrackSpec(kind="linear", speed=speed,
                             start=(float(sx), float(sy), ue_height),
                             heading=(float(hx) / norm, float(hy) / norm, 0.0))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid track specification: {exc}") from exc
    raise ConfigError(f"track kind must be 'circular' or 'linear', got {kind!r}")


def _resolve_tracks(raw, cfg_kwargs: dict) -> tuple:
    ue_count = cfg_kwargs["ue_count"]
    height = cfg_kwargs["ue_height_m"]
    speed = cfg_kwargs["speed_mps"]
    if raw is None or raw == "circular":
        return default_circular_tracks(ue_count, height, speed)
    if raw == "linear":
        return default_linear_tracks(ue_count, height, speed)
    if not isinstance(raw, list):
        raise ConfigError("tracks must be 'circular', 'linear', or a list of track objects")
    if len(raw) != ue_count:
        raise ConfigError(f"got {len(raw)} tracks for {ue_count} users")
    return tuple(_parse_track(doc, height, speed) for doc in raw)


def _validate(cfg: ScenarioConfig) -> ScenarioConfig:
    checks = [
        (cfg.m_h >= 1 and cfg.m_v >= 1, "array dimensions must be >= 1"),
        (cfg.spacing_wavelengths > 0, "spacing_wavelengths must be > 0"),
        (cfg.carrier_hz > 0, "carrier_hz must be > 0"),
        (cfg.ue_count >= 1, "ue_count must be >= 1"),
        (cfg.k_factor_db == cfg.k_factor_db, "k_factor_db must be a number"),
        (all(s >= 0 for s in cfg.angle_spread_deg), "angle spread must be >= 0"),
        (len(cfg.angle_spread_deg) == 2, "angle_spread_deg needs [theta, phi]"),
        (cfg.tti_len_s > 0, "tti_len_s must be > 0"),
        (cfg.total_ttis >= 1, "total_ttis must be >= 1"),
        (cfg.uplink_period_ttis >= 1, "uplink_period_ttis must be >= 1"),
        (cfg.total_ttis >= cfg.uplink_period_ttis,
         "total_ttis must be >= uplink_period_ttis"),
        (cfg.realizations >= 2, "realizations must be >= 2"),
        (cfg.sumrate_realizations >= 2, "sumrate_realizations must be >= 2"),
        (cfg.subspace_stride >= 1, "subspace_stride must be >= 1"),
        (cfg.runtime_designs >= 1, "runtime_designs must be >= 1"),
        (cfg.speed_mps >= 0, "speed_mps must be >= 0"),
        (cfg.ue_height_m >= 0, "ue_height_m must be >= 0"),
        (len(cfg.bs_position) == 3, "bs_position needs [x, y, z]"),
        (len(cfg.tracks) == cfg.ue_count, "one track per user required"),
        (cfg.tzf_update_policy in ("both", "vertical_once"),
         "tzf_update_policy must be 'both' or 'vertical_once'"),
        (cfg.doppler_mode in ("accumulate", "instantaneous"),
         "doppler_mode must be 'accumulate' or 'instantaneous'"),
        (cfg.seed >= 0, "seed must be a non-negative integer"),
        (len(cfg.precoders) >= 1, "at least one precoder required"),
    ]
    for ok, message in checks:
        if not ok:
            raise ConfigError(message)
    for name in cfg.precoders:
        if name not in KNOWN_METHODS:
            raise ConfigError(f"unknown precoder {name!r}; choose from {KNOWN_METHODS}")
    if "tzf" in cfg.precoders and not tzf_feasible(cfg.m_h, cfg.m_v, cfg.ue_count):
        warnings.warn(
            f"tzf is infeasible for ({cfg.m_h}, {cfg.m_v}) with {cfg.ue_count} users "
            "and will be skipped", RuntimeWarning, stacklevel=3)
    return cfg


def config_from_dict(doc: dict) -> ScenarioConfig:
    """Resolve a configuration document against the defaults."""
    if not isinstance(doc, dict):
        raise ConfigError("configuration document must be a JSON object")
    unknown = set(doc) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
    kwargs: dict = {}
    defaults = ScenarioConfig()
    int_keys = {"m_h", "m_v", "ue_count", "total_ttis", "uplink_period_ttis",
                "realizations", "sumrate_realizations", "subspace_stride",
                "runtime_designs", "seed"}
    float_keys = {"spacing_wavelengths", "carrier_hz", "k_factor_db", "snr_ul_db",
                  "snr_dl_db", "tti_len_s", "speed_mps", "ue_height_m"}
    try:
        for key in int_keys:
            if key in doc:
                kwargs[key] = int(doc[key])
        for key in float_keys:
            if key in doc:
                kwargs[key] = float(doc[key])
        if "angle_spread_deg" in doc:
            spread = doc["angle_spread_deg"]
            if isinstance(spread, (int, float)):
                spread = [spread, spread]
            kwargs["angle_spread_deg"] = tuple(float(s) for s in spread)
        if "bs_position" in doc:
            kwargs["bs_position"] = tuple(float(v) for v in doc["bs_position"])
        if "precoders" in doc:
            kwargs["precoders"] = tuple(str(p) for p in doc["precoders"])
        for key in ("tzf_update_policy", "doppler_mode"):
            if key in doc:
                kwargs[key] = str(doc[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid configuration value: {exc}") from exc
    merged = {key: kwargs.get(key, getattr(defaults, key))
              for key in ("ue_count", "ue_height_m", "speed_mps")}
    try:
        kwargs["tracks"] = _resolve_tracks(doc.get("tracks"), merged)
    except ValueError as exc:
        raise ConfigError(f"invalid track: {exc}") from exc
    try:
        cfg = ScenarioConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return _validate(cfg)


def load_config(path: str | None) -> ScenarioConfig:
    """Load a JSON configuration file; None or '-' reads stdin or defaults.

    ``None`` returns the default scenario. ``'-'`` reads a JSON document
    from stdin. Parse failures carry line/column diagnostics.
    """
    if path is None:
        return config_from_dict({})
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read configuration: {exc}") from exc
    if not text.strip():
        return config_from_dict({})
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"configuration parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    return config_from_dict(doc)
