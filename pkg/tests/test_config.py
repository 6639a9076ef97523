"""Tests for configuration resolution, validation and fingerprinting."""
import io
import json

import numpy as np
import pytest

from tenprec.config import (
    ScenarioConfig,
    config_from_dict,
    default_circular_tracks,
    default_linear_tracks,
    load_config,
)
from tenprec.errors import ConfigError


class TestDefaults:
    def test_empty_document_gives_default_scenario(self):
        cfg = config_from_dict({})
        assert (cfg.m_h, cfg.m_v) == (16, 16)
        assert cfg.spacing_wavelengths == 0.5
        assert cfg.carrier_hz == 6e9
        assert cfg.ue_count == 3
        assert cfg.k_factor_db == 20.0
        assert (cfg.snr_ul_db, cfg.snr_dl_db) == (20.0, 10.0)
        assert cfg.angle_spread_deg == (1.0, 1.0)
        assert cfg.tti_len_s == 1e-3
        assert (cfg.total_ttis, cfg.uplink_period_ttis) == (1000, 250)
        assert cfg.speed_mps == 30.0
        assert cfg.bs_position == (0.0, 0.0, 25.0)
        assert cfg.ue_height_m == 1.5
        assert cfg.precoders == ("mrt", "zf", "tmrt", "tzf")
        assert cfg.tzf_update_policy == "both"
        assert cfg.doppler_mode == "accumulate"
        assert cfg.seed == 0

    def test_derived_energies(self):
        cfg = config_from_dict({})
        assert abs(cfg.e_p - 100.0) < 1e-12
        assert abs(cfg.e_tx - 10.0) < 1e-12
        assert abs(cfg.k_factor - 100.0) < 1e-12
        assert abs(cfg.wavelength - 0.049965409) < 1e-6

    def test_uplink_schedule(self):
        cfg = config_from_dict({})
        assert cfg.uplink_ttis == (0, 250, 500, 750)

    def test_default_tracks_are_concentric_circles(self):
        cfg = config_from_dict({})
        assert len(cfg.tracks) == 3
        assert all(t.kind == "circular" for t in cfg.tracks)
        assert cfg.tracks[0].radius == 20.0
        assert cfg.tracks[1].radius == 35.0
        assert cfg.tracks[2].radius == 35.0
        # interferers of UE 1 share one circle: one common elevation
        assert cfg.tracks[1].center == cfg.tracks[2].center

    def test_direct_construction_fills_tracks(self):
        cfg = ScenarioConfig()
        assert len(cfg.tracks) == cfg.ue_count

    def test_geometry_property(self):
        cfg = config_from_dict({"m_h": 8, "m_v": 4})
        g = cfg.geometry
        assert (g.m_h, g.m_v) == (8, 4)
        assert abs(g.spacing_h - 0.5 * cfg.wavelength) < 1e-12


class TestOverridesAndCoercion:
    def test_integer_and_float_overrides(self):
        cfg = config_from_dict({"m_h": 8, "snr_dl_db": 3.0, "seed": 42})
        assert cfg.m_h == 8
        assert abs(cfg.e_tx - 10.0 ** 0.3) < 1e-12
        assert cfg.seed == 42

    def test_scalar_angle_spread_broadcasts(self):
        cfg = config_from_dict({"angle_spread_deg": 2.0})
        assert cfg.angle_spread_deg == (2.0, 2.0)
        rad = cfg.angle_spread_rad
        assert abs(rad[0] - np.deg2rad(2.0)) < 1e-12

    def test_precoder_subset(self):
        cfg = config_from_dict({"precoders": ["zf", "mrt"]})
        assert cfg.precoders == ("zf", "mrt")

    def test_tracks_shorthand_linear(self):
        cfg = config_from_dict({"tracks": "linear"})
        assert all(t.kind == "linear" for t in cfg.tracks)
        assert cfg.tracks[0].start == (10.0, -40.0, 1.5)
        assert cfg.tracks[1].start == (20.0, -40.0, 1.5)
        assert cfg.tracks[0].heading == (0.0, 1.0, 0.0)

    def test_explicit_track_list(self):
        cfg = config_from_dict({
            "ue_count": 2,
            "tracks": [
                {"kind": "circular", "radius_m": 15.0, "phase0_deg": 45.0},
                {"kind": "linear", "start_xy": [5.0, -10.0], "heading_xy": [3.0, 4.0],
                 "speed_mps": 10.0},
            ],
        })
        assert cfg.tracks[0].kind == "circular"
        assert cfg.tracks[0].radius == 15.0
        assert abs(cfg.tracks[0].phase0 - np.deg2rad(45.0)) < 1e-12
        assert cfg.tracks[1].speed == 10.0
        # heading normalized to a unit vector
        assert abs(np.hypot(*cfg.tracks[1].heading[:2]) - 1.0) < 1e-12

    def test_track_height_follows_ue_height(self):
        cfg = config_from_dict({"ue_height_m": 2.5})
        assert cfg.tracks[0].center[2] == 2.5


class TestValidation:
    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown configuration keys"):
            config_from_dict({"m_hh": 4})

    def test_unknown_track_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown track keys"):
            config_from_dict({"ue_count": 1,
                              "tracks": [{"kind": "circular", "radius_m": 5.0,
                                          "phases_deg": 0.0}]})

    def test_bad_uplink_period(self):
        with pytest.raises(ConfigError):
            config_from_dict({"uplink_period_ttis": 0})

    def test_total_shorter_than_period(self):
        with pytest.raises(ConfigError):
            config_from_dict({"total_ttis": 100, "uplink_period_ttis": 250})

    def test_unknown_precoder_name(self):
        with pytest.raises(ConfigError):
            config_from_dict({"precoders": ["mrt", "dirty"]})

    def test_bad_policy_and_doppler_mode(self):
        with pytest.raises(ConfigError):
            config_from_dict({"tzf_update_policy": "never"})
        with pytest.raises(ConfigError):
            config_from_dict({"doppler_mode": "off"})

    def test_track_count_mismatch(self):
        with pytest.raises(ConfigError):
            config_from_dict({"ue_count": 2,
                              "tracks": [{"kind": "circular", "radius_m": 5.0}]})

    def test_negative_seed(self):
        with pytest.raises(ConfigError):
            config_from_dict({"seed": -1})

    def test_bad_track_kind(self):
        with pytest.raises(ConfigError):
            config_from_dict({"ue_count": 1, "tracks": [{"kind": "zigzag"}]})

    def test_non_object_document(self):
        with pytest.raises(ConfigError):
            config_from_dict([1, 2, 3])

    def test_infeasible_tzf_warns_but_loads(self):
        with pytest.warns(RuntimeWarning, match="tzf is infeasible"):
            cfg = config_from_dict({"m_h": 2, "m_v": 8, "ue_count": 3})
        assert cfg.m_h == 2  # run continues; the method is skipped later

    def test_zero_speed_is_valid(self):
        cfg = config_from_dict({"speed_mps": 0.0})
        assert cfg.speed_mps == 0.0


class TestFingerprint:
    def test_stable_for_equal_configs(self):
        a = config_from_dict({"seed": 5}).fingerprint()
        b = config_from_dict({"seed": 5}).fingerprint()
        assert a == b
        assert len(a) == 64

    def test_sensitive_to_any_field(self):
        base = config_from_dict({}).fingerprint()
        assert config_from_dict({"seed": 1}).fingerprint() != base
        assert config_from_dict({"m_h": 8}).fingerprint() != base
        assert config_from_dict({"tracks": "linear"}).fingerprint() != base

    def test_round_trip_through_dict(self):
        cfg = config_from_dict({"tracks": "linear", "seed": 9})
        again = config_from_dict(cfg.to_dict())
        assert cfg.fingerprint() == again.fingerprint()


class TestLoadConfig:
    def test_none_gives_defaults(self):
        assert load_config(None).fingerprint() == config_from_dict({}).fingerprint()

    def test_file_round_trip(self, tmp_path):
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps({"m_h": 4, "m_v": 4, "seed": 3}))
        cfg = load_config(str(path))
        assert (cfg.m_h, cfg.m_v, cfg.seed) == (4, 4, 3)

    def test_empty_file_gives_defaults(self, tmp_path):
        path = tmp_path / "empty.json"
        path.write_text("  \n")
        assert load_config(str(path)).fingerprint() == config_from_dict({}).fingerprint()

    def test_stdin_dash(self, monkeypatch):
        monkeypatch.setattr("sys.stdin", io.StringIO('{"seed": 17}'))
        assert load_config("-").seed == 17

    def test_missing_file_is_config_error(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(str(tmp_path / "nope.json"))

    def test_parse_error_reports_location(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"m_h": 4,,}')
        with pytest.raises(ConfigError, match="line 1"):
            load_config(str(path))


class TestDefaultTrackBuilders:
    def test_circular_counts_and_phases(self):
        tracks = default_circular_tracks(4, 1.5, 30.0)
        assert len(tracks) == 4
        phases = [t.phase0 for t in tracks[1:]]
        # interferers evenly spread: 120 degrees apart for three of them
        gaps = np.diff(phases)
        assert np.allclose(gaps, np.deg2rad(120.0), atol=1e-12)

    def test_linear_counts(self):
        tracks = default_linear_tracks(2, 1.5, 5.0)
        assert len(tracks) == 2
        assert tracks[0].speed == 5.0
