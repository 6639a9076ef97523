"""Experiment harnesses: subspace evolution, TDD sum rate, runtime ECDF.

All randomness flows through counter-based streams addressed by
(seed, experiment, purpose, tti, ue), so reruns with identical
configuration and seed reproduce results exactly and all precoding
methods inside one run consume identical channel realizations and
identical CSI observations.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import channel as ch
from . import csi as cs
from . import metrics as mt
from . import mobility as mb
from . import precoding as pc
from .config import ScenarioConfig
from .errors import InfeasibilityError
from .linalg import complex_gaussian, dominant_eigenvectors, substream

# Stream address components (experiment tag, purpose tag).
_EXP_SUBSPACE, _EXP_SUMRATE, _EXP_RUNTIME = 1, 2, 3
_PUR_ANGLES, _PUR_NLOS, _PUR_NLOS_INIT, _PUR_PILOT, _PUR_DRAWS = 1, 2, 3, 4, 5

CHANNEL_LABELS = ("full", "horizontal", "vertical")
INTERFERENCE_LABELS = ("int_full", "int_horizontal", "int_vertical")

RESULT_COLUMNS = {
    "subspace": ("tti", "label", "chordal_sq"),
    "sumrate": ("tti", "method", "sum_rate_bps_hz"),
    "runtime": ("method", "sample_idx", "seconds"),
}


@dataclass(frozen=True)
class ExperimentResult:
    """Uniform container for one experiment run.

    ``records`` holds plain-Python row tuples matching ``columns``;
    ``summary`` carries derived statistics for the JSON output format.
    """

    kind: str
    columns: tuple
    records: list
    fingerprint: str
    seed: int
    summary: dict = field(default_factory=dict)


def _mean_geometry(cfg: ScenarioConfig, tti: int):
    """Per-UE position, velocity, and mean angles at one TTI."""
    bs = np.asarray(cfg.bs_position, dtype=float)
    out = []
    for track in cfg.tracks:
        pos, vel = mb.advance_track(track, tti, cfg.tti_len_s)
        theta_bar, phi_bar = mb.mean_angles(mb.relative_direction(bs, pos))
        out.append((pos, vel, theta_bar, phi_bar))
    return out


def _draw_channels(cfg: ScenarioConfig, tti: int, exp_tag: int) -> np.ndarray:
    """Independent per-TTI channel draws, shape (U, R, M).

    Fresh angle perturbations and fresh stationary diffuse components per
    realization; the common Doppler phasor is omitted because it cancels
    in every h h^H covariance this experiment consumes.
    """
    geom = cfg.geometry
    r_count = cfg.realizations
    sig_t, sig_p = cfg.angle_spread_rad
    k_lin = cfg.k_factor
    draws = np.empty((cfg.ue_count, r_count, geom.size), dtype=complex)
    for u, (_pos, _vel, theta_bar, phi_bar) in enumerate(_mean_geometry(cfg, tti)):
        gen_a = substream(cfg.seed, exp_tag, _PUR_ANGLES, tti, u)
        theta, phi = mb.perturb_angles(theta_bar, phi_bar, sig_t, sig_p, gen_a,
                                       size=r_count)
        a = ch.steering_full(geom, theta, phi)
        gen_n = substream(cfg.seed, exp_tag, _PUR_NLOS, tti, u)
        nlos = complex_gaussian(gen_n, (r_count, geom.size))
        draws[u] = ch.rician_combine(k_lin, a, nlos)
    return draws


def run_subspace(cfg: ScenarioConfig) -> ExperimentResult:
    """Evolution of dominant channel subspaces along the UE tracks.

    For each sampled TTI a sample covariance over ``realizations``
    independent draws of UE 1's full, horizontal, and vertical channels
    gives a dominant eigenvector whose squared chordal distance to the
    TTI-0 eigenvector is emitted per label. With more than one user the
    interference Gram variant (sum over all users except UE 1, labels
    ``int_*``) tracks the (U-1)-dimensional dominant column space the
    same way.
    """
    geom = cfg.geometry
    idx = ch.subarray_index_sets(geom)
    sub_h = np.asarray(idx.i_h, dtype=int) - 1
    sub_v = np.asarray(idx.i_v, dtype=int) - 1
    n_int = cfg.ue_count - 1
    labels_int = INTERFERENCE_LABELS if n_int >= 1 else ()
    records: list = []
    refs: dict = {}
    maxima: dict = {}
    for tti in range(0, cfg.total_ttis, cfg.subspace_stride):
        draws = _draw_channels(cfg, tti, _EXP_SUBSPACE)
        cov_full = mt.sample_covariance(draws[0])
        grams = {
            "full": cov_full,
            "horizontal": cov_full[np.ix_(sub_h, sub_h)],
            "vertical": cov_full[np.ix_(sub_v, sub_v)],
        }
        if labels_int:
            theta_full = np.zeros((geom.size, geom.size), dtype=complex)
            for j in range(1, cfg.ue_count):
                theta_full += mt.sample_covariance(draws[j])
            grams["int_full"] = theta_full
            grams["int_horizontal"] = theta_full[np.ix_(sub_h, sub_h)]
            grams["int_vertical"] = theta_full[np.ix_(sub_v, sub_v)]
        for label in CHANNEL_LABELS + labels_int:
            k = 1 if label in CHANNEL_LABELS else min(n_int, grams[label].shape[0])
            basis = dominant_eigenvectors(grams[label], k)
            if label not in refs:
                refs[label] = basis
            d2 = mt.subspace_chordal_distance_sq(basis, refs[label])
            records.append((tti, label, float(d2)))
            maxima[label] = max(maxima.get(label, 0.0), float(d2))
    summary = {
        "max_chordal_sq": maxima,
        "sampled_ttis": (cfg.total_ttis + cfg.subspace_stride - 1) // cfg.subspace_stride,
        "realizations": cfg.realizations,
    }
    return ExperimentResult(kind="subspace", columns=RESULT_COLUMNS["subspace"],
                            records=records, fingerprint=cfg.fingerprint(),
                            seed=cfg.seed, summary=summary)


def _design_precoders(cfg: ScenarioConfig, method: str, estimates: dict,
                      budgets: np.ndarray) -> np.ndarray:
    """Per-realization, per-UE precoding vectors for one method, (R, U, M)."""
    h_hat = estimates["full"]
    h_hat_h = estimates["sub_h"]
    h_hat_v = estimates["sub_v"]
    r_count, u_count, m = h_hat.shape
    out = np.empty((r_count, u_count, m), dtype=complex)
    for r in range(r_count):
        for u in range(u_count):
            if method == "mrt":
                out[r, u] = pc.mrt(h_hat[r, u], budgets[u]).f
            elif method == "zf":
                h_tilde = pc.interference_matrix(h_hat[r], u)
                out[r, u] = pc.zf(h_hat[r, u], h_tilde, budgets[u]).f
            elif method == "tmrt":
                out[r, u] = pc.tmrt(h_hat_h[r, u], h_hat_v[r, u], budgets[u]).f
            elif method == "tzf":
                t_h = pc.interference_matrix(h_hat_h[r], u)
                t_v = pc.interference_matrix(h_hat_v[r], u)
                out[r, u] = pc.tzf(h_hat_h[r, u], h_hat_v[r, u], t_h, t_v,
                                   budgets[u]).f
            else:
                raise ValueError(f"unknown precoding method {method!r}")
    return out


def run_sumrate(cfg: ScenarioConfig) -> ExperimentResult:
    """TDD downlink sum rate with mobility, CSI aging, and all methods.

    CSI is acquired at every uplink TTI (multiples of the uplink period)
    from one shared pilot observation per realization; each configured
    precoder is designed from it and held until the next uplink TTI. The
    instantaneous sum rate against the true channels is averaged over
    ``sumrate_realizations`` Monte-Carlo realizations per TTI. Under the
    ``vertical_once`` update policy the tensor methods reuse the vertical
    sub-array estimates acquired at TTI 0 for the whole run.
    """
    geom = cfg.geometry
    m = geom.size
    u_count = cfg.ue_count
    r_count = cfg.sumrate_realizations
    methods = list(cfg.precoders)
    skipped: dict = {}
    if "tzf" in methods and not pc.tzf_feasible(cfg.m_h, cfg.m_v, u_count):
        skipped["tzf"] = (f"infeasible geometry: min({cfg.m_h}, {cfg.m_v}) "
                          f"<= U - 1 = {u_count - 1}")
        methods = [name for name in methods if name != "tzf"]
    if m < u_count and "zf" in methods:
        skipped["zf"] = f"infeasible geometry: M_BS = {m} < U = {u_count}"
        methods = [name for name in methods if name != "zf"]
    if not methods:
        raise InfeasibilityError("no feasible precoding method for this scenario")
    idx = ch.subarray_index_sets(geom)
    sig_t, sig_p = cfg.angle_spread_rad
    k_lin = cfg.k_factor
    wavelength = cfg.wavelength
    budgets = pc.allocate_power(cfg.e_tx, u_count)
    pilots = cs.generate_pilots(u_count, u_count)
    noise_var = 1.0
    rho = [ch.temporal_correlation(track.speed, wavelength, cfg.tti_len_s)
           for track in cfg.tracks]
    nlos = np.empty((r_count, u_count, m), dtype=complex)
    for u in range(u_count):
        nlos[:, u] = complex_gaussian(
            substream(cfg.seed, _EXP_SUMRATE, _PUR_NLOS_INIT, 0, u), (r_count, m))
    psi = np.zeros((r_count, u_count))
    held: dict = {}
    frozen_vertical: np.ndarray | None = None
    rate_curves: dict = {name: [] for name in methods}
    rate_totals = {name: np.zeros(r_count) for name in methods}
    design_ttis: list = []
    h_true = np.empty((r_count, u_count, m), dtype=complex)
    for tti in range(cfg.total_ttis):
        geometry_now = _mean_geometry(cfg, tti)
        for u, (_pos, vel, theta_bar, phi_bar) in enumerate(geometry_now):
            gen_a = substream(cfg.seed, _EXP_SUMRATE, _PUR_ANGLES, tti, u)
            theta, phi = mb.perturb_angles(theta_bar, phi_bar, sig_t, sig_p,
                                           gen_a, size=r_count)
            k_vec = mb.wave_vector(theta, phi, wavelength)
            if cfg.doppler_mode == "accumulate":
                if tti > 0:
                    psi[:, u] = mb.doppler_phase_step(k_vec, vel, cfg.tti_len_s,
                                                      psi[:, u])
            else:
                psi[:, u] = np.sum(k_vec * vel, axis=-1)
            a = ch.steering_full(geom, theta, phi)
            h_los = ch.los_channel(psi[:, u], a)
            if tti > 0:
                gen_n = substream(cfg.seed, _EXP_SUMRATE, _PUR_NLOS, tti, u)
                nlos[:, u] = ch.nlos_step(nlos[:, u], rho[u], gen_n)
            h_true[:, u] = ch.rician_combine(k_lin, h_los, nlos[:, u])
        if tti % cfg.uplink_period_ttis == 0:
            design_ttis.append(tti)
            slot = tti // cfg.uplink_period_ttis
            gen_b = substream(cfg.seed, _EXP_SUMRATE, _PUR_PILOT, slot, 0)
            x = cs.uplink_receive(h_true, pilots, cfg.e_p, noise_var, gen_b)
            h_hat = np.stack([cs.ls_estimate(x, pilots[u], cfg.e_p)
                              for u in range(u_count)], axis=1)
            subs = [cs.ls_estimate_subarrays(x, idx, pilots[u], cfg.e_p)
                    for u in range(u_count)]
            h_hat_h = np.stack([s[0] for s in subs], axis=1)
            h_hat_v = np.stack([s[1] for s in subs], axis=1)
            estimates = {"full": h_hat, "sub_h": h_hat_h, "sub_v": h_hat_v}
            # the stale-vertical policy touches only the tzf design inputs
            if cfg.tzf_update_policy == "vertical_once":
                if frozen_vertical is None:
                    frozen_vertical = h_hat_v
                tzf_estimates = dict(estimates, sub_v=frozen_vertical)
            else:
                tzf_estimates = estimates
            for name in methods:
                inputs = tzf_estimates if name == "tzf" else estimates
                held[name] = _design_precoders(cfg, name, inputs, budgets)
        for name in methods:
            sinrs = mt.sinr_all(h_true, held[name], noise_var)
            rates = np.sum(np.log2(1.0 + sinrs), axis=-1)
            rate_curves[name].append(float(np.mean(rates)))
            rate_totals[name] += rates
    records = []
    for tti in range(cfg.total_ttis):
        for name in methods:
            records.append((tti, name, rate_curves[name][tti]))
    summary: dict = {"design_ttis": design_ttis, "skipped": skipped,
                     "tzf_update_policy": cfg.tzf_update_policy, "methods": {}}
    for name in methods:
        per_real = rate_totals[name] / cfg.total_ttis
        std = float(np.std(per_real, ddof=1)) if r_count > 1 else 0.0
        summary["methods"][name] = {
            "time_avg_mean": float(np.mean(per_real)),
            "time_avg_ci95": 1.96 * std / np.sqrt(r_count),
            "per_realization_time_avg": [float(v) for v in per_real],
        }
    return ExperimentResult(kind="sumrate", columns=RESULT_COLUMNS["sumrate"],
                            records=records, fingerprint=cfg.fingerprint(),
                            seed=cfg.seed, summary=summary)


def _runtime_inputs(cfg: ScenarioConfig, designs: int):
    """Pre-drawn i.i.d. channels and interference stacks, excluded from timing."""
    geom = cfg.geometry
    idx = ch.subarray_index_sets(geom)
    gen = substream(cfg.seed, _EXP_RUNTIME, _PUR_DRAWS, 0, 0)
    channels = complex_gaussian(gen, (designs, cfg.ue_count, geom.size))
    sub_h = ch.extract_subarray(channels, idx.i_h)
    sub_v = ch.extract_subarray(channels, idx.i_v)
    return channels, sub_h, sub_v


def runtime_procedures(cfg: ScenarioConfig, designs: int) -> dict:
    """Zero-argument design closures per method, cycling pre-drawn channels.

    Each call designs UE 1's precoder for the next channel draw; channel
    generation and CSI preparation stay outside the timed call.
    """
    channels, sub_h, sub_v = _runtime_inputs(cfg, designs)
    budget = float(pc.allocate_power(cfg.e_tx, cfg.ue_count)[0])
    counters = {}

    def make(name):
        counters[name] = 0

        def proc():
            i = counters[name] % designs
            counters[name] += 1
            if name == "mrt":
                return pc.mrt(channels[i, 0], budget)
            if name == "zf":
                return pc.zf(channels[i, 0], np.conj(channels[i, 1:]), budget)
            if name == "tmrt":
                return pc.tmrt(sub_h[i, 0], sub_v[i, 0], budget)
            return pc.tzf(sub_h[i, 0], sub_v[i, 0], np.conj(sub_h[i, 1:]),
                          np.conj(sub_v[i, 1:]), budget)
        return proc

    return {name: make(name) for name in cfg.precoders}


def run_runtime(cfg: ScenarioConfig) -> ExperimentResult:
    """Per-design wall-clock runtime ECDF for the configured methods.

    Times precoder construction only, over ``runtime_designs`` i.i.d.
    channel draws at the configured geometry, single-threaded on the
    monotonic clock with the leading 10% of invocations discarded as
    warm-up. Sample values are physical measurements and vary between
    runs; everything else about the output is deterministic.
    """
    designs = cfg.runtime_designs
    methods = list(cfg.precoders)
    skipped: dict = {}
    if "tzf" in methods and not pc.tzf_feasible(cfg.m_h, cfg.m_v, cfg.ue_count):
        skipped["tzf"] = "infeasible geometry"
        methods = [name for name in methods if name != "tzf"]
    if "zf" in methods and cfg.geometry.size < cfg.ue_count:
        skipped["zf"] = "infeasible geometry"
        methods = [name for name in methods if name != "zf"]
    if not methods:
        raise InfeasibilityError("no feasible precoding method for this scenario")
    procedures = runtime_procedures(cfg, designs)
    records = []
    medians = {}
    for name in methods:
        ecdf = mt.measure_runtime(procedures[name], designs, label=name)
        medians[name] = ecdf.median
        for i, value in enumerate(ecdf.samples):
            records.append((name, i, float(value)))
    summary = {"median_seconds": medians, "designs": designs, "skipped": skipped,
               "geometry": [cfg.m_h, cfg.m_v], "ue_count": cfg.ue_count}
    return ExperimentResult(kind="runtime", columns=RESULT_COLUMNS["runtime"],
                            records=records, fingerprint=cfg.fingerprint(),
                            seed=cfg.seed, summary=summary)


RUNNERS = {
    "subspace": run_subspace,
    "sumrate": run_sumrate,
    "runtime": run_runtime,
}
