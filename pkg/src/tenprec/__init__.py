"""Link-level massive MIMO simulator with tensor (Kronecker) precoding.

The package simulates a Rician fading channel over a uniform planar
array with mobile users, pilot-based least-squares CSI acquisition, and
four downlink precoders: MRT, ZF, and their tensor variants TMRT and
TZF that operate on horizontal/vertical sub-array factors. Experiment
harnesses cover channel-subspace evolution, TDD sum rate under CSI
aging, and precoder construction runtime.
"""

from .channel import (ArrayGeometry, ChannelState, GainModel, ISOTROPIC,
                      SubArrayIndexSets, extract_subarray, los_channel,
                      nlos_step, rician_combine, steering_full,
                      steering_horizontal, steering_vertical,
                      subarray_index_sets, temporal_correlation)
from .config import ScenarioConfig, config_from_dict, load_config
from .csi import (CsiEstimate, generate_pilots, ls_estimate,
                  ls_estimate_subarrays, uplink_receive)
from .errors import (ConfigError, DegeneracyError, InfeasibilityError,
                     TenprecError)
from .experiments import (ExperimentResult, run_runtime, run_subspace,
                          run_sumrate)
from .linalg import (EigenDecomposition, RngStream, bessel_j0,
                     complex_gaussian, dominant_eigenvectors, hermitian_evd,
                     kron, kron_vec_apply, substream)
from .metrics import (RuntimeEcdf, SinrReport, chordal_distance_sq,
                      measure_runtime, sample_covariance, sinr, sinr_all,
                      subspace_chordal_distance_sq, sum_rate)
from .mobility import (TrackSpec, advance_track, doppler_phase_step,
                       mean_angles, perturb_angles, relative_direction,
                       wave_vector)
from .output import emit_results, render_csv, render_json
from .precoding import (Precoder, PrecoderSet, ProjectorPair, allocate_power,
                        column_space_projector, interference_gram,
                        interference_matrix, mrt, tmrt, tzf, tzf_feasible,
                        tzf_projector_pair, zf)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
