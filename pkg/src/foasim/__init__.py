"""Simulated first-order ambisonics training data with DOA labels.

The package turns a mono speech corpus into 4-channel FOA audio through two
spatialisation branches (statistical room impulse responses for static
sources, free-field encoding for moving ones), attaches frame-aligned
direction labels and masks, mixes interferers at controlled SNR, and ships
a numerically verified reference of the two-head masked-prediction loss.
"""

from foasim.augment import (AugmentConfig, MixRecord, NoisePool,
                            choose_and_build_interferer, measure_level_db,
                            mix_at_snr, spatialise_utterance)
from foasim.dataio import (IrArchive, PipelineConfig, load_noise_dir,
                           read_foa_wav, read_ir, read_labels, read_manifest,
                           read_mono_wav, write_foa_wav, write_ir,
                           write_labels, write_manifest, write_mono_wav)
from foasim.foa import (FoaSignal, MonoSignal, doa_from_position,
                        encode_moving, encode_stationary_direction)
from foasim.geometry import (RejectionLimitError, RoomSpec, Trajectory,
                             TrajectoryLimits, sample_room, sample_trajectory,
                             segment_min_distance, trajectory_position,
                             trajectory_positions)
from foasim.ir import (FoaImpulseResponse, convolve_foa,
                       estimate_t60_schroeder, fast_convolve, generate_ir)
from foasim.labels import (FrameGeometry, FrameLabelSeq, MaskConfig,
                           QuantizerConfig, angular_error,
                           class_center_direction, frame_center_sample,
                           frame_count, frame_labels, quantize_doa,
                           quantize_doa_batch, span_mask)
from foasim.loss import (LossBundle, LossGradients, MaskedTargets, apply_mask,
                         class_distribution, gradient_self_check,
                         loss_gradients, make_two_head_bundles, masked_ce,
                         total_loss)
from foasim.pipeline import (JobPlan, RunSummary, WorkItem, build_plan,
                             derive_item_seed, generate_ir_archive,
                             labels_from_provenance, list_corpus,
                             regenerate_labels, run_mix, run_spatialise,
                             verify_dataset)

__version__ = "0.1.0"
