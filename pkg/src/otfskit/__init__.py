"""Delay-Doppler OTFS simulation and multi-snapshot channel estimation."""

from .channel import (
    DDChannelMatrix,
    EffectiveChannel,
    build_hdd,
    effective_channel,
    effective_full_grid,
    effective_window,
    embed_window,
    window_crop,
)
from .denoiser import DenoiserModel, denoise_window, reference_param_count
from .detection import DetectionResult, MetricRecord, assemble_full_estimate, demap_bpsk, mmse_detect, nmse
from .estimators import (
    WindowEstimate,
    denoise,
    multi_frame_estimate,
    omp_estimate,
    threshold_estimate,
)
from .frames import (
    FrameLayout,
    SnapshotSet,
    average_frames,
    build_frame,
    build_layout,
    extract_observation,
    generate_snapshots,
    window_index_map,
)
from .grid import GridConfig, PathSet, PathSpec, sample_paths
from .kernel import dirichlet, dirichlet_direct, kernel_alpha
from .modem import DDGrid, TimeSignal, apply_td_channel, dd_apply, demodulate, isfft, modulate, sfft
from .physics import PhysicsReport, derive_physics
from .weights import load_model, save_model

__version__ = "0.1.0"
