"""Irregular self-concatenated turbo codes on block-fading channels.

A numpy/scipy workbench covering the code construction (non-uniform repeater,
interleaver, single punctured RSC, diversity-aware channel multiplexer),
density-evolution analysis on AWGN and 2-block Rayleigh channels, information
outage baselines, and finite-length Monte Carlo simulation.
"""
from .channel import (
    FadingChannelSpec,
    biawgn_information_loss,
    biawgn_mutual_information,
    channel_llr,
    ebn0_db_to_noise_variance,
    in_outage,
    instantaneous_capacity,
    modulate_bpsk,
    noise_variance_to_ebn0_db,
    rayleigh_gains,
    transmit,
)
from .codec import (
    CodeInstance,
    DecodeResult,
    FrameLayout,
    LayoutError,
    build_code,
    code_from_text,
    code_to_text,
    decode_frame,
    encode_frame,
    plan_layout,
)
from .density_evolution import (
    DeConfig,
    DeStep,
    EvolveResult,
    ThresholdResult,
    checknode_transfer,
    density_from_channel,
    deo_indicator,
    evolve_awgn,
    evolve_fading,
    find_threshold,
)
from .ensemble import (
    CodeConfig,
    DegreeProfile,
    DiversityReport,
    ProfileError,
    derive_code_params,
    singleton_diversity,
    validate_profile,
)
from .llr_density import LlrDensity, LlrGrid, bitnode_update
from .outage import (
    BOUNDARY_DE_CONFIG,
    BoundaryPoint,
    DeoBoundaryCache,
    OutageEstimate,
    PdeoReport,
    default_ray_angles,
    deo_boundary,
    deo_radius_on_ray,
    information_outage_boundary,
    information_outage_radius,
    outage_probability_bpsk,
    p_deo,
    wilson_half_width,
)
from .simulate import (
    EraseFailure,
    EraseReport,
    PointResult,
    SimResult,
    StopRule,
    run_erasure_audit,
    run_wer_sweep,
    sabotage_multiplexer,
    simulate_point,
)
from .trellis import DEFAULT_LLR_CAP, RscSpec, Trellis, bcjr, build_trellis, rsc_encode

__version__ = "0.1.0"

__all__ = [
    "BOUNDARY_DE_CONFIG",
    "BoundaryPoint",
    "CodeConfig",
    "CodeInstance",
    "DEFAULT_LLR_CAP",
    "DeConfig",
    "DeStep",
    "DecodeResult",
    "DegreeProfile",
    "DeoBoundaryCache",
    "DiversityReport",
    "EraseFailure",
    "EraseReport",
    "EvolveResult",
    "FadingChannelSpec",
    "FrameLayout",
    "LayoutError",
    "LlrDensity",
    "LlrGrid",
    "OutageEstimate",
    "PdeoReport",
    "PointResult",
    "ProfileError",
    "RscSpec",
    "SimResult",
    "StopRule",
    "ThresholdResult",
    "Trellis",
    "bcjr",
    "biawgn_information_loss",
    "biawgn_mutual_information",
    "bitnode_update",
    "build_code",
    "build_trellis",
    "channel_llr",
    "checknode_transfer",
    "code_from_text",
    "code_to_text",
    "decode_frame",
    "default_ray_angles",
    "density_from_channel",
    "deo_boundary",
    "deo_indicator",
    "deo_radius_on_ray",
    "derive_code_params",
    "ebn0_db_to_noise_variance",
    "encode_frame",
    "evolve_awgn",
    "evolve_fading",
    "find_threshold",
    "in_outage",
    "information_outage_boundary",
    "information_outage_radius",
    "instantaneous_capacity",
    "modulate_bpsk",
    "noise_variance_to_ebn0_db",
    "outage_probability_bpsk",
    "p_deo",
    "plan_layout",
    "rayleigh_gains",
    "rsc_encode",
    "run_erasure_audit",
    "run_wer_sweep",
    "sabotage_multiplexer",
    "simulate_point",
    "singleton_diversity",
    "transmit",
    "validate_profile",
    "wilson_half_width",
]
