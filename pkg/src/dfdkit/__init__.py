"""Toolkit for depth-from-defocus groundwork: thin-lens blur synthesis from
RGB-D data, dark-channel and local-variation defocus cues, depth error
metrics, loss terms, and kernel density statistics."""

from .cues import LddcvMap, ProfileBin, ValidityMask, blur_cue_profile, lddcv, validity_mask
from .dark_channel import dark_channel
from .dataset import (
    SamplePair,
    SplitList,
    SynthesisSummary,
    load_pair,
    load_split,
    synthesize_dataset,
)
from .kde import KdeResult, gaussian_kde, silverman_bandwidth
from .losses import (
    LossReport,
    adversarial_loss_g,
    dct2,
    frequency_loss,
    idct2,
    spatial_fidelity,
    total_loss,
)
from .metrics import MetricsReport, evaluate
from .raster import (
    CameraParams,
    DepthMap,
    FileFormatError,
    RgbImage,
    ScalarMap,
    read_depth,
    read_map,
    read_rgb,
    write_map,
    write_rgb,
)
from .synth import blur_radius, gaussian_psf, quantize_radius, synthesize_defocus

__version__ = "0.1.0"

__all__ = [
    "CameraParams",
    "DepthMap",
    "FileFormatError",
    "KdeResult",
    "LddcvMap",
    "LossReport",
    "MetricsReport",
    "ProfileBin",
    "RgbImage",
    "SamplePair",
    "ScalarMap",
    "SplitList",
    "SynthesisSummary",
    "ValidityMask",
    "adversarial_loss_g",
    "blur_cue_profile",
    "blur_radius",
    "dark_channel",
    "dct2",
    "evaluate",
    "frequency_loss",
    "gaussian_kde",
    "gaussian_psf",
    "idct2",
    "lddcv",
    "load_pair",
    "load_split",
    "quantize_radius",
    "read_depth",
    "read_map",
    "read_rgb",
    "silverman_bandwidth",
    "spatial_fidelity",
    "synthesize_dataset",
    "synthesize_defocus",
    "total_loss",
    "validity_mask",
    "write_map",
    "write_rgb",
]
