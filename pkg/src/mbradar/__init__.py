"""Photonic multiband radar simulator and fusion toolkit.

A single low-band chirp drives a Mach-Zehnder modulator; square-law
detection turns its harmonics into mutually coherent radar subbands. This
package simulates that chain end to end: harmonic analysis, de-chirped echo
synthesis, per-band range profiles, coherent gapped-spectrum fusion with
all-pole gap filling, and rotating-platform ISAR imaging.
"""

from .cli import ScenarioConfig, parse_config, run
from .fusion import (
    BandSegment,
    GappedSpectrum,
    PoleModel,
    assemble_gapped,
    estimate_poles,
    fit_pole_model,
    fuse_direct,
    gap_fill_profile,
    refine_global,
    scramble_band_phases,
    to_band_segment,
)
from .imaging import (
    DataMatrix,
    IsarImage,
    blob_peaks,
    collect_cpi,
    count_blobs,
    crop_range,
    isar_image,
    rim_truth,
    write_isar_csv,
    write_isar_pgm,
)
from .kernels import backend
from .photonics import (
    HarmonicSpectrum,
    MzmParams,
    SubbandPlan,
    SubbandSpan,
    field_sideband_amplitudes,
    harmonic_amplitudes,
    mzm_pd_oracle,
    subband_plan,
)
from .receiver import (
    DechirpedRecord,
    RadarConfig,
    RangeProfile,
    dechirp_phase,
    dechirp_synthesize,
    dechirp_waveform_oracle,
    mainlobe_width,
    predicted_band_weights,
    range_profile,
    resolve_peaks,
    subband_extract,
)
from .scene import C_LIGHT, PointScatterer, RotatingPlatform, Scene, add_noise, scatterers_at
from .waveform import (
    LfmParams,
    SampledSignal,
    analytic_signal,
    generate_lfm,
    instantaneous_frequency,
    lfm_phase,
)

__version__ = "1.0.0"

__all__ = [
    "BandSegment",
    "C_LIGHT",
    "DataMatrix",
    "DechirpedRecord",
    "GappedSpectrum",
    "HarmonicSpectrum",
    "IsarImage",
    "LfmParams",
    "MzmParams",
    "PointScatterer",
    "PoleModel",
    "RadarConfig",
    "RangeProfile",
    "RotatingPlatform",
    "SampledSignal",
    "ScenarioConfig",
    "Scene",
    "SubbandPlan",
    "SubbandSpan",
    "add_noise",
    "analytic_signal",
    "assemble_gapped",
    "backend",
    "blob_peaks",
    "collect_cpi",
    "count_blobs",
    "crop_range",
    "dechirp_phase",
    "dechirp_synthesize",
    "dechirp_waveform_oracle",
    "estimate_poles",
    "fit_pole_model",
    "field_sideband_amplitudes",
    "fuse_direct",
    "gap_fill_profile",
    "generate_lfm",
    "harmonic_amplitudes",
    "instantaneous_frequency",
    "isar_image",
    "lfm_phase",
    "mainlobe_width",
    "mzm_pd_oracle",
    "parse_config",
    "predicted_band_weights",
    "range_profile",
    "refine_global",
    "resolve_peaks",
    "rim_truth",
    "run",
    "scatterers_at",
    "scramble_band_phases",
    "subband_extract",
    "subband_plan",
    "to_band_segment",
    "write_isar_csv",
    "write_isar_pgm",
]
