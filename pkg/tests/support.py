"""Shared builders for the test suite: reference configs, scenes, segments."""
from __future__ import annotations

import numpy as np

from mbradar.fusion import BandSegment, assemble_gapped, to_band_segment
from mbradar.photonics import MzmParams
from mbradar.receiver import RadarConfig, dechirp_synthesize, subband_extract
from mbradar.scene import PointScatterer, Scene
from mbradar.waveform import LfmParams

C = 299792458.0

# Pair phases used by the bundled ranging experiments: each sets the
# two-target interference at the experiment's operating point so the pair
# stays separable at its design separation.
PAIR_PHASE = {
    0.15: 1.9198621771937625,
    0.05: 2.2689280275926285,
    0.0085: 3.8292523788755592,
}


def paper_cfg(l_max: int = 4, pm_index: float = 0.05) -> RadarConfig:
    """Bench-scale reference: 4.7 GHz start, 1 GHz sweep, 100 us, 48 MS/s."""
    lfm = LfmParams(4.7e9, 1.0e9, 100e-6, 2.2 * 5.7e9)
    mzm = MzmParams(2.5, np.pi / 4, pm_index)
    return RadarConfig(
        lfm=lfm,
        mzm=mzm,
        l_max=4 if l_max == 4 else l_max,
        prf=2000.0,
        dechirp_sample_rate=48e6,
        range_window=(1.8, 2.2),
    )


def scaled_cfg(pm_index: float = 0.002) -> RadarConfig:
    """Same tone geometry as paper_cfg with RF pulled down 100x.

    The chirp rate keeps l*k*tau at the bench values while the waveform-level
    oracle stays affordable: 1.2 GS/s for 100 us instead of 12+ GS/s.
    """
    lfm = LfmParams(47e6, 10e6, 100e-6, 1.2e9)
    mzm = MzmParams(2.5, np.pi / 4, pm_index)
    return RadarConfig(
        lfm=lfm,
        mzm=mzm,
        l_max=4,
        prf=2000.0,
        dechirp_sample_rate=48e6,
        range_window=(180.0, 220.0),
    )


def pair_scene(
    sep: float,
    phase2: float | None = None,
    center: float = 2.0,
    refl: tuple[float, float] = (1.0, 1.0),
) -> Scene:
    """Two point targets straddling center by sep, second carrying phase2."""
    if phase2 is None:
        phase2 = PAIR_PHASE[sep]
    return Scene(
        scatterers=(
            PointScatterer(0.0, center - 0.5 * sep, refl[0], 0.0),
            PointScatterer(0.0, center + 0.5 * sep, refl[1], phase2),
        ),
        noise_snr_db=None,
        spreading_loss=False,
    )


def ideal_segments(scene: Scene, cfg: RadarConfig, pulse: int = 0) -> list[BandSegment]:
    """Per-band segments from single-band synthesis, skipping extraction.

    Exercises the pole-recovery layer on data that matches its model exactly;
    chain_segments carries the extraction filters' perturbations as well.
    """
    return [
        to_band_segment(dechirp_synthesize(scene, cfg, pulse, bands=(l,)), l, cfg)
        for l in range(1, cfg.l_max + 1)
    ]


def chain_segments(scene: Scene, cfg: RadarConfig, pulse: int = 0) -> list[BandSegment]:
    """Per-band segments through the full extraction chain."""
    rec = dechirp_synthesize(scene, cfg, pulse)
    return [
        to_band_segment(subband_extract(rec, l, cfg), l, cfg)
        for l in range(1, cfg.l_max + 1)
    ]


def ideal_gapped(scene: Scene, cfg: RadarConfig, pulse: int = 0):
    return assemble_gapped(ideal_segments(scene, cfg, pulse))


def resolved(peaks: list[tuple[float, float]], r1: float, r2: float, sep: float) -> bool:
    """True when at least two profile peaks bracket the pair's own footprint.

    resolve_peaks returns every local maximum above the floor, so sidelobes
    elsewhere in the window must not count for or against the pair; only
    peaks within half a separation outside [r1, r2] do.
    """
    lo, hi = r1 - 0.5 * sep, r2 + 0.5 * sep
    inside = [p for p in peaks if lo <= p[0] <= hi]
    return len(inside) >= 2
