"""Range-Doppler imaging of a rotating platform from multiband pulse trains.

Slow-time phase at the band's center frequency maps rotation rate to
cross-range: a scatterer at polar angle alpha on a rim of radius r has
cross-range x(t) = r*sin(alpha + omega*t), range rate Rdot = -omega*x, and
Doppler f_d = -2*Rdot/lambda = 2*omega*x/lambda read out by the
pulse-to-pulse FFT, so cross-range = f_d * lambda_c / (2*omega).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fusion
from .receiver import RadarConfig, dechirp_synthesize, subband_extract
from .scene import C_LIGHT, Scene


@dataclass(frozen=True)
class DataMatrix:
    """CPI of spectra: rows are pulses, columns are frequency bins."""

    spectra: np.ndarray
    freqs: np.ndarray
    t_slow: np.ndarray
    mode: str
    center_freq: float

    def __post_init__(self) -> None:
        if self.spectra.ndim != 2:
            raise ValueError("spectra must be 2-D (pulses x bins)")
        if self.spectra.shape[0] != self.t_slow.shape[0]:
            raise ValueError("one slow-time stamp per pulse row")
        if self.spectra.shape[1] != self.freqs.shape[0]:
            raise ValueError("one frequency per column")

    @property
    def num_pulses(self) -> int:
        return self.spectra.shape[0]


@dataclass(frozen=True)
class IsarImage:
    """Intensity image on (range, cross-range) axes."""

    intensity: np.ndarray
    ranges: np.ndarray
    cross_ranges: np.ndarray
    mode: str

    def __post_init__(self) -> None:
        if self.intensity.shape != (self.ranges.size, self.cross_ranges.size):
            raise ValueError("intensity must be ranges x cross_ranges")
        if np.any(self.intensity < 0):
            raise ValueError("intensity must be nonnegative")


def collect_cpi(
    scene: Scene,
    cfg: RadarConfig,
    n_pulses: int,
    mode: str = "fused-allpole",
    max_order: int = 10,
    sv_threshold: float = fusion.SV_THRESHOLD_DEFAULT,
    pencil_stride: int = 1,
) -> DataMatrix:
    """Synthesize n_pulses de-chirped echoes and stack their band spectra.

    Rows hold the band's spectrum samples (the frequency-domain form of the
    de-chirped slice; the map between them is an invertible DFT). mode
    'subband:L' keeps band L alone; 'fused-direct' stores the assembled
    gapped spectrum with gaps left at zero; 'fused-allpole' fits a pole
    model per pulse (warm-started from the previous pulse) and stores
    gap-filled spectra. A pulse whose fit misses the residual gate falls
    back to zero-filled gaps for that row, so one bad fit degrades one row
    to the direct baseline instead of corrupting the image. A platform with
    omega = 0 is allowed (rows come out identical).
    """
    if scene.platform is None:
        raise ValueError("collect_cpi needs a rotating-platform scene")
    if n_pulses < 2:
        raise ValueError("need at least 2 pulses")
    sub_l = None
    if mode.startswith("subband:"):
        sub_l = int(mode.split(":", 1)[1])
        if not 1 <= sub_l <= cfg.l_max:
            raise ValueError(f"subband index must lie in 1..{cfg.l_max}")
    elif mode not in ("fused-direct", "fused-allpole"):
        raise ValueError(f"unknown mode {mode!r}")

    t_slow = np.arange(n_pulses) / cfg.prf
    rows = []
    freqs = None
    warm: fusion.PoleModel | None = None
    for p in range(n_pulses):
        rec = dechirp_synthesize(scene, cfg, pulse_index=p)
        if sub_l is not None:
            seg = fusion.to_band_segment(subband_extract(rec, sub_l, cfg), sub_l, cfg)
            g = fusion.assemble_gapped([seg])
            row = np.where(g.mask, g.values, 0.0)
        else:
            segs = [
                fusion.to_band_segment(subband_extract(rec, l, cfg), l, cfg)
                for l in range(1, cfg.l_max + 1)
            ]
            g = fusion.assemble_gapped(segs)
            if mode == "fused-direct":
                row = np.where(g.mask, g.values, 0.0)
            else:
                model = None
                if warm is not None:
                    model = fusion.refine_global(g, warm)
                if model is None or model.degraded or (
                    model.fit_residual > fusion.RESIDUAL_GATE_DEFAULT
                ):
                    model = fusion.fit_pole_model(
                        g,
                        max_order,
                        sv_threshold=sv_threshold,
                        range_window=cfg.range_window,
                        pencil_stride=pencil_stride,
                    )
                if model.degraded or model.fit_residual > fusion.RESIDUAL_GATE_DEFAULT:
                    row = np.where(g.mask, g.values, 0.0)
                else:
                    warm = model
                    v = g.values.copy()
                    v[~g.mask] = model.eval(g.freqs[~g.mask])
                    row = v
        if freqs is None:
            freqs = g.freqs
        rows.append(row)

    spectra = np.asarray(rows)
    if sub_l is not None:
        # Trim the single band's occupied run so columns are all signal.
        occ = np.abs(spectra[0]) > 0
        if not np.any(occ):
            occ = np.ones(spectra.shape[1], dtype=bool)
        spectra = spectra[:, occ]
        freqs = freqs[occ]
    center = 0.5 * (freqs[0] + freqs[-1])
    label = f"subband:{sub_l}" if sub_l is not None else mode
    return DataMatrix(spectra, freqs, t_slow, label, float(center))


def isar_image(
    dm: DataMatrix,
    cfg: RadarConfig,
    scene_meta: Scene | float,
    window: str = "rect",
    map_crossrange: bool = True,
) -> IsarImage:
    """Range FFT across columns, Doppler FFT down rows, both orthonormal.

    scene_meta supplies the rotation rate: either the Scene that produced the
    data matrix or a bare angular rate in rad/s. The range IDFT leaves each
    range bin a slow-time phase of -2*pi*f_c*tau(t) with f_c the band
    centroid, so the Doppler carrier is the center frequency stored on the
    data matrix and positive Doppler maps to positive cross-range
    x = r*sin(alpha + omega*t). map_crossrange=False keeps the axis in
    Doppler hertz, the only choice allowed when the rotation rate is 0.
    Orthonormal transforms keep image energy equal to data-matrix energy.
    """
    if isinstance(scene_meta, Scene):
        if scene_meta.platform is None:
            raise ValueError("scene_meta has no platform; pass the angular rate directly")
        angular_rate = float(scene_meta.platform.angular_rate)
    else:
        angular_rate = float(scene_meta)
    if map_crossrange and angular_rate == 0.0:
        raise ValueError("cross-range mapping is undefined at zero rotation rate")
    n_p, n_f = dm.spectra.shape
    prf_dm = 1.0 / float(dm.t_slow[1] - dm.t_slow[0])
    if abs(prf_dm - cfg.prf) > 1e-6 * cfg.prf:
        raise ValueError("data matrix PRF disagrees with cfg.prf")
    if window == "hann":
        w_r = np.hanning(n_f)[None, :]
        w_d = np.hanning(n_p)[:, None]
    elif window == "rect":
        w_r = np.ones((1, n_f))
        w_d = np.ones((n_p, 1))
    else:
        raise ValueError(f"unknown window {window!r}; use 'hann' or 'rect'")

    df = float(dm.freqs[1] - dm.freqs[0])
    prf = 1.0 / float(dm.t_slow[1] - dm.t_slow[0])
    # p[m] = (1/sqrt(Nf)) sum_n V_n exp(+j*2*pi*n*m/Nf): delay profile per pulse.
    range_prof = np.fft.ifft(dm.spectra * w_r, axis=1) * np.sqrt(n_f)
    doppler = np.fft.fftshift(np.fft.fft(range_prof * w_d, axis=0), axes=0) / np.sqrt(n_p)

    tau = np.arange(n_f) / (n_f * df)
    ranges = C_LIGHT * tau / 2.0
    nu = np.fft.fftshift(np.fft.fftfreq(n_p, 1.0 / prf))
    # Fixed-bin phase is -2*pi*f_c*tau(t), so nu = -2*Rdot/lambda = +2*omega*x/lambda.
    if map_crossrange:
        lam = C_LIGHT / dm.center_freq
        cross = nu * lam / (2.0 * angular_rate)
    else:
        cross = nu
    intensity = np.abs(doppler.T) ** 2  # rows: range bins, cols: doppler bins
    order = np.argsort(cross)
    return IsarImage(intensity[:, order], ranges, cross[order], dm.mode)


def crop_range(img: IsarImage, r_lo: float, r_hi: float) -> IsarImage:
    """Display helper: keep rows with r_lo <= range <= r_hi."""
    keep = (img.ranges >= r_lo) & (img.ranges <= r_hi)
    if not np.any(keep):
        raise ValueError("crop window contains no range bins")
    return IsarImage(img.intensity[keep], img.ranges[keep], img.cross_ranges, img.mode)


def blob_peaks(img: IsarImage, floor_db: float = 10.0) -> list[tuple[float, float, float]]:
    """Peak (range, cross-range, intensity) of each 8-connected bright blob.

    Bright means within floor_db (intensity dB) of the image maximum; each
    connected component contributes its single largest pixel.
    """
    thr = img.intensity.max() * 10.0 ** (-floor_db / 10.0)
    alive = img.intensity > thr
    seen = np.zeros_like(alive, dtype=bool)
    n_r, n_c = alive.shape
    peaks = []
    live = np.argwhere(alive)
    for i, j in live:
        if seen[i, j]:
            continue
        stack = [(i, j)]
        seen[i, j] = True
        best = (img.intensity[i, j], i, j)
        while stack:
            a, b = stack.pop()
            for da in (-1, 0, 1):
                for db in (-1, 0, 1):
                    u, v = a + da, b + db
                    if 0 <= u < n_r and 0 <= v < n_c and alive[u, v] and not seen[u, v]:
                        seen[u, v] = True
                        stack.append((u, v))
                        if img.intensity[u, v] > best[0]:
                            best = (img.intensity[u, v], u, v)
        peaks.append((float(img.ranges[best[1]]), float(img.cross_ranges[best[2]]), best[0]))
    peaks.sort(key=lambda p: -p[2])
    return peaks


def count_blobs(img: IsarImage, floor_db: float = 10.0) -> int:
    """Count 8-connected components of pixels within floor_db of the peak."""
    return len(blob_peaks(img, floor_db))


def rim_truth(scene: Scene, t: float) -> list[tuple[float, float]]:
    """(slant range, cross-range) of each rim scatterer at slow time t."""
    p = scene.platform
    if p is None:
        raise ValueError("scene has no platform")
    out = []
    for alpha in p.scatterer_angles:
        a = alpha + p.angular_rate * t
        rng = np.sqrt(p.center_range**2 + p.radius**2 + 2.0 * p.center_range * p.radius * np.cos(a))
        out.append((float(rng), float(p.radius * np.sin(a))))
    return out


def write_isar_csv(img: IsarImage, path: str) -> None:
    """Grid form: first row cross-range axis, first column range axis."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("range_m\\cross_m," + ",".join(repr(float(c)) for c in img.cross_ranges) + "\n")
        for i, r in enumerate(img.ranges):
            row = ",".join(repr(float(v)) for v in img.intensity[i])
            fh.write(f"{float(r)!r},{row}\n")


def write_isar_pgm(img: IsarImage, path: str, dyn_range_db: float = 40.0) -> None:
    """8-bit PGM of 10*log10(I/Imax) clipped to [-dyn_range_db, 0]."""
    peak = img.intensity.max()
    if peak <= 0:
        raise ValueError("image has no energy")
    db = 10.0 * np.log10(np.maximum(img.intensity / peak, 1e-30))
    db = np.clip(db, -dyn_range_db, 0.0)
    pix = np.round((db + dyn_range_db) / dyn_range_db * 255.0).astype(np.uint8)
    pix = pix[::-1]  # row 0 at top should be the largest range
    with open(path, "wb") as fh:
        fh.write(f"P5 {pix.shape[1]} {pix.shape[0]} 255\n".encode())
        fh.write(pix.tobytes())
