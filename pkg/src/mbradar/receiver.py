"""De-chirped record synthesis, subband separation, and range profiles.

The receive chain mixes each echo harmonic l against the same harmonic of the
reference, so a scatterer at delay tau lands at the constant tone l*k*tau with
initial phase psi_l = 2*pi*l*f_start*tau - pi*l*k*tau^2 (the residual video
phase term is the quadratic part). Records are stored analytic (complex) so
band-to-band and pulse-to-pulse phase survives for fusion and imaging.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.fft import next_fast_len
from scipy.signal import firwin, hilbert, windows

from . import kernels
from .photonics import MzmParams, field_sideband_amplitudes, harmonic_amplitudes, mzm_pd_oracle
from .scene import C_LIGHT, Scene, add_noise, scatterers_at
from .waveform import LfmParams, SampledSignal, lfm_phase

# Kaiser subband filter design targets. The interval isolation requirement is
# 60 dB; the filter is designed 40 dB deeper because the strongest band sits
# 16.6 dB above the weakest and the edge restoration in subband_extract
# amplifies whatever stopband residue survives near the record ends.
STOPBAND_DB = 100.0
TRANSITION_GUARD_FRACTION = 0.2
# Fraction of each inter-band guard conceded to the passband (capped in Hz)
# so the record window's mainlobe, centered on an edge tone, fits inside the
# passband instead of being truncated by the filter skirt.
PASSBAND_ROOM_FRACTION = 0.4
PASSBAND_ROOM_CAP_HZ = 5.0e4
# Record edge taper (Tukey fraction) applied before the fusion readout's
# spectral operations on a gated record: an off-bin tone's rect-gate Dirichlet
# skirts span the whole de-chirp axis, and rotating them with the RVP all-pass
# folds percent-level ripple back across the record.
RECORD_TAPER_ALPHA = 0.05
# Record window for subband extraction. The narrowest guard is 4 DFT bins, so
# the window must put its sidelobes below the cross-band budget within that
# span; a Kaiser with this beta has a ~4-bin mainlobe and <-90 dB sidelobes.
EXTRACT_WINDOW_BETA = 12.0
# The extraction window is divided back out where it exceeds this floor; the
# few samples nearer the record ends stay attenuated rather than letting the
# division blow up filter residue there.
UNWINDOW_FLOOR = 5.0e-5


@dataclass(frozen=True)
class RadarConfig:
    """End-to-end radar parameterization shared by every processing stage."""

    lfm: LfmParams
    mzm: MzmParams
    l_max: int = 4
    prf: float = 2000.0
    dechirp_sample_rate: float = 48e6
    range_window: tuple[float, float] = (1.8, 2.2)

    def __post_init__(self) -> None:
        if self.l_max < 1:
            raise ValueError("l_max must be >= 1")
        r_min, r_max = self.range_window
        if not (0 < r_min < r_max):
            raise ValueError("range_window must satisfy 0 < r_min < r_max")
        if 1.0 / self.prf < self.lfm.duration + self.tau_max:
            raise ValueError("pulse repetition interval shorter than sweep + max delay")
        f_top = 2.0 * self.l_max * self.lfm.chirp_rate * self.tau_max
        if self.dechirp_sample_rate <= f_top:
            raise ValueError(
                f"dechirp_sample_rate must exceed 2*l_max*k*tau_max = {f_top:g} Hz"
            )

    @property
    def tau_min(self) -> float:
        return 2.0 * self.range_window[0] / C_LIGHT

    @property
    def tau_max(self) -> float:
        return 2.0 * self.range_window[1] / C_LIGHT

    def tone_interval(self, l: int) -> tuple[float, float]:
        """De-chirp frequency interval occupied by subband l over the range window."""
        k = self.lfm.chirp_rate
        return (l * k * self.tau_min, l * k * self.tau_max)

    def check_tone_intervals_disjoint(self) -> None:
        """Raise if adjacent subband tone intervals overlap for this range window."""
        for l in range(1, self.l_max):
            _, hi = self.tone_interval(l)
            lo_next, _ = self.tone_interval(l + 1)
            if hi >= lo_next:
                raise ValueError(
                    f"subband tone intervals overlap: l={l} ends at {hi:g} Hz, "
                    f"l={l + 1} starts at {lo_next:g} Hz; shrink the range window "
                    f"(need r_max/r_min < {(l + 1) / l:g})"
                )


@dataclass(frozen=True)
class DechirpedRecord:
    """Analytic de-chirped samples for one pulse."""

    samples: np.ndarray
    sample_rate: float
    pulse_index: int
    t_slow: float

    def __post_init__(self) -> None:
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("record contains non-finite samples")


@dataclass(frozen=True)
class RangeProfile:
    """Magnitude-versus-range line on a uniform grid."""

    ranges: np.ndarray
    magnitudes: np.ndarray
    band_label: str

    def __post_init__(self) -> None:
        if self.ranges.shape != self.magnitudes.shape:
            raise ValueError("ranges and magnitudes must have the same length")
        if self.ranges.size and np.any(np.diff(self.ranges) <= 0):
            raise ValueError("ranges must be strictly increasing")

    @property
    def grid_step(self) -> float:
        return float(self.ranges[1] - self.ranges[0])


def record_length(cfg: RadarConfig) -> int:
    return int(np.floor(cfg.lfm.duration * cfg.dechirp_sample_rate))


def dechirp_phase(l: int, tau: float, cfg: RadarConfig) -> float:
    """Initial phase psi_l = 2*pi*l*f_start*tau - pi*l*k*tau^2 of the de-chirped tone."""
    k = cfg.lfm.chirp_rate
    return 2.0 * np.pi * l * cfg.lfm.f_start * tau - np.pi * l * k * tau * tau


def dechirp_synthesize(
    scene: Scene,
    cfg: RadarConfig,
    pulse_index: int,
    bands: tuple[int, ...] | None = None,
) -> DechirpedRecord:
    """Analytic composite of all scatterer/harmonic tones for one pulse.

    Each (tau, a) contributes w_l * a * exp(j*(2*pi*l*k*tau*t + psi_l)) per
    harmonic l, with w_l the signed transmit coefficient. Samples before the
    latest echo arrival (t < tau_max of the scene) are outside the full-overlap
    region and are zeroed. bands limits synthesis to those harmonics (default
    all of 1..l_max); a single-band record is the ideal-extraction limit that
    a finite-record FIR subband_extract can only approximate.
    """
    t_slow = pulse_index / cfg.prf
    pairs = scatterers_at(scene, t_slow)
    weights = harmonic_amplitudes(cfg.mzm, cfg.l_max).coefficients
    k = cfg.lfm.chirp_rate
    fs = cfg.dechirp_sample_rate
    if bands is None:
        bands = tuple(range(1, cfg.l_max + 1))
    if any(not 1 <= l <= cfg.l_max for l in bands):
        raise ValueError(f"bands must lie in 1..{cfg.l_max}")

    freqs, coefs = [], []
    for tau, amp in pairs:
        for l in bands:
            f_tone = l * k * tau
            if f_tone >= fs / 2.0:
                raise ValueError(
                    f"de-chirped tone for harmonic l={l}, delay tau={tau:g} s sits at "
                    f"{f_tone:g} Hz, above Nyquist {fs / 2.0:g} Hz"
                )
            freqs.append(f_tone)
            coefs.append(weights[l] * amp * np.exp(1j * dechirp_phase(l, tau, cfg)))

    n = record_length(cfg)
    t = np.arange(n) / fs
    samples = kernels.sum_cisoids(t, np.array(freqs), np.array(coefs))
    tau_scene = max(tau for tau, _ in pairs)
    samples[t < tau_scene] = 0.0

    if scene.noise_enabled:
        noisy = add_noise(
            SampledSignal(samples, fs), scene.noise_snr_db, [scene.rng_seed, pulse_index]
        )
        samples = noisy.samples
    return DechirpedRecord(samples, fs, pulse_index, t_slow)


def dechirp_waveform_oracle(scene: Scene, cfg: RadarConfig, pulse_index: int) -> DechirpedRecord:
    """Full waveform-level receive chain, used only to cross-check the analytic path.

    Builds the photodetected multiband transmit, delays and sums the echoes
    exactly (the delayed chirp phase is analytic), phase-modulates the MZM
    reference field envelope, selects the positive-frequency sideband family,
    square-law detects, and low-pass filters to the de-chirp band. Feasible
    only at scaled-down RF parameters.
    """
    fs = cfg.lfm.sample_rate
    q_max = cfg.l_max + 2
    needed = 2.0 * (q_max + cfg.l_max) * cfg.lfm.f_stop
    if fs < needed:
        raise ValueError(
            f"waveform sample_rate {fs:g} Hz cannot carry the receive-chain products; "
            f"need >= {needed:g} Hz"
        )
    t_slow = pulse_index / cfg.prf
    pairs = scatterers_at(scene, t_slow)
    n = int(np.floor(cfg.lfm.duration * fs))
    t = np.arange(n) / fs

    # Reference arm: MZM field envelope (its square is the transmit intensity).
    m, theta = cfg.mzm.modulation_index, cfg.mzm.bias_angle
    drive = np.cos(lfm_phase(cfg.lfm, t))
    e_ref = np.cos(0.5 * (theta + m * drive))

    # Echo: delayed transmit intensities, DC removed (it does not radiate).
    b0 = harmonic_amplitudes(cfg.mzm, 0).coefficients[0]
    echo = np.zeros(n)
    for tau, amp in pairs:
        if tau >= cfg.lfm.duration:
            raise ValueError(f"echo delay {tau:g} s exceeds the sweep; no overlap")
        td = t - tau
        inside = (td >= 0) & (td < cfg.lfm.duration)
        delayed = np.zeros(n)
        delayed[inside] = 1.0 + np.cos(
            theta + m * np.cos(lfm_phase(cfg.lfm, td[inside]))
        )
        base = delayed - b0 * inside.astype(float)
        ph = float(np.angle(amp))
        if ph != 0.0:
            # The upper-sideband beat conjugates the echo's RF phase onto the
            # positive-frequency de-chirp tone, so realizing the model phase
            # ph on that tone means rotating the RF components by -ph (an
            # analytic rotation of the real waveform).
            base = np.real(np.exp(-1j * ph) * hilbert(base))
        echo += abs(amp) * base

    # Small-signal phase modulation of the reference by the echo, then OBPF,
    # square-law detection, low-pass. The OBPF selects the upper sideband
    # family: its edge sits between the carrier and the first upper sideband,
    # so the carrier line is rejected along with everything below it. Keeping
    # the carrier would be fatal, not merely inaccurate: the carrier-referenced
    # beats cancel the sideband-referenced ones to first order and the l=1
    # de-chirp tone vanishes entirely.
    e_pm = e_ref * np.exp(1j * cfg.mzm.pm_index * echo)
    spec = np.fft.fft(e_pm)
    f_axis = np.fft.fftfreq(n, 1.0 / fs)
    spec[f_axis < 0.5 * cfg.lfm.f_start] = 0.0
    e_sel = np.fft.ifft(spec)
    i_pd = np.abs(e_sel) ** 2
    i_pd -= i_pd.mean()

    cutoff = 0.5 * cfg.lfm.f_start
    spec_pd = np.fft.fft(i_pd)
    keep = np.abs(f_axis) <= cutoff
    spec_pd[~keep] = 0.0
    # Analytic form of the filtered beat: one-sided spectrum, DC untouched.
    spec_pd[f_axis < 0] = 0.0
    spec_pd[f_axis > 0] *= 2.0
    samples = np.fft.ifft(spec_pd)
    return DechirpedRecord(samples, fs, pulse_index, t_slow)


def predicted_band_weights(mzm: MzmParams, l_max: int) -> np.ndarray:
    """Expected oracle de-chirp amplitude per band, up to one global constant.

    With the carrier rejected by the OBPF, the correlation-type beats (each
    selected reference line against the echo sideband l above it, and against
    the one l below) cancel pairwise to first order. What survives is the
    convolution family: reference line q beating the echo's upper sideband of
    line l-q, summed over q = 0..l-1 (q = 0 is the echo sideband of the
    carrier itself, which lands inside the selected family even though the
    carrier line does not). The composite weight is therefore B_l times the
    lag-l self-convolution of the one-sided field sideband series. Used by
    tests to check the oracle's cross-band magnitudes.
    """
    coefs = harmonic_amplitudes(mzm, l_max).coefficients
    a = field_sideband_amplitudes(mzm, l_max)
    one_sided = np.concatenate(([a[0]], 0.5 * a[1:]))
    out = np.zeros(l_max + 1)
    for l in range(1, l_max + 1):
        conv = float(np.sum(one_sided[:l] * one_sided[l:0:-1]))
        out[l] = coefs[l] * conv
    return out


def _kaiser_taps(transition_hz: float, fs: float) -> tuple[int, float]:
    # Kaiser formulas for STOPBAND_DB attenuation; odd length keeps linear
    # phase type I so the zero-phase response is purely real.
    beta = 0.1102 * (STOPBAND_DB - 8.7)
    numtaps = int(np.ceil((STOPBAND_DB - 7.95) / (2.285 * 2.0 * np.pi * transition_hz / fs))) + 1
    if numtaps % 2 == 0:
        numtaps += 1
    return numtaps, beta


def _zero_phase_response(l: int, cfg: RadarConfig, n: int) -> np.ndarray:
    """Real zero-phase response of the subband-l Kaiser FIR on an n-point DFT grid.

    The designed FIR can be longer than the record (its transition width is
    set by the inter-band guard, not by 1/T); applying it circularly on the
    record's own grid avoids the edge taper a linear convolution would impose.
    Taps are alias-folded to n and centered, which compensates group delay
    exactly.
    """
    fs = cfg.dechirp_sample_rate
    lo, hi = cfg.tone_interval(l)
    guards = []
    if l >= 2:
        guards.append(lo - cfg.tone_interval(l - 1)[1])
    else:
        guards.append(lo)
    if l < cfg.l_max:
        guards.append(cfg.tone_interval(l + 1)[0] - hi)
    else:
        guards.append(fs / 2.0 - hi)
    transition = TRANSITION_GUARD_FRACTION * min(guards)
    # Push the passband edges into the guards so an edge tone's record-window
    # mainlobe passes intact; the stopband edge still clears the neighboring
    # band's nearest tone because room + transition <= 0.6 of the guard.
    room_lo = min(PASSBAND_ROOM_FRACTION * guards[0], PASSBAND_ROOM_CAP_HZ)
    room_hi = min(PASSBAND_ROOM_FRACTION * guards[1], PASSBAND_ROOM_CAP_HZ)
    numtaps, beta = _kaiser_taps(transition, fs)
    h = firwin(
        numtaps,
        [lo - room_lo - transition / 2.0, hi + room_hi + transition / 2.0],
        window=("kaiser", beta),
        pass_zero=False,
        fs=fs,
    )
    center = (numtaps - 1) // 2
    folded = np.zeros(n)
    np.add.at(folded, (np.arange(numtaps) - center) % n, h)
    return np.real(np.fft.fft(folded))


def subband_extract(rec: DechirpedRecord, l: int, cfg: RadarConfig) -> DechirpedRecord:
    """Band-pass the record to subband l's tone interval, zero phase.

    The filter is applied leakage-controlled: window the record, filter
    circularly, divide the window back out where it is above UNWINDOW_FLOOR.
    Filtering the raw gated record instead would band-limit away each tone's
    own gate skirts and leave several percent of broadband ripple behind; the
    window concentrates each tone's energy to a mainlobe narrower than the
    filter passband, so what the filter removes is below the stopband target
    everywhere that the window is divided out again.
    """
    if not 1 <= l <= cfg.l_max:
        raise ValueError(f"l must be in 1..{cfg.l_max}")
    cfg.check_tone_intervals_disjoint()
    n = rec.samples.shape[0]
    response = _zero_phase_response(l, cfg, n)
    taper = windows.kaiser(n, EXTRACT_WINDOW_BETA)
    filtered = np.fft.ifft(np.fft.fft(rec.samples * taper) * response)
    restore = taper >= UNWINDOW_FLOOR
    filtered[restore] = filtered[restore] / taper[restore]
    return replace(rec, samples=filtered)


def range_profile(
    rec: DechirpedRecord,
    l: int,
    cfg: RadarConfig,
    window: str = "hann",
    normalize: bool = False,
    clip_to_window: bool = True,
) -> RangeProfile:
    """Windowed, >=8x zero-padded FFT mapped to range by r = c*f/(2*l*k)."""
    x = rec.samples
    n = x.shape[0]
    x = x * _window_vector(window, n)
    nfft = next_fast_len(8 * n)
    spec = np.fft.fft(x, nfft)
    f = np.arange(nfft // 2) * (rec.sample_rate / nfft)
    k = cfg.lfm.chirp_rate
    ranges = C_LIGHT * f / (2.0 * l * k)
    mags = np.abs(spec[: nfft // 2])
    if clip_to_window:
        keep = (ranges >= cfg.range_window[0]) & (ranges <= cfg.range_window[1])
        ranges, mags = ranges[keep], mags[keep]
    if normalize and mags.size and mags.max() > 0:
        mags = mags / mags.max()
    return RangeProfile(ranges, mags, f"subband:{l}")


def _window_vector(window: str, n: int) -> np.ndarray:
    if window == "rect":
        return np.ones(n)
    if window == "hann":
        return np.hanning(n)
    raise ValueError(f"unknown window {window!r}; use 'hann' or 'rect'")


def resolve_peaks(
    profile: RangeProfile,
    min_separation_db: float = 3.0,
    floor_db: float = 10.0,
) -> list[tuple[float, float]]:
    """Local maxima that are mutually separated by >= min_separation_db valleys.

    A candidate only counts if it sits within floor_db of the profile maximum:
    without that floor, window sidelobes (rect: -13 dB, separated by nulls)
    would satisfy the valley rule and a single tone would report many peaks.
    Returns (range, magnitude) pairs sorted by range.
    """
    m = profile.magnitudes
    if m.size == 0:
        return []
    peak_floor = m.max() * 10.0 ** (-floor_db / 20.0)
    if m.max() == 0:
        return []
    idx = [
        i
        for i in range(1, m.size - 1)
        if m[i] >= m[i - 1] and m[i] > m[i + 1] and m[i] >= peak_floor
    ]
    idx.sort(key=lambda i: m[i], reverse=True)
    sep = 10.0 ** (-min_separation_db / 20.0)
    accepted: list[int] = []
    for i in idx:
        ok = True
        for j in accepted:
            lo, hi = (i, j) if i < j else (j, i)
            valley = m[lo : hi + 1].min()
            if valley > sep * min(m[i], m[j]):
                ok = False
                break
        if ok:
            accepted.append(i)
    accepted.sort()
    return [(float(profile.ranges[i]), float(m[i])) for i in accepted]


def mainlobe_width(profile: RangeProfile, drop_db: float = 3.0) -> float:
    """Width of the tallest lobe at drop_db below its peak, linearly interpolated."""
    m = profile.magnitudes
    if m.size < 3:
        raise ValueError("profile too short")
    p = int(np.argmax(m))
    level = m[p] * 10.0 ** (-drop_db / 20.0)

    def cross(direction: int) -> float:
        i = p
        while 0 < i < m.size - 1:
            j = i + direction
            if m[j] < level:
                frac = (m[i] - level) / (m[i] - m[j])
                return float(profile.ranges[i] + frac * (profile.ranges[j] - profile.ranges[i]))
            i = j
        return float(profile.ranges[i])

    return cross(+1) - cross(-1)
