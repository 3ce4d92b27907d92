"""Coherent multiband fusion: de-chirp duality, gapped assembly, all-pole gap filling.

A de-chirped subband record is, sample for sample, the target spectral
response H(f) = sum_i a_i*exp(-j*2*pi*f*tau_i) read out along f = l*(f_start
+ k*t), up to the residual video phase and one global constant. Stacking the
bands therefore gives a sparsely occupied ultrawide spectrum whose gaps an
all-pole model (delays = pole angles) can fill.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.fft import next_fast_len
from scipy.linalg import hankel
from scipy.signal import windows

from . import kernels
from .photonics import harmonic_amplitudes
from .receiver import (
    RECORD_TAPER_ALPHA,
    DechirpedRecord,
    RadarConfig,
    RangeProfile,
    _window_vector,
    resolve_peaks,
)
from .scene import C_LIGHT

DEFAULT_DELTA_F = 2.5e6
SV_THRESHOLD_DEFAULT = 1e-3
CONDITION_LIMIT = 1e12
RESIDUAL_GATE_DEFAULT = 0.1
SEGMENT_MERGE_RTOL = 1e-6
# Extra samples kept clear of the record taper at readout; 24 samples = 2
# native grid strides for the slowest band. See to_band_segment.
EDGE_GUARD_SAMPLES = 24


@dataclass(frozen=True)
class BandSegment:
    """Complex samples of H(f) across one harmonic band on the global grid.

    freqs covers [f_low_nominal, f_high_nominal) at spacing delta_f; the
    nominal edges are kept so assembly can build the full closed-span grid.
    """

    l: int
    freqs: np.ndarray
    values: np.ndarray
    f_low_nominal: float
    f_high_nominal: float

    def __post_init__(self) -> None:
        if self.freqs.shape != self.values.shape:
            raise ValueError("freqs and values must have the same length")
        d = np.diff(self.freqs)
        if self.freqs.size > 1 and (np.any(d <= 0) or np.ptp(d) > 1e-3):
            raise ValueError("freqs must be uniform and strictly increasing")

    @property
    def delta_f(self) -> float:
        return float(self.freqs[1] - self.freqs[0])


@dataclass(frozen=True)
class GappedSpectrum:
    """Global uniform grid with per-bin occupancy mask."""

    freqs: np.ndarray
    values: np.ndarray
    mask: np.ndarray
    delta_f: float

    @property
    def occupancy(self) -> float:
        return float(np.count_nonzero(self.mask)) / self.mask.size

    def occupied(self) -> tuple[np.ndarray, np.ndarray]:
        return self.freqs[self.mask], self.values[self.mask]


@dataclass(frozen=True)
class PoleModel:
    """All-pole scene model: delays tau_i with complex amplitudes a_i."""

    delays: np.ndarray
    amplitudes: np.ndarray
    order: int
    fit_residual: float
    degraded: bool = False

    def __post_init__(self) -> None:
        if len(self.delays) != self.order or len(self.amplitudes) != self.order:
            raise ValueError("order must equal the number of delays and amplitudes")
        if self.fit_residual < 0:
            raise ValueError("fit_residual must be >= 0")

    def eval(self, freqs: np.ndarray) -> np.ndarray:
        """H_model(f) = sum_i a_i * exp(-j*2*pi*f*tau_i)."""
        if self.order == 0:
            return np.zeros(freqs.shape, dtype=np.complex128)
        return kernels.sum_cisoids(freqs, -self.delays, self.amplitudes)


def to_band_segment(
    slice_rec: DechirpedRecord, l: int, cfg: RadarConfig, delta_f: float = DEFAULT_DELTA_F
) -> BandSegment:
    """Map an extracted subband record to H(f) samples on the global grid.

    Steps: taper the record edges (Tukey window) so the finite gate stops
    leaking; remove the residual video phase exp(-j*pi*l*k*tau^2) by
    multiplying the de-chirp spectrum with exp(+j*pi*f_d^2/(l*k)); conjugate
    (the tone phase ramps opposite to H's delay ramp); divide out the signed
    harmonic weight so every band carries the same global constant; resample
    from the native grid f = l*(f_start + k*t) onto multiples of delta_f.
    Exact decimation is used when the grids are commensurate, band-limited
    (Dirichlet) interpolation otherwise.

    Only samples on the window's flat top (plus an EDGE_GUARD_SAMPLES margin)
    are read out, so no window division is needed and the RVP all-pass's
    sub-sample shift of the taper edges never reaches a kept bin. The few
    grid points lost at each band edge stay gaps. Without the taper the
    rect-gate Dirichlet tails of each off-bin tone pick up the large far-out
    RVP phase and fold back as broadband ripple two orders above the 1e-3
    duality budget.
    """
    k = cfg.lfm.chirp_rate
    fs = slice_rec.sample_rate
    native_df = l * k / fs
    if delta_f < native_df:
        raise ValueError(
            f"delta_f {delta_f:g} Hz finer than native sample spacing {native_df:g} Hz"
        )
    w_l = harmonic_amplitudes(cfg.mzm, cfg.l_max).coefficients[l]
    if abs(w_l) < 1e-12:
        raise ValueError(f"harmonic l={l} has negligible transmit amplitude at this bias")

    x = slice_rec.samples
    n = x.shape[0]
    taper = windows.tukey(n, RECORD_TAPER_ALPHA)
    f_d = np.fft.fftfreq(n, 1.0 / fs)
    rvp = np.exp(1j * np.pi * f_d**2 / (l * k))
    h_native = np.conj(np.fft.ifft(np.fft.fft(x * taper) * rvp)) / w_l

    f_low = l * cfg.lfm.f_start
    f_high = l * cfg.lfm.f_stop
    j0 = int(np.ceil(f_low / delta_f - 1e-9))
    j1 = int(np.floor(f_high / delta_f - 1e-6))  # last grid point strictly inside
    grid = np.arange(j0, j1 + 1) * delta_f
    # Native sample index carrying frequency f: i = (f - l*f_start)/(l*k) * fs.
    # Keep only flat-top samples past the guard; samples with t < tau_max sit
    # before full chirp overlap and are likewise dropped (they stay gaps).
    idx = (grid - f_low) * fs / (l * k)
    half_taper = 0.5 * RECORD_TAPER_ALPHA * (n - 1)
    i_lo = max(half_taper + EDGE_GUARD_SAMPLES, cfg.tau_max * fs - 1e-9)
    i_hi = (n - 1) - half_taper - EDGE_GUARD_SAMPLES
    valid = (idx >= i_lo) & (idx <= i_hi)
    grid, idx = grid[valid], idx[valid]
    near = np.rint(idx)
    if np.all(np.abs(idx - near) < 1e-6):
        values = h_native[near.astype(int)]
    else:
        t_q = (grid / l - cfg.lfm.f_start) / k
        values = kernels.dirichlet_interp(h_native, 0.0, 1.0 / fs, t_q)
    return BandSegment(l, grid, values, f_low, f_high)


def assemble_gapped(segments: list[BandSegment]) -> GappedSpectrum:
    """Place segments on one global grid spanning the nominal band edges."""
    if not segments:
        raise ValueError("need at least one segment")
    df = segments[0].delta_f
    for s in segments:
        if abs(s.delta_f - df) > 1e-3:
            raise ValueError("segments disagree on delta_f")
    f_min = min(s.f_low_nominal for s in segments)
    f_max = max(s.f_high_nominal for s in segments)
    n = int(round((f_max - f_min) / df)) + 1
    freqs = f_min + np.arange(n) * df
    values = np.zeros(n, dtype=np.complex128)
    mask = np.zeros(n, dtype=bool)
    for s in segments:
        pos = (s.freqs - f_min) / df
        ip = np.rint(pos).astype(int)
        if np.any(np.abs(pos - ip) > 1e-6) or ip.min() < 0 or ip.max() >= n:
            raise ValueError(f"segment l={s.l} is not aligned with the global grid")
        clash = mask[ip]
        if np.any(clash):
            old, new = values[ip[clash]], s.values[clash]
            scale = np.maximum(np.abs(old), np.abs(new))
            if np.any(np.abs(old - new) > SEGMENT_MERGE_RTOL * np.maximum(scale, 1e-300)):
                raise ValueError(f"segment l={s.l} conflicts with already-placed bins")
        values[ip] = s.values
        mask[ip] = True
    return GappedSpectrum(freqs, values, mask, df)


def _spectrum_to_profile(
    freqs: np.ndarray,
    values: np.ndarray,
    label: str,
    pad_factor: int = 16,
    range_clip: tuple[float, float] | None = None,
) -> RangeProfile:
    n = values.shape[0]
    df = freqs[1] - freqs[0]
    nfft = next_fast_len(pad_factor * n)
    # p(tau_m) = sum_n V_n exp(+j*2*pi*f_n*tau_m); the f_min phase ramp has
    # unit modulus and is dropped (magnitude profile).
    p = np.abs(np.fft.ifft(values, nfft)) * nfft
    tau = np.arange(nfft) / (nfft * df)
    ranges = C_LIGHT * tau / 2.0
    if range_clip is not None:
        keep = (ranges >= range_clip[0]) & (ranges <= range_clip[1])
        ranges, p = ranges[keep], p[keep]
    return RangeProfile(ranges, p, label)


def fuse_direct(
    g: GappedSpectrum,
    window: str = "rect",
    range_clip: tuple[float, float] | None = None,
) -> RangeProfile:
    """Zero-filled-gap inverse DFT baseline; grating-lobe sidelobes expected.

    window 'rect' weights all occupied bins equally; 'hann' applies a Hann
    taper per contiguous occupied run (per band).
    """
    if not np.any(g.mask):
        raise ValueError("spectrum has no occupied bins")
    v = np.where(g.mask, g.values, 0.0)
    if window == "hann":
        w = np.zeros(g.mask.size)
        for lo, hi in _occupied_runs(g.mask):
            w[lo:hi] = np.hanning(hi - lo)
        v = v * w
    elif window != "rect":
        raise ValueError(f"unknown window {window!r}; use 'hann' or 'rect'")
    return _spectrum_to_profile(g.freqs, v, "fused-direct", range_clip=range_clip)


def _occupied_runs(mask: np.ndarray) -> list[tuple[int, int]]:
    runs = []
    i = 0
    n = mask.size
    while i < n:
        if mask[i]:
            j = i
            while j < n and mask[j]:
                j += 1
            runs.append((i, j))
            i = j
        else:
            i += 1
    return runs


def _model_matrix(freqs: np.ndarray, delays: np.ndarray) -> np.ndarray:
    return np.exp(-2j * np.pi * np.outer(freqs, delays))


def _fit_amplitudes(
    freqs: np.ndarray, values: np.ndarray, delays: np.ndarray
) -> tuple[np.ndarray, float]:
    e = _model_matrix(freqs, delays)
    if np.linalg.cond(e) > CONDITION_LIMIT:
        raise ValueError(
            "amplitude least squares is ill-conditioned (delays nearly coincide)"
        )
    amps, *_ = np.linalg.lstsq(e, values, rcond=None)
    resid = float(np.linalg.norm(e @ amps - values) / max(np.linalg.norm(values), 1e-300))
    return amps, resid


def estimate_poles(
    data: GappedSpectrum | BandSegment,
    max_order: int,
    sv_threshold: float = SV_THRESHOLD_DEFAULT,
    range_window: tuple[float, float] | None = None,
    pencil_stride: int = 1,
) -> PoleModel:
    """Matrix-pencil delay estimation on the longest contiguous occupied run.

    Hankel data with pencil parameter P = floor(N/3); model order = count of
    singular values strictly above sv_threshold * sigma_max (ties round down);
    poles z_i = exp(-j*2*pi*delta_f*tau_i) from the shifted-pencil
    eigenproblem; amplitudes by least squares against ALL occupied bins.
    pencil_stride > 1 subsamples the run for the SVD stage only (the
    unambiguous delay span shrinks by the same factor; amplitudes and the
    residual still use every occupied bin).
    """
    if isinstance(data, BandSegment):
        freqs_all, values_all = data.freqs, data.values
        run_f, run_v = freqs_all, values_all
        df = data.delta_f
    else:
        freqs_all, values_all = data.occupied()
        lo, hi = max(_occupied_runs(data.mask), key=lambda r: r[1] - r[0])
        run_f, run_v = data.freqs[lo:hi], data.values[lo:hi]
        df = data.delta_f

    run_v = run_v[::pencil_stride]
    run_f = run_f[::pencil_stride]
    df_eff = df * pencil_stride
    n = run_v.shape[0]
    if n < 2 * max_order + 2:
        raise ValueError(f"need >= {2 * max_order + 2} contiguous samples, have {n}")

    p = n // 3
    y = hankel(run_v[: n - p], run_v[n - p - 1 :])  # (n-p) x (p+1)
    _, s, vh = np.linalg.svd(y, full_matrices=False)
    if s[0] == 0.0:
        return PoleModel(np.zeros(0), np.zeros(0, dtype=np.complex128), 0, 0.0)
    order = int(np.count_nonzero(s > sv_threshold * s[0]))
    order = min(order, max_order)
    if order == 0:
        norm_v = float(np.linalg.norm(values_all))
        return PoleModel(
            np.zeros(0), np.zeros(0, dtype=np.complex128), 0, 1.0 if norm_v > 0 else 0.0
        )

    # Rows of vh[:order] span the signal row space span{[1, z_i, ..., z_i^p]},
    # so the plain transpose (no conjugate, which would flip every pole to its
    # reciprocal) carries the one-step shift structure down its columns.
    vs = vh[:order].T  # (p+1) x order
    v1, v2 = vs[:-1], vs[1:]
    poles = np.linalg.eigvals(np.linalg.pinv(v1) @ v2)
    # z = exp(-j*2*pi*df_eff*tau): principal angle gives tau modulo 1/df_eff.
    tau = (-np.angle(poles)) % (2.0 * np.pi) / (2.0 * np.pi * df_eff)
    if range_window is not None:
        t_lo = 2.0 * range_window[0] / C_LIGHT
        span = 1.0 / df_eff
        tau = t_lo + (tau - t_lo) % span
    tau = np.sort(tau)
    amps, resid = _fit_amplitudes(freqs_all, values_all, tau)
    return PoleModel(tau, amps, order, resid)


def refine_global(g: GappedSpectrum, init: PoleModel, max_iters: int = 50) -> PoleModel:
    """Variable-projection NLLS over delays across all occupied bins.

    Amplitudes are eliminated by a linear solve at each step; Levenberg-
    Marquardt damping accepts only cost decreases, so the returned residual
    never exceeds the initial one. Five consecutive rejected steps count as
    divergence and return the init flagged degraded.
    """
    if init.order == 0:
        raise ValueError("init model is empty")
    freqs, values = g.occupied()
    norm_v = max(float(np.linalg.norm(values)), 1e-300)
    tau = init.delays.astype(np.float64).copy()
    amps, _ = _fit_amplitudes(freqs, values, tau)
    e = _model_matrix(freqs, tau)
    r = e @ amps - values
    cost = float(np.linalg.norm(r))
    lam = 1e-3
    rejects = 0
    for _ in range(max_iters):
        jac = (-2j * np.pi * freqs)[:, None] * e * amps[None, :]
        jr = np.vstack([jac.real, jac.imag])
        rr = np.concatenate([r.real, r.imag])
        a = jr.T @ jr
        grad = jr.T @ rr
        accepted = False
        while rejects < 5:
            try:
                step = np.linalg.solve(a + lam * np.diag(np.diag(a)), -grad)
            except np.linalg.LinAlgError:
                step = None
            if step is not None:
                tau_new = tau + step
                try:
                    amps_new, _ = _fit_amplitudes(freqs, values, tau_new)
                except ValueError:
                    amps_new = None
                if amps_new is not None:
                    e_new = _model_matrix(freqs, tau_new)
                    r_new = e_new @ amps_new - values
                    cost_new = float(np.linalg.norm(r_new))
                    # <= so an exact fixed point (zero gradient, zero step)
                    # terminates via the relative-change test instead of
                    # counting as five rejected steps and a divergence flag.
                    if cost_new <= cost:
                        rel = (cost - cost_new) / max(cost, 1e-300)
                        tau, amps, e, r, cost = tau_new, amps_new, e_new, r_new, cost_new
                        lam = max(lam / 10.0, 1e-14)
                        rejects = 0
                        accepted = True
                        if rel < 1e-8:
                            return _finish_model(tau, amps, cost / norm_v)
                        break
            lam *= 10.0
            rejects += 1
        if rejects >= 5:
            return replace(init, degraded=True)
        if not accepted:
            break
    return _finish_model(tau, amps, cost / norm_v)


def _finish_model(tau: np.ndarray, amps: np.ndarray, resid: float) -> PoleModel:
    order = np.argsort(tau)
    return PoleModel(tau[order], amps[order], tau.size, resid)


def fit_pole_model(
    g: GappedSpectrum,
    max_order: int = 10,
    sv_threshold: float = SV_THRESHOLD_DEFAULT,
    range_window: tuple[float, float] | None = None,
    pencil_stride: int = 1,
    residual_gate: float = RESIDUAL_GATE_DEFAULT,
) -> PoleModel:
    """Pencil-initialized global fit with a direct-profile rescue init.

    The pencil sees one band's aperture at a time, and two scatterers closer
    than a single band resolves can reach it nearly cancelled; its rank test
    then underestimates the order and hands the refine a start outside the
    convergence basin. When the refined fit misses the residual gate, the
    fit is rerun from the peaks of the zero-filled direct profile, whose
    maxima sit within a fused resolution cell of the true delays, and the
    fit with the smaller residual wins.
    """
    first = estimate_poles(g, max_order, sv_threshold, range_window, pencil_stride)
    if first.order:
        first = refine_global(g, first)
        if first.fit_residual <= residual_gate and not first.degraded:
            return first
    peaks = resolve_peaks(fuse_direct(g, range_clip=range_window), floor_db=20.0)
    if not peaks:
        return first
    peaks.sort(key=lambda p: -p[1])
    delays = np.sort(np.array([2.0 * r / C_LIGHT for r, _ in peaks[:max_order]]))
    freqs, values = g.occupied()
    try:
        amps, resid = _fit_amplitudes(freqs, values, delays)
    except ValueError:
        return first
    second = refine_global(g, PoleModel(delays, amps, delays.size, resid))
    if second.fit_residual < first.fit_residual:
        return second
    return first


def gap_fill_profile(
    g: GappedSpectrum,
    model: PoleModel,
    window: str = "rect",
    residual_gate: float = RESIDUAL_GATE_DEFAULT,
    range_clip: tuple[float, float] | None = None,
) -> RangeProfile:
    """Fill gap bins from the pole model, keep measured bins, full-span IDFT."""
    if model.fit_residual > residual_gate:
        raise ValueError(
            f"model residual {model.fit_residual:g} exceeds gate {residual_gate:g}; "
            "fall back to fuse_direct"
        )
    v = g.values.copy()
    v[~g.mask] = model.eval(g.freqs[~g.mask])
    v = v * _window_vector(window, v.size)
    return _spectrum_to_profile(g.freqs, v, "fused-allpole", range_clip=range_clip)


def scramble_band_phases(segments: list[BandSegment], seed: int) -> list[BandSegment]:
    """Negative-control helper: multiply each band by a random unit phasor.

    Destroys mutual coherence while leaving per-band magnitudes intact; a
    joint all-pole fit on the result must degrade sharply, which is what makes
    the coherence-free property testable.
    """
    rng = np.random.default_rng(seed)
    out = []
    for s in segments:
        phase = np.exp(2j * np.pi * rng.uniform())
        out.append(replace(s, values=s.values * phase))
    return out
