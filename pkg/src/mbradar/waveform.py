"""Linear-FM source waveform: parameters, synthesis, and phase helpers.

All frequencies are in Hz, times in seconds. The chirp is
``s(t) = cos(2*pi*f_start*t + pi*k*t^2)`` with k = bandwidth/duration, swept
over t in [0, duration).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import hilbert


@dataclass(frozen=True)
class LfmParams:
    """Chirp design values.

    sample_rate is the rate used for waveform-level synthesis only; analytic
    de-chirp paths never synthesize the RF waveform and may run far below RF
    Nyquist.
    """

    f_start: float
    bandwidth: float
    duration: float
    sample_rate: float

    def __post_init__(self) -> None:
        if self.f_start <= 0 or self.bandwidth <= 0:
            raise ValueError("f_start and bandwidth must be positive")
        if self.duration <= 0 or self.sample_rate <= 0:
            raise ValueError("duration and sample_rate must be positive")

    @property
    def chirp_rate(self) -> float:
        """Sweep rate k = bandwidth / duration, Hz/s."""
        return self.bandwidth / self.duration

    @property
    def f_stop(self) -> float:
        return self.f_start + self.bandwidth


@dataclass(frozen=True)
class SampledSignal:
    """Real or complex samples on a uniform time grid starting at t = 0."""

    samples: np.ndarray
    sample_rate: float

    def times(self) -> np.ndarray:
        return np.arange(self.samples.shape[0]) / self.sample_rate

    @property
    def duration(self) -> float:
        return self.samples.shape[0] / self.sample_rate


def lfm_phase(params: LfmParams, t: np.ndarray | float) -> np.ndarray | float:
    """Instantaneous phase 2*pi*f_start*t + pi*k*t^2 (valid for any t)."""
    return 2.0 * np.pi * params.f_start * t + np.pi * params.chirp_rate * t * t


def generate_lfm(params: LfmParams) -> SampledSignal:
    """Synthesize the real chirp; requires sample_rate >= 2 * f_stop."""
    if params.sample_rate < 2.0 * params.f_stop:
        raise ValueError(
            f"sample_rate {params.sample_rate:g} Hz is below RF Nyquist "
            f"{2.0 * params.f_stop:g} Hz for waveform synthesis"
        )
    n = int(np.floor(params.duration * params.sample_rate))
    t = np.arange(n) / params.sample_rate
    return SampledSignal(np.cos(lfm_phase(params, t)), params.sample_rate)


def instantaneous_frequency(params: LfmParams, t: np.ndarray | float) -> np.ndarray | float:
    """f_start + k*t for t inside the sweep; raises outside [0, duration]."""
    t_arr = np.asarray(t, dtype=np.float64)
    if np.any(t_arr < 0.0) or np.any(t_arr > params.duration):
        raise ValueError("t outside the sweep interval [0, duration]")
    out = params.f_start + params.chirp_rate * t_arr
    return float(out) if np.isscalar(t) else out


def analytic_signal(sig: SampledSignal) -> SampledSignal:
    """FFT-based analytic (positive-frequency) version of a real signal."""
    if np.iscomplexobj(sig.samples):
        raise ValueError("analytic_signal expects a real signal")
    return SampledSignal(hilbert(sig.samples), sig.sample_rate)
