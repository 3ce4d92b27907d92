"""Mach-Zehnder modulator harmonic model and the multiband frequency plan.

The photodetected intensity of a biased MZM driven by s(t) is
``I(t) = 1 + cos(theta + m*s(t))``. For a chirp drive the Jacobi-Anger
expansion turns this into harmonics l*f(t) of the instantaneous drive
frequency, each a scaled copy of the chirp: the multiband transmit set.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import jv

from .waveform import LfmParams, SampledSignal

# Harmonics this far (in dB) below the strongest l >= 1 line are flagged negligible.
NEGLIGIBLE_DB = 60.0


@dataclass(frozen=True)
class MzmParams:
    """Modulator drive depth m (rad), bias angle theta (rad), and the
    small-signal phase-modulation index used on the receive side."""

    modulation_index: float
    bias_angle: float
    pm_index: float = 0.05

    def __post_init__(self) -> None:
        if self.modulation_index <= 0:
            raise ValueError("modulation_index must be positive")
        if self.pm_index <= 0:
            raise ValueError("pm_index must be positive")


@dataclass(frozen=True)
class HarmonicSpectrum:
    """Signed Fourier coefficients of I(t) versus harmonic order.

    coefficients[l] multiplies cos(l*phi(t)); the sign is kept (it matters for
    phase-coherent fusion) and magnitudes match 2*|J_l(m)|*|sin theta| for odd
    l, 2*|J_l(m)|*|cos theta| for even l >= 2.
    """

    coefficients: np.ndarray
    l_max: int

    def magnitude(self, l: int) -> float:
        return abs(float(self.coefficients[l]))

    @property
    def negligible(self) -> tuple[int, ...]:
        """Harmonic orders >= 1 more than NEGLIGIBLE_DB below the strongest."""
        mags = np.abs(self.coefficients[1:])
        if mags.size == 0:
            return ()
        floor = mags.max() * 10.0 ** (-NEGLIGIBLE_DB / 20.0)
        return tuple(int(l) for l in range(1, self.l_max + 1) if abs(self.coefficients[l]) < floor)


def harmonic_amplitudes(mzm: MzmParams, l_max: int) -> HarmonicSpectrum:
    """Jacobi-Anger coefficients of 1 + cos(theta + m*cos(phi)) up to l_max.

    B_0 = 1 + J_0(m) cos(theta); for n >= 1,
    B_{2n} = 2 (-1)^n J_{2n}(m) cos(theta),
    B_{2n+1} = -2 (-1)^n J_{2n+1}(m) sin(theta) (including l = 1 at n = 0).
    """
    if l_max < 0:
        raise ValueError("l_max must be non-negative")
    m, theta = mzm.modulation_index, mzm.bias_angle
    ls = np.arange(l_max + 1)
    coefs = np.zeros(l_max + 1)
    coefs[0] = 1.0 + jv(0, m) * np.cos(theta)
    even = ls[(ls >= 2) & (ls % 2 == 0)]
    odd = ls[ls % 2 == 1]
    coefs[even] = 2.0 * (-1.0) ** (even // 2) * jv(even, m) * np.cos(theta)
    coefs[odd] = -2.0 * (-1.0) ** ((odd - 1) // 2) * jv(odd, m) * np.sin(theta)
    return HarmonicSpectrum(coefs, int(l_max))


def field_sideband_amplitudes(mzm: MzmParams, q_max: int) -> np.ndarray:
    """Coefficients A_q of cos(q*phi) in the MZM *field* envelope.

    The field transfer is cos((theta + m*s)/2), whose squared magnitude is
    I(t)/2. These appear only in the receive-chain derivation (the reference
    arm beats every sideband pair); they are not part of the transmit model.
    """
    m2, th2 = 0.5 * mzm.modulation_index, 0.5 * mzm.bias_angle
    qs = np.arange(q_max + 1)
    amps = np.zeros(q_max + 1)
    amps[0] = np.cos(th2) * jv(0, m2)
    even = qs[(qs >= 2) & (qs % 2 == 0)]
    odd = qs[qs % 2 == 1]
    amps[even] = 2.0 * (-1.0) ** (even // 2) * jv(even, m2) * np.cos(th2)
    amps[odd] = -2.0 * (-1.0) ** ((odd - 1) // 2) * jv(odd, m2) * np.sin(th2)
    return amps


def mzm_pd_oracle(
    drive: SampledSignal,
    mzm: MzmParams,
    l_max: int | None = None,
    drive_max_freq: float | None = None,
) -> SampledSignal:
    """Exact photodetected intensity 1 + cos(theta + m*drive).

    Waveform-level reference path: no harmonic truncation, so its FFT is the
    ground truth for harmonic_amplitudes. Warns when the caller's intended
    l_max * drive_max_freq exceeds Nyquist (harmonics would alias).
    """
    if l_max is not None and drive_max_freq is not None:
        if l_max * drive_max_freq > 0.5 * drive.sample_rate:
            warnings.warn(
                f"harmonic {l_max} of a {drive_max_freq:g} Hz drive exceeds "
                f"Nyquist at {drive.sample_rate:g} S/s; expect aliasing",
                stacklevel=2,
            )
    out = 1.0 + np.cos(mzm.bias_angle + mzm.modulation_index * drive.samples)
    return SampledSignal(out, drive.sample_rate)


@dataclass(frozen=True)
class SubbandSpan:
    """RF extent of harmonic l: [l*f_start, l*(f_start+bandwidth)]."""

    l: int
    f_low: float
    f_high: float

    @property
    def bandwidth(self) -> float:
        return self.f_high - self.f_low

    @property
    def center(self) -> float:
        return 0.5 * (self.f_low + self.f_high)


@dataclass(frozen=True)
class SubbandPlan:
    bands: tuple[SubbandSpan, ...]
    total_span: float
    has_overlap: bool


def subband_plan(lfm: LfmParams, l_max: int) -> SubbandPlan:
    """Frequency plan of harmonics 1..l_max and the end-to-end span.

    Adjacent bands overlap in RF once l*f_stop > (l+1)*f_start; the plan flags
    this rather than erroring (the receiver's extraction step errors, because
    that is where overlap actually breaks the processing).
    """
    if l_max < 1:
        raise ValueError("l_max must be >= 1")
    bands = tuple(SubbandSpan(l, l * lfm.f_start, l * lfm.f_stop) for l in range(1, l_max + 1))
    overlap = any(bands[i].f_high > bands[i + 1].f_low for i in range(len(bands) - 1))
    return SubbandPlan(bands, bands[-1].f_high - bands[0].f_low, overlap)
