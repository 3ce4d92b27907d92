"""MZM harmonic model vs the exact waveform-level oracle, plus the band plan."""
import numpy as np
import pytest

from mbradar.photonics import (
    MzmParams,
    field_sideband_amplitudes,
    harmonic_amplitudes,
    mzm_pd_oracle,
    subband_plan,
)
from mbradar.waveform import LfmParams, SampledSignal

PAPER_LFM = LfmParams(4.7e9, 1.0e9, 100e-6, 2.2 * 5.7e9)

# Single-tone drive on an exact FFT bin: every harmonic l*f0 lands on bin
# l*64, so spectral lines can be read off with no leakage at all.
_N = 4096
_BIN0 = 64


def _tone_drive() -> SampledSignal:
    t = np.arange(_N) / float(_N)
    return SampledSignal(np.cos(2 * np.pi * _BIN0 * t), float(_N))


def _oracle_lines(mzm: MzmParams, l_max: int) -> np.ndarray:
    pd = mzm_pd_oracle(_tone_drive(), mzm, l_max=l_max, drive_max_freq=float(_BIN0))
    spec = np.fft.rfft(pd.samples) / _N
    out = np.empty(l_max + 1)
    out[0] = spec[0].real
    for l in range(1, l_max + 1):
        line = 2.0 * spec[l * _BIN0]
        assert abs(line.imag) < 1e-12
        out[l] = line.real
    return out


def test_harmonics_match_oracle_randomized():
    # Signed coefficients against the exact intensity waveform, 100 draws.
    rng = np.random.default_rng(12345)
    l_max = 6
    for _ in range(100):
        mzm = MzmParams(rng.uniform(0.1, 4.0), rng.uniform(0.05, np.pi - 0.05), 0.05)
        want = harmonic_amplitudes(mzm, l_max).coefficients
        got = _oracle_lines(mzm, l_max)
        scale = np.max(np.abs(want))
        assert np.max(np.abs(got - want)) / scale < 1e-6


def test_even_harmonics_vanish_at_quadrature():
    coefs = harmonic_amplitudes(MzmParams(2.5, np.pi / 2, 0.05), 8).coefficients
    scale = np.max(np.abs(coefs))
    assert np.max(np.abs(coefs[2::2])) / scale < 1e-12


def test_odd_harmonics_vanish_at_zero_bias():
    coefs = harmonic_amplitudes(MzmParams(2.5, 0.0, 0.05), 8).coefficients
    scale = np.max(np.abs(coefs))
    assert np.max(np.abs(coefs[1::2])) / scale < 1e-12


def test_reference_operating_point_values():
    # m = 2.5, theta = pi/4: the four transmit bands plus DC, signs included.
    coefs = harmonic_amplitudes(MzmParams(2.5, np.pi / 4, 0.05), 4).coefficients
    want = [0.965788, -0.702997, -0.630823, 0.306319, 0.104343]
    assert np.allclose(coefs, want, atol=1e-5)


def test_negligible_flags_weak_lines():
    # Shallow drive: l = 3, 4 fall more than 60 dB below l = 1.
    spec = harmonic_amplitudes(MzmParams(0.1, np.pi / 4, 0.05), 4)
    assert spec.negligible == (3, 4)
    strong = harmonic_amplitudes(MzmParams(2.5, np.pi / 4, 0.05), 4)
    assert strong.negligible == ()


def test_field_sidebands_match_field_waveform():
    # A_q are the cos-series of the field envelope cos((theta + m*s)/2).
    rng = np.random.default_rng(7)
    t = np.arange(_N) / float(_N)
    phi = 2 * np.pi * _BIN0 * t
    for _ in range(20):
        mzm = MzmParams(rng.uniform(0.1, 4.0), rng.uniform(0.05, np.pi - 0.05), 0.05)
        field = np.cos(0.5 * (mzm.bias_angle + mzm.modulation_index * np.cos(phi)))
        spec = np.fft.rfft(field) / _N
        want = field_sideband_amplitudes(mzm, 6)
        got = np.empty(7)
        got[0] = spec[0].real
        got[1:] = 2.0 * spec[np.arange(1, 7) * _BIN0].real
        assert np.max(np.abs(got - want)) / np.max(np.abs(want)) < 1e-6


def test_field_squared_is_half_intensity():
    # |field|^2 = I/2 ties the two expansions together.
    mzm = MzmParams(2.5, np.pi / 4, 0.05)
    t = np.arange(_N) / float(_N)
    s = np.cos(2 * np.pi * _BIN0 * t)
    field = np.cos(0.5 * (mzm.bias_angle + mzm.modulation_index * s))
    intensity = 1.0 + np.cos(mzm.bias_angle + mzm.modulation_index * s)
    assert np.allclose(field**2, 0.5 * intensity, atol=1e-12)


def test_subband_plan_reference_geometry():
    plan = subband_plan(PAPER_LFM, 4)
    spans = [(b.f_low, b.f_high) for b in plan.bands]
    assert spans == [
        (4.7e9, 5.7e9),
        (9.4e9, 11.4e9),
        (14.1e9, 17.1e9),
        (18.8e9, 22.8e9),
    ]
    assert plan.total_span == 18.1e9
    assert not plan.has_overlap
    assert [b.bandwidth for b in plan.bands] == [1e9, 2e9, 3e9, 4e9]
    assert plan.bands[2].center == pytest.approx(15.6e9)


def test_subband_plan_overlap_flag():
    # l*f_stop crosses (l+1)*f_start between l = 5 and 6 for this geometry.
    assert not subband_plan(PAPER_LFM, 5).has_overlap
    assert subband_plan(PAPER_LFM, 6).has_overlap


def test_subband_plan_rejects_bad_lmax():
    with pytest.raises(ValueError):
        subband_plan(PAPER_LFM, 0)


def test_oracle_warns_on_aliasing_harmonics():
    drive = _tone_drive()
    with pytest.warns(UserWarning, match="Nyquist"):
        mzm_pd_oracle(drive, MzmParams(2.5, np.pi / 4, 0.05), l_max=40, drive_max_freq=float(_BIN0))


@pytest.mark.parametrize("kwargs", [dict(modulation_index=0.0, bias_angle=0.7),
                                    dict(modulation_index=-1.0, bias_angle=0.7),
                                    dict(modulation_index=2.5, bias_angle=0.7, pm_index=0.0)])
def test_mzm_validation(kwargs):
    with pytest.raises(ValueError):
        MzmParams(**kwargs)


def test_harmonic_amplitudes_rejects_negative_lmax():
    with pytest.raises(ValueError):
        harmonic_amplitudes(MzmParams(2.5, np.pi / 4, 0.05), -1)
