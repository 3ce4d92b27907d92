"""Chirp synthesis: phase law, energy, analytic signal, validation."""
import numpy as np
import pytest

from mbradar.waveform import (
    LfmParams,
    SampledSignal,
    analytic_signal,
    generate_lfm,
    instantaneous_frequency,
    lfm_phase,
)

PAPER = LfmParams(4.7e9, 1.0e9, 100e-6, 2.2 * 5.7e9)


def test_chirp_rate_and_stop():
    assert PAPER.chirp_rate == pytest.approx(1e13)
    assert PAPER.f_stop == pytest.approx(5.7e9)


def test_phase_matches_frequency_derivative():
    # d(phase)/dt / (2 pi) must track f_start + k t within 1 percent.
    rng = np.random.default_rng(42)
    t = rng.uniform(0.01 * PAPER.duration, 0.99 * PAPER.duration, size=200)
    h = 1e-12
    f_num = (lfm_phase(PAPER, t + h) - lfm_phase(PAPER, t - h)) / (2 * h * 2 * np.pi)
    f_ref = instantaneous_frequency(PAPER, t)
    assert np.max(np.abs(f_num - f_ref) / f_ref) < 0.01


def test_frequency_endpoints():
    assert instantaneous_frequency(PAPER, 0.0) == pytest.approx(4.7e9)
    assert instantaneous_frequency(PAPER, PAPER.duration) == pytest.approx(5.7e9)


def test_frequency_outside_sweep_raises():
    with pytest.raises(ValueError):
        instantaneous_frequency(PAPER, -1e-9)
    with pytest.raises(ValueError):
        instantaneous_frequency(PAPER, PAPER.duration * 1.001)
    with pytest.raises(ValueError):
        instantaneous_frequency(PAPER, np.array([0.0, PAPER.duration * 2]))


def test_mean_power_half():
    # A full-swing cosine sweeping many cycles averages to power 1/2.
    sig = generate_lfm(PAPER)
    assert float(np.mean(sig.samples**2)) == pytest.approx(0.5, rel=0.01)


def test_generate_respects_duration_and_rate():
    sig = generate_lfm(PAPER)
    assert sig.sample_rate == PAPER.sample_rate
    assert sig.samples.size == int(np.floor(PAPER.duration * PAPER.sample_rate))
    assert sig.duration == pytest.approx(PAPER.duration, rel=1e-6)


def test_generate_below_nyquist_raises():
    bad = LfmParams(4.7e9, 1.0e9, 100e-6, 1.1e9)
    with pytest.raises(ValueError, match="Nyquist"):
        generate_lfm(bad)


def test_analytic_signal_positive_spectrum():
    scaled = LfmParams(47e6, 10e6, 20e-6, 1.2e9)
    sig = generate_lfm(scaled)
    ana = analytic_signal(sig)
    assert np.allclose(ana.samples.real, sig.samples, atol=1e-9)
    spec = np.fft.fft(ana.samples)
    f = np.fft.fftfreq(spec.size, 1.0 / sig.sample_rate)
    neg = float(np.sum(np.abs(spec[f < 0]) ** 2))
    tot = float(np.sum(np.abs(spec) ** 2))
    assert neg / tot < 1e-20


def test_analytic_signal_rejects_complex():
    sig = SampledSignal(np.ones(8, dtype=complex), 1.0)
    with pytest.raises(ValueError, match="real"):
        analytic_signal(sig)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(f_start=0.0, bandwidth=1e9, duration=1e-4, sample_rate=1e9),
        dict(f_start=1e9, bandwidth=0.0, duration=1e-4, sample_rate=1e9),
        dict(f_start=1e9, bandwidth=1e9, duration=0.0, sample_rate=1e9),
        dict(f_start=1e9, bandwidth=1e9, duration=1e-4, sample_rate=0.0),
    ],
)
def test_param_validation(kwargs):
    with pytest.raises(ValueError):
        LfmParams(**kwargs)


def test_times_grid():
    sig = SampledSignal(np.zeros(5), 10.0)
    assert np.allclose(sig.times(), [0.0, 0.1, 0.2, 0.3, 0.4])
