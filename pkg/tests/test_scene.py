"""Scene geometry, stop-and-hop sampling, and the noise injector."""
import numpy as np
import pytest

from mbradar.scene import (
    PointScatterer,
    RotatingPlatform,
    Scene,
    add_noise,
    scatterers_at,
)
from mbradar.waveform import SampledSignal

C = 299792458.0


def _platform(angles=(0.3, 2.0), refl=(1.0, 0.8), r=0.1, w=7.0):
    return RotatingPlatform(
        center_range=2.0,
        radius=r,
        angular_rate=w,
        scatterer_angles=angles,
        reflectivities=refl,
    )


def test_static_delays_and_amplitudes():
    sc = Scene(
        scatterers=(
            PointScatterer(0.0, 2.0, 1.0, 0.0),
            PointScatterer(0.3, 1.6, 0.5, 1.2),
        ),
        noise_snr_db=None,
    )
    got = scatterers_at(sc, 0.0)
    r1 = np.hypot(0.3, 1.6)
    assert got[0][0] == pytest.approx(2 * 2.0 / C, rel=1e-12)
    assert got[1][0] == pytest.approx(2 * r1 / C, rel=1e-12)
    assert got[0][1] == pytest.approx(1.0 + 0.0j)
    assert got[1][1] == pytest.approx(0.5 * np.exp(1.2j))


def test_spreading_loss_decay():
    sc = Scene(
        scatterers=(PointScatterer(0.0, 2.0, 1.0, 0.0), PointScatterer(0.0, 4.0, 1.0, 0.0)),
        spreading_loss=True,
    )
    got = scatterers_at(sc, 0.0)
    assert abs(got[0][1]) == pytest.approx(1.0 / 4.0)
    assert abs(got[1][1]) == pytest.approx(1.0 / 16.0)


def test_platform_range_law_is_geometric():
    # Rim point at angle a sits at (r sin a, R0 + r cos a); ranges_at must
    # equal the plain Euclidean distance to it.
    p = _platform()
    for t in (0.0, 0.013, 0.2):
        ang = np.asarray(p.scatterer_angles) + p.angular_rate * t
        x = p.radius * np.sin(ang)
        y = p.center_range + p.radius * np.cos(ang)
        assert np.allclose(p.ranges_at(t), np.hypot(x, y), rtol=1e-12)


def test_stop_and_hop_single_instant():
    # Each pulse sees the geometry frozen at its own slow time.
    p = _platform()
    sc = Scene(platform=p)
    for t in (0.0, 0.0005, 0.3):
        delays = [d for d, _ in scatterers_at(sc, t)]
        assert np.allclose(delays, 2.0 * p.ranges_at(t) / C, rtol=1e-12)


def test_delay_positivity_and_continuity():
    p = _platform()
    sc = Scene(platform=p)
    dt = 1e-3
    rate_cap = p.radius * p.angular_rate * p.center_range / (p.center_range - p.radius)
    ts = np.linspace(0.0, 2.0, 400)
    prev = np.array([d for d, _ in scatterers_at(sc, 0.0)])
    assert np.all(prev > 0)
    for t in ts[1:]:
        cur = np.array([d for d, _ in scatterers_at(sc, float(t))])
        assert np.all(cur > 0)
    for t in np.linspace(0.0, 1.0, 50):
        a = np.array([d for d, _ in scatterers_at(sc, float(t))])
        b = np.array([d for d, _ in scatterers_at(sc, float(t) + dt)])
        assert np.max(np.abs(b - a)) <= 2.0 * rate_cap * dt / C * (1 + 1e-9)


def test_negative_slow_time_rejected():
    sc = Scene(scatterers=(PointScatterer(0.0, 2.0),))
    with pytest.raises(ValueError):
        scatterers_at(sc, -1e-6)


def test_scene_needs_exactly_one_source():
    with pytest.raises(ValueError):
        Scene()
    with pytest.raises(ValueError):
        Scene(scatterers=(PointScatterer(0.0, 2.0),), platform=_platform())


def test_platform_validation():
    with pytest.raises(ValueError):
        RotatingPlatform(2.0, -0.1, 1.0, (0.0,), (1.0,))
    with pytest.raises(ValueError):
        RotatingPlatform(0.05, 0.1, 1.0, (0.0,), (1.0,))
    with pytest.raises(ValueError):
        RotatingPlatform(2.0, 0.1, 1.0, (0.0, 1.0), (1.0,))


def test_noise_snr_and_determinism():
    rng = np.random.default_rng(0)
    x = SampledSignal(np.exp(2j * np.pi * 0.01 * np.arange(200000)), 1.0)
    for snr in (0.0, 10.0, 30.0):
        a = add_noise(x, snr, seed=5)
        b = add_noise(x, snr, seed=5)
        assert np.array_equal(a.samples, b.samples)
        c = add_noise(x, snr, seed=6)
        assert not np.array_equal(a.samples, c.samples)
        p_noise = float(np.mean(np.abs(a.samples - x.samples) ** 2))
        want = 10.0 ** (-snr / 10.0)
        assert p_noise == pytest.approx(want, rel=0.05)


def test_noise_complex_is_circular():
    x = SampledSignal(np.ones(200000, dtype=complex), 1.0)
    n = add_noise(x, 0.0, seed=1).samples - x.samples
    assert float(np.mean(n.real**2)) == pytest.approx(0.5, rel=0.05)
    assert float(np.mean(n.imag**2)) == pytest.approx(0.5, rel=0.05)


def test_noise_real_stays_real():
    x = SampledSignal(np.cos(0.1 * np.arange(1000)), 1.0)
    y = add_noise(x, 20.0, seed=2)
    assert not np.iscomplexobj(y.samples)


def test_noise_infinite_snr_passthrough():
    x = SampledSignal(np.ones(16), 1.0)
    y = add_noise(x, np.inf, seed=3)
    assert np.array_equal(y.samples, x.samples)


def test_noise_zero_power_rejected():
    x = SampledSignal(np.zeros(16), 1.0)
    with pytest.raises(ValueError, match="zero-power"):
        add_noise(x, 10.0, seed=4)


def test_scene_noise_flags():
    quiet = Scene(scatterers=(PointScatterer(0.0, 2.0),), noise_snr_db=None)
    assert not quiet.noise_enabled
    loud = Scene(scatterers=(PointScatterer(0.0, 2.0),), noise_snr_db=20.0)
    assert loud.noise_enabled
    inf = Scene(scatterers=(PointScatterer(0.0, 2.0),), noise_snr_db=np.inf)
    assert not inf.noise_enabled


def test_point_scatterer_range():
    s = PointScatterer(3.0, 4.0)
    assert s.range == pytest.approx(5.0)
