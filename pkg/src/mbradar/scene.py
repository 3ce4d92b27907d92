"""Ground-truth world model: point scatterers, rotating-platform kinematics, noise.

The radar sits at the origin with boresight along +x. Scenes are immutable;
every query is a pure function of (scene, time), so pulses can be synthesized
in any order with identical results.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .waveform import SampledSignal

C_LIGHT = 299792458.0


@dataclass(frozen=True)
class PointScatterer:
    """Idealized point target at (x, y) meters with real echo amplitude.

    Desk-scale reflectors are modeled as points: the quantity under study is
    peak separability, which point targets reproduce. phase is the return
    phase in radians: physical reflectors and delay lines impose a path phase
    on the echo that is independent of the geometric delay, and two-target
    interference at the resolution limit is set by it, so scenes that model
    a specific rig need it adjustable. Zero leaves the echo purely geometric.
    """

    x: float
    y: float
    reflectivity: float = 1.0
    phase: float = 0.0

    def __post_init__(self) -> None:
        if not np.isfinite(self.reflectivity) or self.reflectivity < 0:
            raise ValueError("reflectivity must be finite and >= 0")
        if not np.isfinite(self.phase):
            raise ValueError("phase must be finite")
        if self.range <= 0:
            raise ValueError("scatterer must be strictly away from the radar")

    @property
    def range(self) -> float:
        return float(np.hypot(self.x, self.y))


@dataclass(frozen=True)
class RotatingPlatform:
    """Rim scatterers on a turntable: center at range R0, radius r, rate w (rad/s)."""

    center_range: float
    radius: float
    angular_rate: float
    scatterer_angles: tuple[float, ...]
    reflectivities: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.radius < 0:
            raise ValueError("radius must be >= 0")
        if len(self.scatterer_angles) != len(self.reflectivities):
            raise ValueError("scatterer_angles and reflectivities must have equal length")
        if self.center_range <= self.radius:
            raise ValueError("platform must not contain the radar origin")

    def ranges_at(self, t_slow: float) -> np.ndarray:
        """Instantaneous rim ranges R(t) = sqrt(R0^2 + r^2 + 2 R0 r cos(a + w t))."""
        ang = np.asarray(self.scatterer_angles) + self.angular_rate * t_slow
        return np.sqrt(
            self.center_range**2
            + self.radius**2
            + 2.0 * self.center_range * self.radius * np.cos(ang)
        )


@dataclass(frozen=True)
class Scene:
    """Either a static scatterer list or one rotating platform, plus noise policy.

    noise_snr_db None (or +inf) disables noise. spreading_loss applies a 1/R^2
    amplitude decay; off by default since the reference scenes share a common
    ~2 m range.
    """

    scatterers: tuple[PointScatterer, ...] = ()
    platform: RotatingPlatform | None = None
    noise_snr_db: float | None = None
    rng_seed: int = 0
    spreading_loss: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "scatterers", tuple(self.scatterers))
        has_static = len(self.scatterers) > 0
        has_platform = self.platform is not None
        if has_static == has_platform:
            raise ValueError("scene needs either static scatterers or a platform, not both")
        if has_platform and len(self.platform.scatterer_angles) == 0:
            raise ValueError("platform scene needs at least one rim scatterer")

    @property
    def is_dynamic(self) -> bool:
        return self.platform is not None

    @property
    def noise_enabled(self) -> bool:
        return self.noise_snr_db is not None and np.isfinite(self.noise_snr_db)


def scatterers_at(scene: Scene, t_slow: float) -> list[tuple[float, complex]]:
    """(delay, complex amplitude) pairs at slow time t_slow; stop-and-hop per pulse.

    The amplitude argument carries the scatterer's return phase; platform rim
    scatterers radiate with zero return phase.
    """
    if t_slow < 0:
        raise ValueError("t_slow must be >= 0")
    out: list[tuple[float, complex]] = []
    if scene.platform is not None:
        ranges = scene.platform.ranges_at(t_slow)
        amps = scene.platform.reflectivities
        phases = (0.0,) * len(amps)
    else:
        ranges = np.array([s.range for s in scene.scatterers])
        amps = tuple(s.reflectivity for s in scene.scatterers)
        phases = tuple(s.phase for s in scene.scatterers)
    for r, a, ph in zip(ranges, amps, phases):
        amp = a / r**2 if scene.spreading_loss else a
        out.append((2.0 * float(r) / C_LIGHT, complex(amp * np.exp(1j * ph))))
    return out


def add_noise(signal: SampledSignal, snr_db: float, seed) -> SampledSignal:
    """White Gaussian noise at the requested SNR; deterministic given seed.

    Complex signals get circular noise (half the variance per quadrature).
    snr_db = +inf returns the signal unchanged.
    """
    if np.isinf(snr_db) and snr_db > 0:
        return signal
    x = signal.samples
    p_sig = float(np.mean(np.abs(x) ** 2))
    if p_sig == 0.0:
        raise ValueError("cannot set an SNR against a zero-power signal")
    p_noise = p_sig / 10.0 ** (snr_db / 10.0)
    rng = np.random.default_rng(seed)
    if np.iscomplexobj(x):
        scale = np.sqrt(p_noise / 2.0)
        noise = rng.standard_normal(x.shape) * scale + 1j * rng.standard_normal(x.shape) * scale
    else:
        noise = rng.standard_normal(x.shape) * np.sqrt(p_noise)
    return SampledSignal(x + noise, signal.sample_rate)
