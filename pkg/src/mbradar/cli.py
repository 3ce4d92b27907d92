"""Scenario-driven command line: JSON config in, CSV/PGM/JSON products out.

Every data product is a pure function of (config, seed): floats are written
with repr (round-trips exactly), JSON keys are sorted, and wall-clock timing
goes only to stderr and run.log, never into CSV/JSON.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
import warnings
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

import numpy as np

from . import fusion, imaging
from .photonics import MzmParams, harmonic_amplitudes, subband_plan
from .receiver import (
    RadarConfig,
    RangeProfile,
    dechirp_synthesize,
    mainlobe_width,
    range_profile,
    resolve_peaks,
    subband_extract,
)
from .scene import PointScatterer, RotatingPlatform, Scene
from .waveform import LfmParams

EXPERIMENTS = ("spectrum", "range", "fuse", "isar", "sweep")
SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Schema or physics violation, attributed to a JSON pointer."""

    def __init__(self, pointer: str, message: str, hint: str | None = None):
        self.pointer = pointer
        self.hint = hint
        text = f"{pointer}: {message}"
        if hint:
            text += f" (hint: {hint})"
        super().__init__(text)


@dataclass(frozen=True)
class ScenarioConfig:
    radar: RadarConfig
    scene: Scene
    experiment: str
    output_dir: str
    seed: int
    delta_f: float = fusion.DEFAULT_DELTA_F
    max_order: int = 10
    sv_threshold: float = fusion.SV_THRESHOLD_DEFAULT
    pencil_stride: int = 1
    n_pulses: int = 128
    window: str = "rect"
    mode: str = "fused-allpole"

    def __post_init__(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"experiment must be one of {EXPERIMENTS}")


def _need(obj: dict, key: str, kinds, ptr: str):
    if key not in obj:
        raise ConfigError(f"{ptr}/{key}", "required key is missing")
    return _typed(obj[key], key, kinds, ptr)


def _opt(obj: dict, key: str, kinds, ptr: str, default):
    if key not in obj or obj[key] is None:
        return default
    return _typed(obj[key], key, kinds, ptr)


def _typed(val, key: str, kinds, ptr: str):
    name = getattr(kinds, "__name__", None) or "/".join(k.__name__ for k in kinds)
    if kinds is float:
        kinds = (int, float)
    bool_ok = kinds is bool or (isinstance(kinds, tuple) and bool in kinds)
    if not isinstance(val, kinds) or (isinstance(val, bool) and not bool_ok):
        raise ConfigError(f"{ptr}/{key}", f"expected {name}, got {type(val).__name__}")
    return val


def _reject_unknown(obj: dict, allowed: set[str], ptr: str, strict: bool) -> None:
    for key in obj:
        if key not in allowed:
            if strict:
                raise ConfigError(f"{ptr}/{key}", "unknown key (use --lax to ignore)")
            warnings.warn(f"ignoring unknown config key {ptr}/{key}", stacklevel=3)


def parse_config(text: str, strict: bool = True) -> ScenarioConfig:
    """Validate a JSON scenario document; errors carry JSON-pointer paths."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("/", f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("/", "top level must be a JSON object")
    if "schema" not in doc:
        raise ConfigError("/schema", "required key is missing")
    if doc["schema"] != SCHEMA_VERSION:
        raise ConfigError("/schema", f"unsupported schema {doc['schema']!r}, expected {SCHEMA_VERSION}")

    _reject_unknown(
        doc,
        {"schema", "experiment", "seed", "output_dir", "radar", "scene", "fusion", "imaging"},
        "",
        strict,
    )

    experiment = _need(doc, "experiment", str, "")
    if experiment not in EXPERIMENTS:
        raise ConfigError("/experiment", f"must be one of {list(EXPERIMENTS)}")
    seed = _opt(doc, "seed", int, "", 0)
    output_dir = _opt(doc, "output_dir", str, "", "out")

    radar_doc = _need(doc, "radar", dict, "")
    radar_allowed = {
        "f_start_hz",
        "bandwidth_hz",
        "duration_s",
        "sample_rate_hz",
        "dechirp_sample_rate_hz",
        "l_max",
        "prf_hz",
        "range_window_m",
        "modulation_index",
        "bias_angle_rad",
        "pm_index",
    }
    _reject_unknown(radar_doc, radar_allowed, "/radar", strict)
    try:
        f_start = float(_need(radar_doc, "f_start_hz", float, "/radar"))
        bandwidth = float(_need(radar_doc, "bandwidth_hz", float, "/radar"))
        # Only waveform-level synthesis needs the RF rate; default above Nyquist.
        fs_rf = float(
            _opt(radar_doc, "sample_rate_hz", float, "/radar", 2.2 * (f_start + bandwidth))
        )
        lfm = LfmParams(
            f_start=f_start,
            bandwidth=bandwidth,
            duration=float(_need(radar_doc, "duration_s", float, "/radar")),
            sample_rate=fs_rf,
        )
    except ValueError as exc:
        raise ConfigError("/radar", str(exc)) from exc
    try:
        mzm = MzmParams(
            modulation_index=float(_opt(radar_doc, "modulation_index", float, "/radar", 2.5)),
            bias_angle=float(_opt(radar_doc, "bias_angle_rad", float, "/radar", math.pi / 4)),
            pm_index=float(_opt(radar_doc, "pm_index", float, "/radar", 0.05)),
        )
    except ValueError as exc:
        raise ConfigError("/radar", str(exc)) from exc
    window_m = _opt(radar_doc, "range_window_m", (list, tuple), "/radar", [1.8, 2.2])
    if len(window_m) != 2:
        raise ConfigError("/radar/range_window_m", "expected [low_m, high_m]")
    try:
        radar = RadarConfig(
            lfm=lfm,
            mzm=mzm,
            l_max=int(_opt(radar_doc, "l_max", int, "/radar", 4)),
            prf=float(_opt(radar_doc, "prf_hz", float, "/radar", 2000.0)),
            dechirp_sample_rate=float(
                _opt(radar_doc, "dechirp_sample_rate_hz", float, "/radar", 48e6)
            ),
            range_window=(float(window_m[0]), float(window_m[1])),
        )
    except ValueError as exc:
        raise ConfigError(
            "/radar",
            str(exc),
            hint="raise dechirp_sample_rate_hz, shrink range_window_m, or lower l_max",
        ) from exc

    scene_doc = _need(doc, "scene", dict, "")
    _reject_unknown(
        scene_doc, {"targets", "platform", "noise_snr_db", "spreading_loss"}, "/scene", strict
    )
    targets_doc = _opt(scene_doc, "targets", list, "/scene", None)
    platform_doc = _opt(scene_doc, "platform", dict, "/scene", None)
    if (targets_doc is None) == (platform_doc is None):
        raise ConfigError("/scene", "exactly one of 'targets' or 'platform' must be given")
    noise = _opt(scene_doc, "noise_snr_db", float, "/scene", None)
    spreading = _opt(scene_doc, "spreading_loss", bool, "/scene", False)
    try:
        if targets_doc is not None:
            scatterers = []
            for i, t in enumerate(targets_doc):
                if not isinstance(t, dict):
                    raise ConfigError(f"/scene/targets/{i}", "expected an object")
                _reject_unknown(
                    t, {"x_m", "y_m", "reflectivity", "phase_rad"}, f"/scene/targets/{i}", strict
                )
                scatterers.append(
                    PointScatterer(
                        x=float(_need(t, "x_m", float, f"/scene/targets/{i}")),
                        y=float(_need(t, "y_m", float, f"/scene/targets/{i}")),
                        reflectivity=float(
                            _opt(t, "reflectivity", float, f"/scene/targets/{i}", 1.0)
                        ),
                        phase=float(_opt(t, "phase_rad", float, f"/scene/targets/{i}", 0.0)),
                    )
                )
            scene = Scene(
                scatterers=tuple(scatterers),
                noise_snr_db=noise,
                rng_seed=seed,
                spreading_loss=spreading,
            )
        else:
            p = platform_doc
            _reject_unknown(
                p,
                {
                    "center_range_m",
                    "radius_m",
                    "angular_rate_rad_s",
                    "scatterer_angles_rad",
                    "reflectivities",
                },
                "/scene/platform",
                strict,
            )
            angles = _need(p, "scatterer_angles_rad", list, "/scene/platform")
            refl = _opt(p, "reflectivities", list, "/scene/platform", [1.0] * len(angles))
            platform = RotatingPlatform(
                center_range=float(_need(p, "center_range_m", float, "/scene/platform")),
                radius=float(_need(p, "radius_m", float, "/scene/platform")),
                angular_rate=float(_need(p, "angular_rate_rad_s", float, "/scene/platform")),
                scatterer_angles=tuple(float(a) for a in angles),
                reflectivities=tuple(float(r) for r in refl),
            )
            scene = Scene(
                platform=platform, noise_snr_db=noise, rng_seed=seed, spreading_loss=spreading
            )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError("/scene", str(exc)) from exc

    fusion_doc = _opt(doc, "fusion", dict, "", {})
    _reject_unknown(
        fusion_doc, {"delta_f_hz", "max_order", "sv_threshold", "pencil_stride"}, "/fusion", strict
    )
    imaging_doc = _opt(doc, "imaging", dict, "", {})
    _reject_unknown(imaging_doc, {"n_pulses", "mode", "window"}, "/imaging", strict)

    try:
        return ScenarioConfig(
            radar=radar,
            scene=scene,
            experiment=experiment,
            output_dir=output_dir,
            seed=seed,
            delta_f=float(_opt(fusion_doc, "delta_f_hz", float, "/fusion", fusion.DEFAULT_DELTA_F)),
            max_order=int(_opt(fusion_doc, "max_order", int, "/fusion", 10)),
            sv_threshold=float(
                _opt(fusion_doc, "sv_threshold", float, "/fusion", fusion.SV_THRESHOLD_DEFAULT)
            ),
            pencil_stride=int(_opt(fusion_doc, "pencil_stride", int, "/fusion", 1)),
            n_pulses=int(_opt(imaging_doc, "n_pulses", int, "/imaging", 128)),
            window=str(_opt(imaging_doc, "window", str, "/imaging", "rect")),
            mode=str(_opt(imaging_doc, "mode", str, "/imaging", "fused-allpole")),
        )
    except ValueError as exc:
        raise ConfigError("/", str(exc)) from exc


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def read_csv_columns(path) -> dict[str, np.ndarray]:
    """Inverse of _write_csv: column name -> float array."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split(",")
        rows = [line.rstrip("\n").split(",") for line in fh if line.strip()]
    cols = np.asarray(rows, dtype=np.float64).reshape(len(rows), len(header))
    return {name: cols[:, i] for i, name in enumerate(header)}


def _profile_rows(prof: RangeProfile):
    return zip(prof.ranges, prof.magnitudes)


def _peak_report(prof: RangeProfile) -> dict:
    peaks = resolve_peaks(prof)
    entry = {
        "band": prof.band_label,
        "resolved_peaks": [
            {"range_m": float(r), "magnitude": float(m)} for r, m in peaks
        ],
        "num_resolved": len(peaks),
    }
    try:
        entry["mainlobe_width_m"] = float(mainlobe_width(prof))
    except ValueError:
        entry["mainlobe_width_m"] = None
    return entry


def _run_spectrum(sc: ScenarioConfig, out: Path, log) -> dict:
    spec = harmonic_amplitudes(sc.radar.mzm, sc.radar.l_max)
    plan = subband_plan(sc.radar.lfm, sc.radar.l_max)
    _write_csv(
        out / "harmonics.csv",
        ["l", "coefficient", "magnitude_db", "negligible"],
        [
            (
                l,
                spec.coefficients[l],
                20.0 * math.log10(max(spec.magnitude(l), 1e-300)),
                float(spec.negligible[l]),
            )
            for l in range(spec.l_max + 1)
        ],
    )
    _write_csv(
        out / "subband_plan.csv",
        ["l", "f_low_hz", "f_high_hz", "bandwidth_hz"],
        [(b.l, b.f_low, b.f_high, b.bandwidth) for b in plan.bands],
    )
    log(f"wrote harmonics.csv and subband_plan.csv for l_max={sc.radar.l_max}")
    return {
        "harmonic_coefficients": {str(l): float(spec.coefficients[l]) for l in range(spec.l_max + 1)},
        "subbands_hz": [[float(b.f_low), float(b.f_high)] for b in plan.bands],
        "total_span_hz": float(plan.total_span),
        "has_overlap": bool(plan.has_overlap),
    }


def _bands_of(sc: ScenarioConfig) -> list[int]:
    if sc.mode.startswith("subband:"):
        return [int(sc.mode.split(":", 1)[1])]
    return list(range(1, sc.radar.l_max + 1))


def _run_range(sc: ScenarioConfig, out: Path, log) -> dict:
    rec = dechirp_synthesize(sc.scene, sc.radar, pulse_index=0)
    report = {"bands": []}
    for l in _bands_of(sc):
        sliced = subband_extract(rec, l, sc.radar)
        prof = range_profile(sliced, l, sc.radar, window=sc.window)
        _write_csv(out / f"profile_l{l}.csv", ["range_m", "magnitude"], _profile_rows(prof))
        report["bands"].append(_peak_report(prof))
        log(f"band l={l}: {report['bands'][-1]['num_resolved']} resolved peak(s)")
    return report


def _fuse_once(sc: ScenarioConfig, pulse_index: int = 0):
    rec = dechirp_synthesize(sc.scene, sc.radar, pulse_index=pulse_index)
    segs = [
        fusion.to_band_segment(subband_extract(rec, l, sc.radar), l, sc.radar, sc.delta_f)
        for l in range(1, sc.radar.l_max + 1)
    ]
    return fusion.assemble_gapped(segs)


def _run_fuse(sc: ScenarioConfig, out: Path, log) -> dict:
    g = _fuse_once(sc)
    _write_csv(
        out / "gapped_spectrum.csv",
        ["freq_hz", "re", "im", "occupied"],
        zip(g.freqs, g.values.real, g.values.imag, g.mask.astype(float)),
    )
    clip = sc.radar.range_window
    direct = fusion.fuse_direct(g, window=sc.window, range_clip=clip)
    _write_csv(out / "profile_fused_direct.csv", ["range_m", "magnitude"], _profile_rows(direct))
    report = {
        "occupancy": g.occupancy,
        "grid_points": int(g.freqs.size),
        "delta_f_hz": g.delta_f,
        "direct": _peak_report(direct),
    }
    refined = fusion.fit_pole_model(
        g,
        sc.max_order,
        sv_threshold=sc.sv_threshold,
        range_window=sc.radar.range_window,
        pencil_stride=sc.pencil_stride,
    )
    _write_csv(
        out / "pole_model.csv",
        ["delay_s", "range_m", "amp_re", "amp_im"],
        [
            (t, t * 299792458.0 / 2.0, a.real, a.imag)
            for t, a in zip(refined.delays, refined.amplitudes)
        ],
    )
    report["pole_model"] = {
        "order": refined.order,
        "fit_residual": refined.fit_residual,
        "degraded": bool(refined.degraded),
        "delays_s": [float(t) for t in refined.delays],
    }
    if refined.order and refined.fit_residual <= fusion.RESIDUAL_GATE_DEFAULT:
        filled = fusion.gap_fill_profile(g, refined, window=sc.window, range_clip=clip)
        _write_csv(
            out / "profile_fused_allpole.csv", ["range_m", "magnitude"], _profile_rows(filled)
        )
        report["allpole"] = _peak_report(filled)
        log(f"all-pole fill: order {refined.order}, residual {refined.fit_residual:.3g}")
    else:
        report["allpole"] = None
        log("all-pole fill skipped (empty or high-residual model); see direct profile")
    return report


def _run_isar(sc: ScenarioConfig, out: Path, log) -> dict:
    dm = imaging.collect_cpi(
        sc.scene,
        sc.radar,
        sc.n_pulses,
        mode=sc.mode,
        max_order=sc.max_order,
        sv_threshold=sc.sv_threshold,
        pencil_stride=sc.pencil_stride,
    )
    img = imaging.isar_image(dm, sc.radar, sc.scene, window=sc.window)
    shown = imaging.crop_range(img, *sc.radar.range_window)
    tag = sc.mode.replace(":", "")
    imaging.write_isar_csv(shown, str(out / f"isar_{tag}.csv"))
    imaging.write_isar_pgm(shown, str(out / f"isar_{tag}.pgm"))
    peaks = imaging.blob_peaks(shown, floor_db=10.0)
    t_center = 0.5 * (dm.t_slow[0] + dm.t_slow[-1])
    truth = (
        imaging.rim_truth(sc.scene, float(t_center)) if sc.scene.platform is not None else []
    )
    log(f"mode {sc.mode}: {len(peaks)} blob(s) above the 10 dB floor")
    return {
        "mode": sc.mode,
        "n_pulses": sc.n_pulses,
        "cpi_s": float(sc.n_pulses / sc.radar.prf),
        "rotation_rad": float(
            (sc.scene.platform.angular_rate if sc.scene.platform else 0.0)
            * sc.n_pulses
            / sc.radar.prf
        ),
        "blobs": [
            {"range_m": r, "cross_range_m": x, "intensity": i} for r, x, i in peaks
        ],
        "truth_at_cpi_center": [{"range_m": r, "cross_range_m": x} for r, x in truth],
    }


def _min_resolvable(sc: ScenarioConfig, mode: str, log) -> float:
    """Coarse descending scan then bisection on the 3 dB two-target rule.

    The valley depth oscillates with separation (carrier-phase fringes), so
    the reported value is the first resolved-to-unresolved crossing met while
    shrinking the separation, not a global threshold.
    """
    center = 2.0
    if sc.scene.scatterers:
        center = float(np.mean([s.range for s in sc.scene.scatterers]))
    lo_m, hi_m = sc.radar.range_window
    span = 18.1e9 if mode.startswith("fused") else None

    def resolved(sep: float) -> bool:
        half = sep / 2.0
        scene = Scene(
            scatterers=(
                PointScatterer(0.0, center - half, 1.0),
                PointScatterer(0.0, center + half, 1.0),
            )
        )
        probe = replace(sc, scene=scene)
        if mode.startswith("subband:"):
            l = int(mode.split(":", 1)[1])
            rec = dechirp_synthesize(scene, sc.radar, pulse_index=0)
            prof = range_profile(subband_extract(rec, l, sc.radar), l, sc.radar, window="rect")
        else:
            g = _fuse_once(probe)
            model = fusion.estimate_poles(
                g,
                sc.max_order,
                sv_threshold=sc.sv_threshold,
                range_window=sc.radar.range_window,
                pencil_stride=max(sc.pencil_stride, 4),
            )
            if mode == "fused-allpole" and model.order:
                refined = fusion.refine_global(g, model)
                if refined.fit_residual <= fusion.RESIDUAL_GATE_DEFAULT:
                    prof = fusion.gap_fill_profile(
                        g, refined, window="rect", range_clip=(lo_m, hi_m)
                    )
                else:
                    prof = fusion.fuse_direct(g, window="rect", range_clip=(lo_m, hi_m))
            else:
                prof = fusion.fuse_direct(g, window="rect", range_clip=(lo_m, hi_m))
        peaks = resolve_peaks(prof)
        return len(peaks) >= 2

    if mode.startswith("subband:"):
        l = int(mode.split(":", 1)[1])
        rayleigh = 299792458.0 / (2.0 * l * sc.radar.lfm.bandwidth)
    else:
        rayleigh = 299792458.0 / (2.0 * span)
    hi = 4.0 * rayleigh
    lo = 0.1 * rayleigh
    if not resolved(hi):
        log(f"{mode}: unresolved even at {hi:.4g} m; reporting infinity")
        return float("inf")
    sep = hi
    prev = hi
    while sep > lo:
        nxt = sep / 1.3
        if not resolved(nxt):
            prev, sep = nxt, sep
            break
        prev, sep = sep, nxt
    else:
        return sep
    bad, good = prev, sep
    for _ in range(10):
        mid = 0.5 * (bad + good)
        if resolved(mid):
            good = mid
        else:
            bad = mid
    return good


def _run_sweep(sc: ScenarioConfig, out: Path, log) -> dict:
    modes = [f"subband:{l}" for l in range(1, sc.radar.l_max + 1)] + ["fused-allpole"]
    rows = []
    results = {}
    for i, mode in enumerate(modes):
        sep = _min_resolvable(sc, mode, log)
        results[mode] = float(sep)
        rows.append((i + 1 if mode.startswith("subband") else 0, sep))
        log(f"{mode}: minimum resolvable separation {sep:.4g} m")
    _write_csv(out / "resolution_sweep.csv", ["band_l_or_0_for_fused", "min_separation_m"], rows)
    return {"min_separation_m": results, "note": "first 3 dB crossing while shrinking separation"}


def run(sc: ScenarioConfig) -> int:
    """Execute the configured experiment; write products under output_dir."""
    out = Path(sc.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    log_lines: list[str] = []

    def log(msg: str) -> None:
        log_lines.append(msg)
        print(msg, file=sys.stderr)

    runner = {
        "spectrum": _run_spectrum,
        "range": _run_range,
        "fuse": _run_fuse,
        "isar": _run_isar,
        "sweep": _run_sweep,
    }[sc.experiment]
    body = runner(sc, out, log)
    wall = time.perf_counter() - t0

    report = {
        "schema": SCHEMA_VERSION,
        "experiment": sc.experiment,
        "seed": sc.seed,
        "parameters": {
            "f_start_hz": sc.radar.lfm.f_start,
            "bandwidth_hz": sc.radar.lfm.bandwidth,
            "duration_s": sc.radar.lfm.duration,
            "chirp_rate_hz_per_s": sc.radar.lfm.chirp_rate,
            "dechirp_sample_rate_hz": sc.radar.dechirp_sample_rate,
            "l_max": sc.radar.l_max,
            "prf_hz": sc.radar.prf,
            "range_window_m": list(sc.radar.range_window),
            "modulation_index": sc.radar.mzm.modulation_index,
            "bias_angle_rad": sc.radar.mzm.bias_angle,
            "window": sc.window,
            "mode": sc.mode,
        },
        "results": body,
    }
    with open(out / "run_report.json", "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    # Wall time is kept out of the deterministic products on purpose.
    with open(out / "run.log", "w", encoding="utf-8") as fh:
        fh.write(f"wall_time_s {wall:.3f}\n")
        for line in log_lines:
            fh.write(line + "\n")
    print(f"done in {wall:.2f} s, products in {out}", file=sys.stderr)
    return 0


def bundled_config_path(name: str) -> Path:
    """Path of a packaged example config such as 'paper_ranging.json'."""
    return Path(str(resources.files("mbradar").joinpath("configs", name)))


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="mbradar",
        description="Photonic multiband radar simulator: harmonic subbands, "
        "de-chirped profiles, coherent fusion, ISAR imaging.",
    )
    sub = ap.add_subparsers(dest="command", required=True)
    names = {
        "simulate-spectrum": "spectrum",
        "range-profile": "range",
        "fuse": "fuse",
        "isar": "isar",
        "sweep-resolution": "sweep",
        "validate": None,
    }
    for cmd in names:
        p = sub.add_parser(cmd)
        p.add_argument("config", help="path to a scenario JSON (see bundled configs)")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--out", default=None, help="override output directory")
        p.add_argument("--window", choices=["hann", "rect"], default=None)
        p.add_argument(
            "--mode",
            default=None,
            help="subband:L, fused-direct, or fused-allpole (range/isar/sweep)",
        )
        p.add_argument("--pulses", type=int, default=None, help="override imaging n_pulses")
        strictness = p.add_mutually_exclusive_group()
        strictness.add_argument("--strict", dest="strict", action="store_true", default=True)
        strictness.add_argument("--lax", dest="strict", action="store_false")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    experiment_by_cmd = {
        "simulate-spectrum": "spectrum",
        "range-profile": "range",
        "fuse": "fuse",
        "isar": "isar",
        "sweep-resolution": "sweep",
    }
    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        _emit_error("cli", str(exc))
        return 2
    try:
        sc = parse_config(text, strict=args.strict)
        if args.command in experiment_by_cmd:
            sc = replace(sc, experiment=experiment_by_cmd[args.command])
        if args.seed is not None:
            sc = replace(sc, seed=args.seed, scene=replace(sc.scene, rng_seed=args.seed))
        if args.out is not None:
            sc = replace(sc, output_dir=args.out)
        if args.window is not None:
            sc = replace(sc, window=args.window)
        if args.mode is not None:
            sc = replace(sc, mode=args.mode)
        if args.pulses is not None:
            sc = replace(sc, n_pulses=args.pulses)
    except ConfigError as exc:
        _emit_error("cli.parse_config", str(exc), pointer=exc.pointer, hint=exc.hint)
        return 2
    if args.command == "validate":
        print(f"valid: experiment={sc.experiment} seed={sc.seed}")
        return 0
    try:
        return run(sc)
    except (ValueError, ArithmeticError) as exc:
        _emit_error(f"cli.run[{sc.experiment}]", str(exc))
        return 3


def _emit_error(module: str, message: str, pointer: str | None = None, hint: str | None = None) -> None:
    payload = {"error": {"module": module, "message": message}}
    if pointer:
        payload["error"]["pointer"] = pointer
    if hint:
        payload["error"]["hint"] = hint
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
