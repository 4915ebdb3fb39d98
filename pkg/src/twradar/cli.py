"""Command-line entry point: ``twradar {simulate,analyze,validate,presets}``."""

import argparse
from dataclasses import dataclass
from pathlib import Path
import sys
import traceback


from twradar import antenna, chirp, config, ranging, spectro, synth, validation
from twradar.errors import ConfigParseError, NoMoverDetected, TraceFormatError, TwrError
from twradar.scene import CableRun, D0_CALIBRATED, WALL_PRESETS, effective_cable_length

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


@dataclass(frozen=True)
class RunManifest:
    scene_path: str
    output_dir: str
    radar_preset: str = None
    antenna_name: str = None
    seed: int = None
    window: str = "hann"
    window_len: int = None
    hop: int = None
    fft_len: int = None
    freq_points: int = None
    floor_dbm: float = None
    ceil_dbm: float = None
    threshold_dbm: float = None
    min_separation_hz: float = 20e3
    workers: int = 1


def _stft_config(rx, m):
    cfg = spectro.default_stft_config(rx, window_kind=m.window)
    window_len = m.window_len or cfg.window_len
    hop = m.hop or (cfg.hop if window_len == cfg.window_len else window_len)
    fft_len = m.fft_len or max(cfg.fft_len, window_len)
    return spectro.StftConfig(m.window, window_len, hop, fft_len)


def _analyze_trace(trace, rx, m, s, cable, floor_dbm, ceil_dbm):
    cfg = _stft_config(rx, m)
    grid = spectro.spectrogram(trace, cfg, floor_dbm, ceil_dbm, freq_points=m.freq_points)
    threshold = m.threshold_dbm
    if threshold is None:
        threshold = ranging.detection_threshold(grid)
    min_sep = max(m.min_separation_hz, grid.freq_step)
    leakage = spectro.leakage_envelope(cfg, rx.sample_rate)
    peaks = ranging.extract_peaks(grid, threshold, min_sep, leakage=leakage)
    statics = ranging.static_ranges(peaks, s, cable)
    try:
        walker = ranging.track_walker(peaks, s, cable)
    except NoMoverDetected:
        walker = None
    return cfg, grid, threshold, peaks, statics, walker


def _write_outputs(out, grid, statics, walker, summary):
    out.mkdir(parents=True, exist_ok=True)
    spectro.export_grid(grid, out / "spectrogram")
    rows = list(statics)
    if walker is not None:
        rows.append(ranging.RangeEstimate(walker.f_b_max, walker.d_max, statics[0].d0_used if statics
                                          else float("nan"), "walker max"))
    (out / "ranges.csv").write_text(ranging.range_table_csv(rows))
    (out / "run.txt").write_text("\n".join(summary) + "\n")


def _summary_lines(cfg, grid, threshold, statics, walker, d0):
    lines = [
        f"stft = {cfg.window_kind} window {cfg.window_len} hop {cfg.hop} fft {cfg.fft_len}",
        f"grid = {grid.shape[0]} x {grid.shape[1]} "
        f"({grid.freq_axis[0]:.0f}-{grid.freq_axis[-1]:.0f} Hz)",
        f"clamp_dbm = {grid.floor_dbm:g} .. {grid.ceil_dbm:g}",
        f"threshold_dbm = {threshold:.2f}",
        f"d0_m = {d0:.4f}",
    ]
    for e in statics:
        lines.append(f"static_ridge = {e.f_b / 1e6:.4f} MHz -> {e.d:.3f} m {e.flag}".rstrip())
    if walker is None:
        lines.append("walker = none detected")
    else:
        lines.append(f"walker_samples = {len(walker.samples)}")
        lines.append(f"walker_max = {walker.f_b_max / 1e6:.4f} MHz -> {walker.d_max:.3f} m "
                     f"at t = {walker.t_max:.3f} s")
    return lines


def cmd_simulate(m):
    """Synthesize a scene and write grid CSV/PGM, raw trace, range table and summary."""
    sc = config.load_scene(m.scene_path, antenna=m.antenna_name, radar=m.radar_preset,
                           seed=m.seed, floor_dbm=m.floor_dbm, ceil_dbm=m.ceil_dbm)
    out = Path(m.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    trace = synth.synthesize(sc.scene, sc.chirp, sc.receiver, sc.n_frames, workers=m.workers)
    synth.write_raw_trace(trace, out / "trace.twrif")
    # analyse the float32 samples that were written so `analyze` reproduces this grid
    stored = synth.IfTrace(trace.frames.astype("<f4").astype(float), trace.t0_of_frame,
                           trace.config, trace.chirp)
    cable = sc.scene.cable
    cfg, grid, thr, _, statics, walker = _analyze_trace(stored, sc.receiver, m, sc.chirp.s, cable,
                                                        sc.floor_dbm, sc.ceil_dbm)
    summary = [
        f"scene = {m.scene_path}",
        f"radar_preset = {sc.radar_preset}",
        f"antenna = {sc.antenna_name}",
        f"seed = {sc.scene.noise.seed}",
        f"chirp = {sc.chirp.f_c:.6g} Hz + {sc.chirp.B:.6g} Hz over {sc.chirp.T:.6g} s "
        f"(slope {sc.chirp.s:.6g} Hz/s)",
        f"receiver = {sc.receiver.sample_rate:.6g} Hz, {sc.receiver.samples_per_frame} samples/frame, "
        f"{sc.n_frames} frames every {sc.receiver.frame_interval:g} s",
        f"cable = {cable.convention}",
    ] + _summary_lines(cfg, grid, thr, statics, walker, effective_cable_length(cable))
    _write_outputs(out, grid, statics, walker, summary)
    return summary


def cmd_analyze(raw_path, m, s, cable, frame_interval):
    """Spectrogram and ranging of a stored ``TWRIF1`` trace."""
    trace = synth.read_raw_trace(raw_path, frame_interval=frame_interval)
    floor = m.floor_dbm if m.floor_dbm is not None else spectro.CLAMP_PRESETS["default"][0]
    ceil = m.ceil_dbm if m.ceil_dbm is not None else spectro.CLAMP_PRESETS["default"][1]
    cfg, grid, thr, _, statics, walker = _analyze_trace(trace, trace.config, m, s, cable, floor, ceil)
    summary = [f"trace = {raw_path}", f"slope = {s:.6g} Hz/s"] + _summary_lines(
        cfg, grid, thr, statics, walker, effective_cable_length(cable))
    _write_outputs(Path(m.output_dir), grid, statics, walker, summary)
    return summary


def cmd_validate():
    checks = validation.run_checks()
    return checks, validation.format_report(checks)


def cmd_presets():
    lines = ["radar presets:"]
    for name, kw in chirp.RADAR_PRESETS.items():
        c = chirp.make_chirp(**kw)
        lines.append(f"  {name}: {c.f_c / 1e9:.3f}-{c.f_stop / 1e9:.3f} GHz, "
                     f"{c.s / 1e12:.2f} MHz/us, T = {c.T * 1e6:.2f} us")
    lines.append("antennas:")
    for m in antenna.antenna_presets().values():
        note = f" [{'; '.join(m.notes)}]" if m.notes else ""
        lines.append(f"  {m.name}: FBR {m.fbr_db:g} dB, directivity {m.directivity_dbi:g} dBi, "
                     f"pattern exponent {m.pattern_exponent:.3f}{note}")
    lines.append("walls:")
    for name, kw in WALL_PRESETS.items():
        lines.append(f"  {name}: {kw['one_way_loss_db']:g} dB one-way (assumed)")
    lines.append("clamp presets:")
    for name, (lo, hi) in spectro.CLAMP_PRESETS.items():
        lines.append(f"  {name}: {lo:g} .. {hi:g} dBm")
    lines.append("scenes:")
    lines.extend(f"  {name}" for name in config.bundled_scenes())
    return lines


def _common(p):
    p.add_argument("--seed", type=int, default=None, help="noise seed (overrides the scene file)")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--freq-points", type=int, default=None,
                   help="display points across 1-5 MHz (default: 5 kHz steps, 801 points)")
    p.add_argument("--floor-dbm", type=float, default=None)
    p.add_argument("--ceil-dbm", type=float, default=None)
    p.add_argument("--window", choices=sorted(spectro.WINDOW_KINDS), default="hann")
    p.add_argument("--window-len", type=int, default=None)
    p.add_argument("--hop", type=int, default=None)
    p.add_argument("--fft-len", type=int, default=None)
    p.add_argument("--threshold-dbm", type=float, default=None,
                   help="peak threshold (default: noise median + 15 dB, or 80 dB below the top if higher)")
    p.add_argument("--min-separation-hz", type=float, default=20e3)


def build_parser():
    parser = argparse.ArgumentParser(prog="twradar", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="synthesize a scene and analyse it")
    sim.add_argument("--scene", required=True, help="scene INI file or bundled scene name")
    sim.add_argument("--antenna", default=None, help="antenna preset or freq_hz,gain_dbi CSV")
    sim.add_argument("--radar", default=None, choices=sorted(chirp.RADAR_PRESETS))
    sim.add_argument("--workers", type=int, default=1, help="frame synthesis threads")
    _common(sim)

    ana = sub.add_parser("analyze", help="spectrogram and ranging of a TWRIF1 trace")
    ana.add_argument("trace")
    ana.add_argument("--radar", default="roc-operational", choices=sorted(chirp.RADAR_PRESETS))
    ana.add_argument("--d0", type=float, default=D0_CALIBRATED, help="effective cable length (m)")
    ana.add_argument("--frame-interval", type=float, default=synth.DEFAULT_FRAME_INTERVAL)
    _common(ana)

    sub.add_parser("validate", help="check the model against the published tables")

    pre = sub.add_parser("presets", help="list built-in presets")
    pre.add_argument("action", choices=["list"], nargs="?", default="list")
    return parser


def _manifest(args, scene=None):
    return RunManifest(
        scene_path=scene, output_dir=args.out, radar_preset=getattr(args, "radar", None),
        antenna_name=getattr(args, "antenna", None), seed=args.seed, window=args.window,
        window_len=args.window_len, hop=args.hop, fft_len=args.fft_len,
        freq_points=args.freq_points, floor_dbm=args.floor_dbm, ceil_dbm=args.ceil_dbm,
        threshold_dbm=args.threshold_dbm, min_separation_hz=args.min_separation_hz,
        workers=getattr(args, "workers", 1))


def _origin(exc):
    """Name of the package module that raised ``exc``."""
    frames = traceback.extract_tb(exc.__traceback__)
    mods = [Path(f.filename).stem for f in frames if "twradar" in Path(f.filename).parts]
    return mods[-1] if mods else "twradar"


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            path = config.resolve_scene_path(args.scene)
            if not path.exists():
                print(f"twradar: scene file not found: {args.scene}", file=sys.stderr)
                return EXIT_INPUT
            lines = cmd_simulate(_manifest(args, args.scene))
            print("\n".join(lines))
        elif args.command == "analyze":
            if not Path(args.trace).exists():
                print(f"twradar: trace file not found: {args.trace}", file=sys.stderr)
                return EXIT_INPUT
            s = chirp.radar_preset(args.radar).s
            cable = CableRun(convention="fixed-d0", d0_override=args.d0)
            lines = cmd_analyze(args.trace, _manifest(args), s, cable, args.frame_interval)
            print("\n".join(lines))
        elif args.command == "validate":
            checks, report = cmd_validate()
            print(report)
            return EXIT_OK if all(c.passed for c in checks) else EXIT_FAIL
        else:
            print("\n".join(cmd_presets()))
    except (ConfigParseError, TraceFormatError) as exc:
        print(f"twradar: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except TwrError as exc:
        print(f"twradar: {_origin(exc)}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"twradar: {exc}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
