"""INI scene files.

Sections: ``[radar]``, ``[receiver]``, ``[cable]``, ``[antenna]``, ``[display]``,
``[noise]``, ``[wall.<label>]`` and ``[target.<label>]``. Values given on the
command line override the file, which overrides the named presets.
"""

import configparser
from dataclasses import dataclass, field, replace
import math
from pathlib import Path
import re

from twradar.antenna import get_antenna
from twradar.chirp import radar_preset
from twradar.errors import ConfigParseError, TwrError
from twradar.scene import (BACK_AND_FORTH, D0_CALIBRATED, STATIC, WALL_PRESETS, CableRun,
                           NoiseSpec, Reflector, Scene, Trajectory, Wall)
from twradar.spectro import CLAMP_PRESETS
from twradar.synth import default_receiver

SCENE_DIR = Path(__file__).parent / "scenes"

_KNOWN = {
    "radar": {"preset", "f_c", "bandwidth", "chirp_time", "slope", "tx_power_dbm", "phi_0",
              "pa_gain_db", "duration_s", "n_frames"},
    "receiver": {"sample_rate", "samples_per_frame", "frame_interval", "conversion_gain_db",
                 "if_bandwidth", "adc_bits", "adc_full_scale"},
    "cable": {"convention", "l1", "eps_r1", "l2", "eps_r2", "d0_override"},
    "antenna": {"name"},
    "display": {"floor_dbm", "ceil_dbm", "clamp_preset"},
    "noise": {"noise_density_dbm_per_hz", "seed"},
    "wall": {"preset", "one_way_loss_db", "thickness_m"},
    "target": {"rcs_sqm", "kind", "distance", "d_near", "d_far", "speed", "start_at",
               "walls_crossed", "off_axis_deg"},
}


@dataclass(frozen=True)
class SceneConfig:
    """Everything a simulation run needs, resolved from a scene file."""

    path: str
    scene: Scene
    chirp: object
    receiver: object
    n_frames: int
    antenna_name: str
    radar_preset: str
    floor_dbm: float
    ceil_dbm: float
    notes: tuple = field(default=())


def bundled_scenes():
    return sorted(p.name for p in SCENE_DIR.glob("*.ini"))


def resolve_scene_path(name):
    p = Path(name)
    if p.exists():
        return p
    bundled = SCENE_DIR / name
    if bundled.exists():
        return bundled
    return p


class _Reader:
    def __init__(self, path, text):
        self.path = path
        self.lines = text.splitlines()

    def lineno(self, section, key=None):
        sec_re = re.compile(r"^\s*\[\s*" + re.escape(section) + r"\s*\]")
        in_sec = False
        for i, line in enumerate(self.lines, 1):
            if line.lstrip().startswith("["):
                in_sec = bool(sec_re.match(line))
                if in_sec and key is None:
                    return i
                continue
            if in_sec and key is not None and re.match(r"^\s*" + re.escape(key) + r"\s*[=:]", line):
                return i
        return None

    def fail(self, section, key, msg):
        raise ConfigParseError(self.path, msg, self.lineno(section, key))

    def number(self, cp, section, key, default=None, kind=float):
        if not cp.has_option(section, key):
            return default
        raw = cp.get(section, key).strip()
        if raw.lower() in ("none", ""):
            return None
        try:
            val = kind(raw) if kind is not int else int(float(raw))
        except ValueError:
            self.fail(section, key, f"[{section}] {key} = {raw!r} is not a number")
        if isinstance(val, float) and not math.isfinite(val):
            self.fail(section, key, f"[{section}] {key} must be finite")
        return val


def load_scene(path, *, antenna=None, radar=None, seed=None, floor_dbm=None, ceil_dbm=None):
    """Parse a scene file; keyword arguments are command-line overrides."""
    if antenna is not None:
        get_antenna(antenna)  # a bad flag is not a scene-file error
    path = resolve_scene_path(path)
    if not path.exists():
        raise FileNotFoundError(f"scene file not found: {path}")
    text = path.read_text()
    rd = _Reader(path, text)
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    try:
        cp.read_string(text, source=str(path))
    except configparser.Error as exc:
        lineno = getattr(exc, "lineno", None)
        msg = getattr(exc, "message", str(exc)).splitlines()[0]
        raise ConfigParseError(path, msg, lineno) from None

    for sec in cp.sections():
        base = sec.split(".", 1)[0]
        if base not in _KNOWN or (base in ("wall", "target")) != ("." in sec):
            rd.fail(sec, None, f"unknown section [{sec}]")
        for key in cp.options(sec):
            if key not in _KNOWN[base]:
                rd.fail(sec, key, f"unknown key {key!r} in [{sec}]")

    try:
        return _build(cp, rd, path, antenna, radar, seed, floor_dbm, ceil_dbm)
    except ConfigParseError:
        raise
    except TwrError as exc:
        raise ConfigParseError(path, str(exc)) from None


def _build(cp, rd, path, antenna, radar, seed, floor_dbm, ceil_dbm):
    num = lambda sec, key, default=None, kind=float: rd.number(cp, sec, key, default, kind)
    get = lambda sec, key, default=None: cp.get(sec, key).strip() if cp.has_option(sec, key) else default

    preset = radar or get("radar", "preset", "roc-operational")
    chirp = radar_preset(preset, f_c=num("radar", "f_c"), B=num("radar", "bandwidth"),
                         T=num("radar", "chirp_time"), s=num("radar", "slope"),
                         tx_power_dbm=num("radar", "tx_power_dbm"), phi_0=num("radar", "phi_0"))
    rx = default_receiver(
        chirp,
        sample_rate=num("receiver", "sample_rate"),
        samples_per_frame=num("receiver", "samples_per_frame", kind=int),
        frame_interval=num("receiver", "frame_interval"),
        conversion_gain_db=num("receiver", "conversion_gain_db"),
        if_bandwidth=num("receiver", "if_bandwidth"),
        adc_bits=num("receiver", "adc_bits", kind=int),
        adc_full_scale=num("receiver", "adc_full_scale"),
    )
    n_frames = num("radar", "n_frames", kind=int)
    if n_frames is None:
        duration = num("radar", "duration_s", 30.0)
        n_frames = max(1, int(round(duration / rx.frame_interval)))

    cable = CableRun(
        l1=num("cable", "l1", 0.0), eps_r1=num("cable", "eps_r1", 1.0),
        l2=num("cable", "l2", 0.0), eps_r2=num("cable", "eps_r2", 1.0),
        convention=get("cable", "convention", "fixed-d0"),
        d0_override=num("cable", "d0_override", D0_CALIBRATED))

    ant_name = antenna or get("antenna", "name", "quasi-yagi")
    ant = get_antenna(ant_name)

    walls = []
    for sec in cp.sections():
        if not sec.startswith("wall."):
            continue
        kw = {}
        if cp.has_option(sec, "preset"):
            name = get(sec, "preset")
            if name not in WALL_PRESETS:
                rd.fail(sec, "preset", f"unknown wall preset {name!r}")
            kw.update(WALL_PRESETS[name])
        for key in ("one_way_loss_db", "thickness_m"):
            v = num(sec, key)
            if v is not None:
                kw[key] = v
        if "one_way_loss_db" not in kw:
            rd.fail(sec, None, f"[{sec}] needs one_way_loss_db or a preset")
        walls.append(Wall(sec.split(".", 1)[1], **kw))

    targets = []
    for sec in cp.sections():
        if not sec.startswith("target."):
            continue
        label = sec.split(".", 1)[1]
        kind = get(sec, "kind", STATIC)
        if kind == STATIC:
            d = num(sec, "distance")
            if d is None:
                rd.fail(sec, None, f"[{sec}] static target needs distance")
            traj = Trajectory.fixed(d)
        elif kind == BACK_AND_FORTH:
            traj = Trajectory(kind, num(sec, "d_near"), num(sec, "d_far"), num(sec, "speed", 1.0),
                              get(sec, "start_at", "near"))
        else:
            rd.fail(sec, "kind", f"unknown target kind {kind!r}")
        crossed = tuple(w.strip() for w in get(sec, "walls_crossed", "").split(",") if w.strip())
        off = num(sec, "off_axis_deg", 0.0)
        targets.append(Reflector(label, num(sec, "rcs_sqm", 1.0), traj, crossed, math.radians(off)))

    noise = NoiseSpec(num("noise", "noise_density_dbm_per_hz"),
                      seed if seed is not None else num("noise", "seed", 0, kind=int))

    clamp = get("display", "clamp_preset", "default")
    if clamp not in CLAMP_PRESETS:
        rd.fail("display", "clamp_preset", f"unknown clamp preset {clamp!r}")
    lo, hi = CLAMP_PRESETS[clamp]
    lo = floor_dbm if floor_dbm is not None else num("display", "floor_dbm", lo)
    hi = ceil_dbm if ceil_dbm is not None else num("display", "ceil_dbm", hi)

    scene = Scene(tuple(targets), tuple(walls), cable, noise, ant, num("radar", "pa_gain_db", 0.0))
    return SceneConfig(str(path), scene, chirp, rx, n_frames, ant_name, preset, lo, hi)


def with_seed(cfg, seed):
    scene = replace(cfg.scene, noise=replace(cfg.scene.noise, seed=seed))
    return replace(cfg, scene=scene)
