"""Calibrated short-time Fourier transform and spectrogram grids.

Coefficients are amplitude-corrected by ``2 / sum(w)`` so a sinusoid centred
on a bin reports its peak amplitude; powers are quoted in dBm into 50 ohm.
"""

from dataclasses import dataclass
import math
from pathlib import Path

import numpy as np
from scipy.signal import get_window

from twradar.constants import R_REF
from twradar.errors import InvalidConfigError

WINDOW_KINDS = {"hann": "hann", "hamming": "hamming", "rect": "boxcar"}

# -3 dB main-lobe width in bins for each window
_WIDTH_3DB_BINS = {"hann": 1.44, "hamming": 1.30, "rect": 0.89}

# power assigned to empty bins so dB values stay finite (W)
_POWER_FLOOR_W = 1e-30
NUMERIC_FLOOR_DBM = 10.0 * math.log10(_POWER_FLOOR_W) + 30.0

DISPLAY_BAND = (1.0e6, 5.0e6)
DISPLAY_STEP = 5.0e3
TARGET_RBW = 15.0e3

# colour-map clamps: the general display window and the wider through-wall one
CLAMP_PRESETS = {"default": (-66.0, -15.0), "thru-wall": (-125.0, -25.0)}


@dataclass(frozen=True)
class StftConfig:
    window_kind: str = "hann"
    window_len: int = 1190
    hop: int = 1190
    fft_len: int = 4864

    def __post_init__(self):
        if self.window_kind not in WINDOW_KINDS:
            raise InvalidConfigError(f"unknown window {self.window_kind!r}")
        if not 0 < self.hop <= self.window_len <= self.fft_len:
            raise InvalidConfigError("need 0 < hop <= window_len <= fft_len")

    def window(self):
        return get_window(WINDOW_KINDS[self.window_kind], self.window_len, fftbins=True)

    def resolution_bandwidth(self, sample_rate):
        """-3 dB resolution bandwidth (Hz) at ``sample_rate``."""
        return _WIDTH_3DB_BINS[self.window_kind] * sample_rate / self.window_len

    def bin_spacing(self, sample_rate):
        return sample_rate / self.fft_len


def rbw_window_len(sample_rate, rbw=TARGET_RBW, kind="hann"):
    """Window length giving the requested -3 dB resolution bandwidth."""
    return int(round(_WIDTH_3DB_BINS[kind] * sample_rate / rbw))


def leakage_envelope(cfg, sample_rate, oversample=16):
    """Worst-case level (dB below the peak) a tone leaks to each frequency offset.

    Computed from the window's own spectrum, then made non-increasing with
    offset so nulls between sidelobes do not count as gaps.
    """
    w = cfg.window()
    n = cfg.window_len * oversample
    mag = np.abs(np.fft.rfft(w, n))
    db = 20.0 * np.log10(np.maximum(mag / mag[0], 1e-15))
    env = np.maximum.accumulate(db[::-1])[::-1]
    return np.fft.rfftfreq(n, 1.0 / sample_rate), env


def default_stft_config(rx, display_step=DISPLAY_STEP, window_kind="hann"):
    """One analysis window per chirp frame, zero-padded onto the display step.

    A window longer than the frame would straddle chirp boundaries, where the
    IF phase restarts, so the 15 kHz target is capped at one frame.
    """
    window_len = min(rbw_window_len(rx.sample_rate, TARGET_RBW, window_kind), rx.samples_per_frame)
    hop = window_len if window_len == rx.samples_per_frame else max(1, window_len // 4)
    per_step = rx.sample_rate / display_step
    if abs(per_step - round(per_step)) < 1e-9 * per_step and round(per_step) >= window_len:
        fft_len = int(round(per_step))
    else:
        fft_len = 1 << int(math.ceil(math.log2(4 * window_len)))
    return StftConfig(window_kind, window_len, hop, fft_len)


@dataclass(frozen=True, eq=False)
class StftResult:
    coeffs: np.ndarray  # rows x one-sided bins, amplitude corrected
    freqs: np.ndarray
    times: np.ndarray
    config: StftConfig
    window_sum: float

    def power_watts(self):
        return np.abs(self.coeffs) ** 2 / (2.0 * R_REF)

    def power_dbm(self):
        return 10.0 * np.log10(np.maximum(self.power_watts(), _POWER_FLOOR_W)) + 30.0

    def energy(self):
        """Sum of |x w|^2 over all windows, recovered from the coefficients by Parseval."""
        raw = np.abs(self.coeffs * (self.window_sum / 2.0)) ** 2
        n = self.config.fft_len
        weights = np.full(raw.shape[1], 2.0)
        weights[0] = 1.0
        if n % 2 == 0:
            weights[-1] = 1.0
        return float(np.sum(raw * weights) / n)


def _window_starts(n_samples, cfg):
    if cfg.window_len > n_samples:
        raise InvalidConfigError(
            f"window of {cfg.window_len} samples longer than the {n_samples}-sample record")
    return np.arange(0, n_samples - cfg.window_len + 1, cfg.hop)


def stft_samples(x, sample_rate, cfg, times=None, chunk=256):
    """STFT of a 1-D record; ``times`` gives each sample's timestamp."""
    x = np.asarray(x, dtype=float)
    if times is None:
        times = np.arange(x.size) / sample_rate
    starts = _window_starts(x.size, cfg)
    w = cfg.window()
    wsum = float(np.sum(w))
    scale = 2.0 / wsum
    idx = np.arange(cfg.window_len)
    rows = []
    for i in range(0, starts.size, chunk):
        seg = x[starts[i:i + chunk, None] + idx[None, :]] * w
        rows.append(np.fft.rfft(seg, n=cfg.fft_len, axis=1) * scale)
    coeffs = np.vstack(rows)
    lo, hi = (cfg.window_len - 1) // 2, cfg.window_len // 2
    t = 0.5 * (times[starts + lo] + times[starts + hi])
    freqs = np.fft.rfftfreq(cfg.fft_len, 1.0 / sample_rate)
    return StftResult(coeffs, freqs, t, cfg, wsum)


def stft(trace, cfg):
    """STFT over the trace's frames joined in time order."""
    return stft_samples(trace.samples(), trace.config.sample_rate, cfg, trace.sample_times())


@dataclass(frozen=True, eq=False)
class SpectrogramGrid:
    power_dbm: np.ndarray  # time x frequency
    freq_axis: np.ndarray
    time_axis: np.ndarray
    floor_dbm: float = CLAMP_PRESETS["default"][0]
    ceil_dbm: float = CLAMP_PRESETS["default"][1]

    def __post_init__(self):
        p = np.asarray(self.power_dbm, dtype=float)
        f = np.asarray(self.freq_axis, dtype=float)
        t = np.asarray(self.time_axis, dtype=float)
        if p.shape != (t.size, f.size):
            raise InvalidConfigError(f"grid shape {p.shape} does not match axes ({t.size}, {f.size})")
        if np.any(np.diff(f) <= 0) or np.any(np.diff(t) <= 0):
            raise InvalidConfigError("grid axes must be strictly increasing")
        if self.ceil_dbm < self.floor_dbm:
            raise InvalidConfigError("ceil must not be below floor")
        for a in (p, f, t):
            a.flags.writeable = False
        object.__setattr__(self, "power_dbm", p)
        object.__setattr__(self, "freq_axis", f)
        object.__setattr__(self, "time_axis", t)

    @property
    def shape(self):
        return self.power_dbm.shape

    @property
    def freq_step(self):
        return float(np.min(np.diff(self.freq_axis))) if self.freq_axis.size > 1 else math.inf

    def clamped(self):
        return np.clip(self.power_dbm, self.floor_dbm, self.ceil_dbm)


def display_axis(f_min=DISPLAY_BAND[0], f_max=DISPLAY_BAND[1], step=DISPLAY_STEP, points=None):
    if not f_max > f_min:
        raise InvalidConfigError("display band must have f_max > f_min")
    if points is not None:
        if points < 2:
            raise InvalidConfigError("need at least two frequency points")
        return np.linspace(f_min, f_max, int(points))
    n = int(round((f_max - f_min) / step)) + 1
    return f_min + step * np.arange(n)


def _onto_axis(power_w, freqs, axis):
    """Pick native bins when they coincide with the axis, otherwise interpolate linear power."""
    df = freqs[1] - freqs[0]
    pos = axis / df
    nearest = np.round(pos).astype(int)
    if np.all(np.abs(pos - nearest) < 1e-6):
        return power_w[:, nearest]
    lo = np.clip(np.floor(pos).astype(int), 0, freqs.size - 2)
    frac = pos - lo
    return power_w[:, lo] * (1.0 - frac) + power_w[:, lo + 1] * frac


def spectrogram(trace, cfg=None, floor_dbm=None, ceil_dbm=None, f_min=DISPLAY_BAND[0],
                f_max=DISPLAY_BAND[1], freq_step=DISPLAY_STEP, freq_points=None):
    """Power grid (dBm) on the display frequency axis.

    The full dynamic range is kept; ``floor_dbm``/``ceil_dbm`` only travel with
    the grid for image export.
    """
    if cfg is None:
        cfg = default_stft_config(trace.config, freq_step)
    fs = trace.config.sample_rate
    if f_max > fs / 2.0 or f_min < 0:
        raise InvalidConfigError(f"display band {f_min:g}-{f_max:g} Hz outside 0-{fs / 2:g} Hz")
    res = stft(trace, cfg)
    axis = display_axis(f_min, f_max, freq_step, freq_points)
    p = _onto_axis(res.power_watts(), res.freqs, axis)
    p_dbm = 10.0 * np.log10(np.maximum(p, _POWER_FLOOR_W)) + 30.0
    floor = CLAMP_PRESETS["default"][0] if floor_dbm is None else floor_dbm
    ceil = CLAMP_PRESETS["default"][1] if ceil_dbm is None else ceil_dbm
    return SpectrogramGrid(p_dbm, axis, res.times, floor, ceil)


def parabolic_offset(y_left, y_mid, y_right):
    """Vertex offset in bins of the parabola through three equally spaced samples."""
    den = y_left - 2.0 * y_mid + y_right
    if den == 0:
        return 0.0
    return 0.5 * (y_left - y_right) / den


def peak_frequency(freqs, power_db, interpolate=False):
    """Frequency of the largest value; optionally refined by a log-parabolic fit."""
    power_db = np.asarray(power_db)
    k = int(np.argmax(power_db))
    f = float(freqs[k])
    if interpolate and 0 < k < power_db.size - 1:
        f += parabolic_offset(power_db[k - 1], power_db[k], power_db[k + 1]) * (freqs[k + 1] - freqs[k])
    return f


def _fmt(v, spec):
    s = format(v, spec)
    return "0" if s in ("-0", "-0.0") else s


def write_grid_csv(g, path):
    """Header row of frequencies (Hz), first column of times (s), dBm to 2 decimals."""
    lines = [",".join(["time_s"] + [_fmt(f, ".10g") for f in g.freq_axis])]
    for t, row in zip(g.time_axis, g.power_dbm):
        lines.append(",".join([_fmt(t, ".9g")] + [_fmt(v, ".2f") for v in row]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_grid_csv(path, floor_dbm=CLAMP_PRESETS["default"][0], ceil_dbm=CLAMP_PRESETS["default"][1]):
    rows = Path(path).read_text(encoding="ascii").strip().split("\n")
    freqs = np.array([float(v) for v in rows[0].split(",")[1:]])
    body = np.array([[float(v) for v in r.split(",")] for r in rows[1:]])
    return SpectrogramGrid(body[:, 1:], freqs, body[:, 0], floor_dbm, ceil_dbm)


def pgm_pixels(g):
    """8-bit grey levels; halfway values round down."""
    if g.ceil_dbm == g.floor_dbm:
        return np.zeros(g.shape, dtype=np.uint8)
    x = 255.0 * (g.clamped() - g.floor_dbm) / (g.ceil_dbm - g.floor_dbm)
    return np.ceil(x - 0.5).astype(np.uint8)


def write_pgm(g, path):
    """Binary P5 image: time runs down the rows, frequency increases to the right."""
    px = pgm_pixels(g)
    h, w = px.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(px.tobytes())


def export_grid(g, path):
    """Write ``<path>.csv`` and ``<path>.pgm``; returns both paths."""
    base = Path(path)
    if base.suffix in (".csv", ".pgm"):
        base = base.with_suffix("")
    csv_path, pgm_path = base.with_suffix(".csv"), base.with_suffix(".pgm")
    write_grid_csv(g, csv_path)
    write_pgm(g, pgm_path)
    return csv_path, pgm_path
