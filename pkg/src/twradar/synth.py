"""De-chirped IF synthesis and the raw ``TWRIF1`` trace format.

Each frame is one chirp sampled by the receiver. Targets are frozen for the
duration of a chirp (stop-and-hop): a walker at 1 m/s moves about 49 um in a
49 us chirp, far below the 27 cm range cell.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import math
from pathlib import Path

import numpy as np

from twradar.constants import R_REF, dbm_to_watts
from twradar.errors import (InvalidConfigError, OutOfWindowError, TargetBeyondWindowError,
                            TraceFormatError)

MAGIC = b"TWRIF1"

# sampling bandwidth of the measurement receiver
DEFAULT_SAMPLE_RATE = 24.32e6
# ~1000 frames over a 30 s capture
DEFAULT_FRAME_INTERVAL = 0.03


@dataclass(frozen=True)
class ReceiverConfig:
    sample_rate: float = DEFAULT_SAMPLE_RATE
    samples_per_frame: int = 1190
    frame_interval: float = DEFAULT_FRAME_INTERVAL
    conversion_gain_db: float = 0.0
    if_bandwidth: float = 12.0e6
    adc_bits: int = None
    adc_full_scale: float = 1.0

    def __post_init__(self):
        if not self.sample_rate > 0:
            raise InvalidConfigError("sample rate must be positive")
        if not self.sample_rate > 2.0 * self.if_bandwidth:
            raise InvalidConfigError("sample rate must exceed twice the IF bandwidth")
        if self.samples_per_frame < 2:
            raise InvalidConfigError("need at least two samples per frame")
        if not self.frame_interval > 0:
            raise InvalidConfigError("frame interval must be positive")
        if self.adc_bits is not None and not 2 <= self.adc_bits <= 24:
            raise InvalidConfigError("ADC resolution must be 2..24 bits")

    @property
    def conversion_gain(self):
        """Linear voltage gain of the mixer chain."""
        return 10.0 ** (self.conversion_gain_db / 20.0)

    @property
    def frame_duration(self):
        return self.samples_per_frame / self.sample_rate


def samples_per_chirp(chirp, sample_rate):
    """Largest sample count whose sample instants ``n / fs`` all fall inside the chirp."""
    return int(math.floor(chirp.T * sample_rate * (1 + 1e-12))) + 1


def default_receiver(chirp, **overrides):
    """Receiver with one full chirp per frame; ``None`` overrides are ignored."""
    kw = {k: v for k, v in overrides.items() if v is not None}
    kw.setdefault("sample_rate", DEFAULT_SAMPLE_RATE)
    kw.setdefault("samples_per_frame", samples_per_chirp(chirp, kw["sample_rate"]))
    return ReceiverConfig(**kw)


@dataclass(frozen=True, eq=False)
class IfTrace:
    frames: np.ndarray
    t0_of_frame: np.ndarray
    config: ReceiverConfig
    chirp: object = None

    def __post_init__(self):
        frames = np.array(self.frames, dtype=float)
        if frames.ndim != 2:
            raise InvalidConfigError("frames must be a 2-D array")
        t0 = np.array(self.t0_of_frame, dtype=float)
        if t0.shape != (frames.shape[0],):
            raise InvalidConfigError("one start time per frame required")
        if np.any(np.diff(t0) <= 0):
            raise InvalidConfigError("frame start times must be strictly increasing")
        frames.flags.writeable = False
        t0.flags.writeable = False
        object.__setattr__(self, "frames", frames)
        object.__setattr__(self, "t0_of_frame", t0)

    @property
    def n_frames(self):
        return self.frames.shape[0]

    @property
    def samples_per_frame(self):
        return self.frames.shape[1]

    def samples(self):
        """All frames joined into one sample stream."""
        return self.frames.reshape(-1)

    def sample_times(self):
        """Absolute timestamp of every sample, same layout as :meth:`samples`."""
        n = np.arange(self.samples_per_frame) / self.config.sample_rate
        return (self.t0_of_frame[:, None] + n[None, :]).reshape(-1)


def if_tone(chirp, e, t):
    """Mixer output ``b cos(2 pi (s tau t + fc tau - s tau^2 / 2))`` for one echo."""
    if e.tau >= chirp.T:
        raise TargetBeyondWindowError(
            f"{e.path_label or 'echo'}: delay {e.tau:.6g} s not shorter than the chirp")
    t = np.asarray(t, dtype=float)
    tol = 1e-12 * chirp.T
    if np.any(t < e.tau - tol) or np.any(t > chirp.T + tol):
        raise OutOfWindowError("t must lie in the de-chirp overlap [tau, T]")
    out = _tone(chirp, e.tau, e.if_amplitude, t)
    return float(out) if out.ndim == 0 else out


def _tone(chirp, tau, b, t):
    s = chirp.s
    return b * np.cos(2.0 * np.pi * (s * tau * t + chirp.f_c * tau - 0.5 * s * tau * tau))


def noise_sigma(density_dbm_per_hz, sample_rate):
    """RMS noise voltage for a one-sided density spread over the Nyquist band."""
    p_w = dbm_to_watts(density_dbm_per_hz) * sample_rate / 2.0
    return float(np.sqrt(p_w * R_REF))


def quantize(x, bits, full_scale):
    step = 2.0 * full_scale / (2 ** bits)
    q = np.round(x / step) * step
    return np.clip(q, -full_scale, full_scale - step)


def _frame(scene, chirp, rx, t_local, k):
    t0 = k * rx.frame_interval
    x = np.zeros_like(t_local)
    g = rx.conversion_gain
    for e in scene.echoes(chirp, t0, conversion_gain=g):
        if e.tau >= chirp.T:
            raise TargetBeyondWindowError(
                f"reflector {e.path_label!r}: delay {e.tau:.6g} s at t={t0:.6g} s "
                f"exceeds the chirp duration {chirp.T:.6g} s")
        live = t_local >= e.tau
        x[live] += _tone(chirp, e.tau, e.if_amplitude, t_local[live])
    density = scene.noise.noise_density_dbm_per_hz
    if density is not None:
        rng = np.random.default_rng(scene.noise.seed + k)
        x += g * noise_sigma(density, rx.sample_rate) * rng.standard_normal(t_local.size)
    if rx.adc_bits:
        x = quantize(x, rx.adc_bits, rx.adc_full_scale)
    return x


def synthesize(scene, chirp, rx, n_frames, workers=1):
    """Sample ``n_frames`` de-chirped frames of ``scene``.

    Frame ``k`` starts at ``k * rx.frame_interval``; its noise comes from a
    generator seeded with ``seed + k``, so the output does not depend on
    ``workers``.
    """
    if n_frames < 1:
        raise InvalidConfigError("need at least one frame")
    t_local = np.arange(rx.samples_per_frame) / rx.sample_rate
    if t_local[-1] > chirp.T * (1 + 1e-12):
        raise InvalidConfigError("frame is longer than the chirp")
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda k: _frame(scene, chirp, rx, t_local, k), range(n_frames)))
    else:
        rows = [_frame(scene, chirp, rx, t_local, k) for k in range(n_frames)]
    frames = np.vstack(rows) if rows else np.zeros((0, rx.samples_per_frame))
    return IfTrace(frames, np.arange(n_frames) * rx.frame_interval, rx, chirp)


def write_raw_trace(trace, path):
    """Write ``TWRIF1 <frames> <samples> <sample_rate_hz>`` then float32 LE rows."""
    header = f"TWRIF1 {trace.n_frames} {trace.samples_per_frame} {trace.config.sample_rate:.17g}\n"
    data = np.ascontiguousarray(trace.frames, dtype="<f4")
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(data.tobytes())


def read_raw_trace(path, frame_interval=DEFAULT_FRAME_INTERVAL, chirp=None):
    """Load a ``TWRIF1`` file; frame start times are rebuilt from ``frame_interval``."""
    raw = Path(path).read_bytes()
    if not raw.startswith(MAGIC):
        raise TraceFormatError(f"{path}: bad magic at offset 0 (expected TWRIF1)")
    nl = raw.find(b"\n", 0, 256)
    if nl < 0:
        raise TraceFormatError(f"{path}: header line not terminated within 256 bytes (offset 0)")
    fields = raw[:nl].split(b" ")
    if len(fields) != 4:
        raise TraceFormatError(f"{path}: header at offset 0 needs 4 fields, got {len(fields)}")
    try:
        n_frames, n_samples, fs = int(fields[1]), int(fields[2]), float(fields[3])
    except ValueError:
        raise TraceFormatError(f"{path}: malformed header numbers at offset {len(MAGIC) + 1}") from None
    if n_frames < 1 or n_samples < 2 or not fs > 0:
        raise TraceFormatError(f"{path}: invalid header values at offset {len(MAGIC) + 1}")
    body = raw[nl + 1:]
    expected = n_frames * n_samples * 4
    if len(body) != expected:
        raise TraceFormatError(
            f"{path}: payload at offset {nl + 1} has {len(body)} bytes, expected {expected}")
    frames = np.frombuffer(body, dtype="<f4").astype(float).reshape(n_frames, n_samples)
    rx = ReceiverConfig(sample_rate=fs, samples_per_frame=n_samples, frame_interval=frame_interval,
                        if_bandwidth=min(12.0e6, 0.49 * fs))
    return IfTrace(frames, np.arange(n_frames) * frame_interval, rx, chirp)
