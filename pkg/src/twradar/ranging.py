"""Spectrogram peak picking and cable-compensated beat-to-range inversion."""

from dataclasses import dataclass, field
import csv
import io

import numpy as np

from twradar.constants import C
from twradar.errors import InvalidConfigError, InvalidParameterError, NoMoverDetected
from twradar.scene import effective_cable_length
from twradar.spectro import parabolic_offset

# fraction of rows a bin must be peaked in to count as a static ridge
STATIC_PERSISTENCE = 0.8


@dataclass(frozen=True)
class Peak:
    freq: float
    power_dbm: float
    bin: int


@dataclass(frozen=True)
class PeakList:
    rows: tuple  # one tuple of Peak per time row, strongest first
    times: np.ndarray
    freq_axis: np.ndarray
    threshold_dbm: float

    @property
    def bin_spacing(self):
        return float(np.min(np.diff(self.freq_axis)))


@dataclass(frozen=True)
class RangeEstimate:
    f_b: float
    d: float
    d0_used: float
    label: str = ""

    @property
    def flag(self):
        return "negative" if self.d < 0 else ""


def _masked(f, power, kept, leakage, margin_db):
    offsets, env = leakage
    for q in kept:
        if power <= q.power_dbm + np.interp(abs(f - q.freq), offsets, env) + margin_db:
            return True
    return False


def _row_peaks(p, freqs, threshold, min_sep, interpolate, leakage, margin_db):
    # left-biased comparison so the lowest sample of a plateau wins
    interior = np.flatnonzero((p[1:-1] > p[:-2]) & (p[1:-1] >= p[2:])) + 1
    interior = interior[p[interior] >= threshold]
    # strongest first, ties to the lower frequency
    order = interior[np.lexsort((interior, -p[interior]))]
    kept = []
    for k in order:
        f = float(freqs[k])
        if interpolate:
            f += parabolic_offset(p[k - 1], p[k], p[k + 1]) * (freqs[k + 1] - freqs[k])
        if any(abs(f - q.freq) < min_sep for q in kept):
            continue
        if leakage is not None and _masked(f, p[k], kept, leakage, margin_db):
            continue
        kept.append(Peak(f, float(p[k]), int(k)))
    return tuple(kept)


def extract_peaks(g, threshold_dbm, min_separation_hz, interpolate=True, leakage=None,
                  leakage_margin_db=6.0):
    """Per-row local maxima at or above ``threshold_dbm``, pruned to ``min_separation_hz``.

    ``leakage`` is an ``(offsets_hz, level_db)`` envelope such as
    :func:`twradar.spectro.leakage_envelope`; a peak no more than
    ``leakage_margin_db`` above the leakage of a stronger kept peak is dropped
    as a window sidelobe.
    """
    if min_separation_hz < g.freq_step * (1 - 1e-9):
        raise InvalidConfigError(
            f"min separation {min_separation_hz:g} Hz below the {g.freq_step:g} Hz bin spacing")
    p = g.power_dbm
    rows = tuple(_row_peaks(p[i], g.freq_axis, threshold_dbm, min_separation_hz, interpolate,
                            leakage, leakage_margin_db)
                 for i in range(p.shape[0]))
    return PeakList(rows, g.time_axis, g.freq_axis, float(threshold_dbm))


def auto_threshold(g, margin_db=15.0):
    """Median grid power plus a margin; the median tracks the noise floor."""
    return float(np.median(g.power_dbm)) + margin_db


def detection_threshold(g, margin_db=15.0, span_db=80.0):
    """Noise-tracking threshold, raised to ``span_db`` below the strongest cell.

    The cap only matters for noise-free grids, where the median sits at the
    numeric floor and the onset of each echo within the frame leaves a
    broadband residue far below the returns.
    """
    return max(auto_threshold(g, margin_db), float(np.max(g.power_dbm)) - span_db)


def beat_for_distance(d, s, cable):
    """Beat frequency of a target at ``d`` seen through ``cable``."""
    return s * (2.0 * d + effective_cable_length(cable)) / C


def distance_from_beat(f_b, s, cable, label=""):
    if not s > 0:
        raise InvalidParameterError("slope must be positive")
    d0 = effective_cable_length(cable)
    return RangeEstimate(f_b=f_b, d=0.5 * (C * f_b / s - d0), d0_used=d0, label=label)


def calibrate_d0(known_pairs, s):
    """Least-squares cable length from ``(f_b, d_true)`` pairs."""
    pairs = list(known_pairs)
    if not pairs:
        raise InvalidParameterError("need at least one (f_b, d) pair")
    if not s > 0:
        raise InvalidParameterError("slope must be positive")
    return float(np.mean([C * f / s - 2.0 * d for f, d in pairs]))


@dataclass(frozen=True)
class WalkerTrack:
    samples: tuple  # (t, d, f_b)
    f_b_max: float
    d_max: float
    t_max: float
    static_bins: tuple = field(default=())


def static_ridges(peaks, persistence=STATIC_PERSISTENCE):
    """Bins peaked (within one bin) in more than ``persistence`` of the rows."""
    n_rows = len(peaks.rows)
    n_bins = peaks.freq_axis.size
    hits = np.zeros(n_bins, dtype=int)
    for row in peaks.rows:
        mark = np.zeros(n_bins, dtype=bool)
        for q in row:
            mark[max(q.bin - 1, 0):q.bin + 2] = True
        hits += mark
    return tuple(int(b) for b in np.flatnonzero(hits > persistence * n_rows))


def track_walker(peaks, s, cable, persistence=STATIC_PERSISTENCE):
    """Follow the strongest non-static peak per row and report the farthest sample."""
    if not peaks.rows:
        raise InvalidParameterError("empty peak list")
    static = static_ridges(peaks, persistence)
    static_set = set(static)
    samples = []
    for t, row in zip(peaks.times, peaks.rows):
        for q in row:
            if not any(b in static_set for b in (q.bin - 1, q.bin, q.bin + 1)):
                est = distance_from_beat(q.freq, s, cable)
                samples.append((float(t), est.d, q.freq))
                break
    if not samples:
        raise NoMoverDetected("every peak belongs to a static ridge")
    t_max, d_max, f_max = max(samples, key=lambda x: (x[1], -x[0]))
    return WalkerTrack(tuple(samples), f_max, d_max, t_max, static)


def static_ranges(peaks, s, cable, persistence=STATIC_PERSISTENCE):
    """Range estimate for each static ridge, using the mean peak frequency along it."""
    out = []
    for i, b in enumerate(_ridge_centres(peaks, persistence), 1):
        fs = [q.freq for row in peaks.rows for q in row if abs(q.bin - b) <= 1]
        out.append(distance_from_beat(float(np.mean(fs)), s, cable, label=f"static ridge {i}"))
    return out


def _ridge_centres(peaks, persistence):
    """Collapse adjacent static bins to the most frequently peaked one."""
    static = static_ridges(peaks, persistence)
    counts = np.zeros(peaks.freq_axis.size, dtype=int)
    for row in peaks.rows:
        for q in row:
            counts[q.bin] += 1
    groups, cur = [], []
    for b in static:
        if cur and b != cur[-1] + 1:
            groups.append(cur)
            cur = []
        cur.append(b)
    if cur:
        groups.append(cur)
    return [max(grp, key=lambda b: (counts[b], -b)) for grp in groups]


def range_table_csv(estimates):
    """``label,f_b_mhz,d_m,flag`` report text."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["label", "f_b_mhz", "d_m", "flag"])
    for e in estimates:
        w.writerow([e.label, f"{e.f_b / 1e6:.4f}", f"{e.d:.3f}", e.flag])
    return buf.getvalue()
