"""Parametric antenna models and antenna figure-of-merit / geometry calculators.

Only scalar antenna data is available (band gain, directivity, front-to-back
ratio), so patterns use a ``cos^n`` main lobe floored at the back-lobe level,
with ``n`` solved so the pattern's directivity matches the stated value.
"""

from dataclasses import dataclass, field
import csv
import math
from pathlib import Path
import warnings

import numpy as np
from scipy import integrate, optimize

from twradar.constants import C
from twradar.errors import InvalidModelError, InvalidParameterError, OutOfRangeError


class AntennaWarning(UserWarning):
    """Issued when a gain lookup is clamped or extrapolated."""


@dataclass(frozen=True)
class AntennaModel:
    name: str
    boresight_gain_table: tuple  # ((freq_hz, gain_dbi), ...)
    fbr_db: float
    directivity_dbi: float
    pattern_exponent: float
    notes: tuple = field(default=())

    @property
    def freqs(self):
        return np.array([f for f, _ in self.boresight_gain_table], dtype=float)

    @property
    def gains(self):
        return np.array([g for _, g in self.boresight_gain_table], dtype=float)

    @property
    def backlobe_floor(self):
        """Back-lobe level relative to boresight, linear power."""
        return 10.0 ** (-self.fbr_db / 10.0)


def _validate_table(table):
    if not table:
        raise InvalidModelError("gain table is empty")
    freqs = [float(f) for f, _ in table]
    if any(b <= a for a, b in zip(freqs, freqs[1:])):
        raise InvalidModelError("gain table frequencies must be strictly increasing")
    return tuple((float(f), float(g)) for f, g in table)


def _relative_pattern(theta, n, floor):
    """Normalised power pattern max(cos^n theta, floor); floor behind the antenna."""
    c = math.cos(theta)
    if c <= 0.0:
        return floor
    return max(c ** n, floor)


def pattern_directivity(n, fbr_db):
    """Directivity (dBi) of the floored cos^n pattern, integrated over the sphere."""
    floor = 10.0 ** (-fbr_db / 10.0)
    # split at the point where the main lobe meets the floor so quad sees a smooth integrand
    theta_f = math.acos(floor ** (1.0 / n)) if n > 0 else math.pi / 2
    f = lambda th: _relative_pattern(th, n, floor) * math.sin(th)
    total = 0.0
    for a, b in ((0.0, theta_f), (theta_f, math.pi / 2), (math.pi / 2, math.pi)):
        if b > a:
            total += integrate.quad(f, a, b, epsabs=1e-13, epsrel=1e-11)[0]
    return 10.0 * math.log10(2.0 / total)


def solve_pattern_exponent(directivity_dbi, fbr_db):
    """Exponent ``n`` whose floored cos^n pattern has the requested directivity."""
    if fbr_db <= 0:
        raise InvalidModelError("a directive pattern needs a positive front-to-back ratio")
    lo, hi = 1e-6, 1e4
    g = lambda n: pattern_directivity(n, fbr_db) - directivity_dbi
    if g(lo) > 0 or g(hi) < 0:
        raise InvalidModelError(
            f"directivity {directivity_dbi} dBi unreachable with FBR {fbr_db} dB")
    return optimize.brentq(g, lo, hi, xtol=1e-10, rtol=1e-12)


def make_antenna(name, table, fbr_db, directivity_dbi, notes=()):
    table = _validate_table(table)
    if fbr_db < 0:
        raise InvalidModelError("front-to-back ratio must be non-negative")
    n = solve_pattern_exponent(directivity_dbi, fbr_db) if fbr_db > 0 else 0.0
    return AntennaModel(name=name, boresight_gain_table=table, fbr_db=float(fbr_db),
                        directivity_dbi=float(directivity_dbi), pattern_exponent=n,
                        notes=tuple(notes))


def boresight_gain(model, f):
    """Interpolated table gain at ``f``; returns ``(gain_dbi, clamped)``."""
    if not model.boresight_gain_table:
        raise InvalidModelError("gain table is empty")
    freqs, gains = model.freqs, model.gains
    clamped = bool(f < freqs[0] or f > freqs[-1])
    return float(np.interp(f, freqs, gains)), clamped


def pattern_gain(model, f, theta):
    """Gain (dBi) at frequency ``f`` and angle ``theta`` off boresight."""
    if not 0.0 <= theta <= math.pi:
        raise OutOfRangeError(f"theta must lie in [0, pi], got {theta!r}")
    g0, clamped = boresight_gain(model, f)
    if clamped:
        warnings.warn(f"{model.name}: {f:.6g} Hz outside gain table, clamped", AntennaWarning,
                      stacklevel=2)
    if theta == 0.0 or model.fbr_db == 0.0:
        return g0
    c = math.cos(theta)
    if c <= 0.0:
        return g0 - model.fbr_db
    rel = 10.0 * model.pattern_exponent * math.log10(c)
    return g0 + max(rel, -model.fbr_db)


@dataclass(frozen=True)
class BandSummary:
    f_low: float
    f_high: float
    f_center: float
    gain_max_dbi: float

    def __post_init__(self):
        if self.f_center <= 0:
            raise InvalidParameterError("center frequency must be positive")
        if not self.f_low < self.f_center < self.f_high:
            raise InvalidParameterError("need f_low < f_center < f_high")


def figure_of_merit(b):
    """Linear peak gain times fractional bandwidth about the stated center."""
    if b.f_center <= 0:
        raise InvalidParameterError("center frequency must be positive")
    return 10.0 ** (b.gain_max_dbi / 10.0) * (b.f_high - b.f_low) / b.f_center


@dataclass(frozen=True)
class VivaldiGeometry:
    """Exponential taper parameters; lengths in mm, rates in 1/mm."""

    W: float = 150.0
    L: float = 185.0
    fw: float = 3.3
    W1: float = 40.0
    a1: float = 0.027
    a2: float = 0.16
    t_inner_range: tuple = (5.0, 148.0)
    t_outer_range: tuple = (5.0, 29.0)

    def __post_init__(self):
        for name in ("W", "L", "fw", "a1", "a2"):
            if not getattr(self, name) > 0:
                raise InvalidParameterError(f"{name} must be positive")


def _check_t(t, rng, which):
    if not rng[0] <= t <= rng[1]:
        raise OutOfRangeError(f"{which} edge parameter t={t!r} outside [{rng[0]}, {rng[1]}]")


def vivaldi_inner_edge(g, t):
    _check_t(t, g.t_inner_range, "inner")
    x = g.fw - 0.5 * g.fw * math.exp(g.a1 * (t - 5.0)) + g.W1 / 2.0
    return x, t


def vivaldi_outer_edge(g, t):
    _check_t(t, g.t_outer_range, "outer")
    x = -0.5 * g.fw * math.exp(g.a2 * (t - 5.0)) + g.W1 / 2.0
    return x, t


def aperture_cutoff(W_mm):
    """Lower cutoff frequency (Hz) for an aperture of width ``W_mm``."""
    if not W_mm > 0:
        raise InvalidParameterError(f"aperture width must be positive, got {W_mm!r}")
    return C / (2.0 * W_mm * 1e-3)


# simulated quasi-Yagi gain at 2.4 GHz versus number of directors
DIRECTOR_GAINS = ((0, 3.09), (2, 4.90), (6, 6.80), (12, 8.62))


def director_gain_preset(n_directors):
    """Gain (dBi) at 2.4 GHz for a director count, linear between known counts.

    Counts above 12 continue the last segment's slope and emit an
    :class:`AntennaWarning`.
    """
    if n_directors < 0:
        raise InvalidParameterError("director count must be non-negative")
    ns = [n for n, _ in DIRECTOR_GAINS]
    gs = [g for _, g in DIRECTOR_GAINS]
    if n_directors > ns[-1]:
        warnings.warn(f"{n_directors} directors extrapolated beyond {ns[-1]}", AntennaWarning,
                      stacklevel=2)
        slope = (gs[-1] - gs[-2]) / (ns[-1] - ns[-2])
        return gs[-1] + slope * (n_directors - ns[-1])
    return float(np.interp(n_directors, ns, gs))


def _presets():
    horn = make_antenna(
        "horn", ((2.0e9, 15.0), (2.7e9, 15.0)), fbr_db=30.0, directivity_dbi=15.0,
        notes=("front-to-back ratio of 30 dB is an assumption",))
    # 6.8-8.8 dBi bare, +1 dB with the two directors
    vivaldi = make_antenna(
        "vivaldi", ((2.05e9, 7.8), (2.6e9, 9.8)), fbr_db=14.44, directivity_dbi=10.44)
    # band edge gains plus the measured 8.7 dBi at 2.4 GHz
    quasi_yagi = make_antenna(
        "quasi-yagi", ((1.87e9, 7.8), (2.4e9, 8.7), (2.91e9, 9.8)), fbr_db=25.76,
        directivity_dbi=9.02)
    return {m.name: m for m in (horn, vivaldi, quasi_yagi)}


_PRESET_CACHE = {}


def antenna_presets():
    if not _PRESET_CACHE:
        _PRESET_CACHE.update(_presets())
    return dict(_PRESET_CACHE)


def antenna_from_csv(path, fbr_db=20.0, directivity_dbi=None, name=None):
    """Model from a ``freq_hz,gain_dbi`` CSV; directivity defaults to the peak table gain."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [h.strip() for h in reader.fieldnames] != ["freq_hz", "gain_dbi"]:
            raise InvalidModelError(f"{path}: header must be 'freq_hz,gain_dbi'")
        table = [(float(r["freq_hz"]), float(r["gain_dbi"])) for r in reader]
    table = _validate_table(table)
    if directivity_dbi is None:
        directivity_dbi = max(g for _, g in table)
    return make_antenna(name or path.stem, table, fbr_db, directivity_dbi,
                        notes=("user gain table; FBR and directivity assumed",))


def get_antenna(name_or_path):
    presets = antenna_presets()
    if name_or_path in presets:
        return presets[name_or_path]
    p = Path(name_or_path)
    if p.suffix.lower() == ".csv" and p.exists():
        return antenna_from_csv(p)
    raise InvalidModelError(
        f"unknown antenna {name_or_path!r}; choose from {sorted(presets)} or a CSV gain table")
