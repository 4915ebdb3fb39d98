"""LFM up-chirp definition and the closed-form FMCW relations.

The transmitted chirp is ``a0 cos(2 pi (fc t + s t^2 / 2) + phi0)`` for
``0 <= t <= T``; after de-chirping an echo delayed by ``tau`` the mixer output
is a tone at the beat frequency ``s tau``.
"""

from dataclasses import dataclass, field
import numpy as np

from twradar.constants import C, dbm_to_amplitude
from twradar.errors import InvalidParameterError, OutOfWindowError

# relative slack when checking t against the chirp window
_WINDOW_EPS = 1e-12


@dataclass(frozen=True)
class ChirpParams:
    """Immutable LFM waveform description.

    Build instances with :func:`make_chirp`, which derives ``s``/``T`` and
    ``a_0`` consistently.
    """

    f_c: float
    B: float
    T: float
    s: float
    phi_0: float = 0.0
    tx_power_dbm: float = 0.0
    a_0: float = field(default=0.0)
    # time between chirp starts; back-to-back chirps when equal to T
    repetition_interval: float = 0.0

    def __post_init__(self):
        for name in ("f_c", "B", "T", "s"):
            if not getattr(self, name) > 0:
                raise InvalidParameterError(f"{name} must be positive, got {getattr(self, name)!r}")
        if abs(self.s - self.B / self.T) > 1e-9 * self.s:
            raise InvalidParameterError("slope must equal B/T")
        if self.repetition_interval and self.repetition_interval < self.T:
            raise InvalidParameterError("repetition interval shorter than the chirp")

    @property
    def f_stop(self):
        return self.f_c + self.B

    @property
    def f_center(self):
        return self.f_c + 0.5 * self.B


def make_chirp(f_c, B, T=None, phi_0=0.0, tx_power_dbm=0.0, *, s=None, repetition_interval=None):
    """Create a :class:`ChirpParams`, deriving whichever of ``T``/``s`` is missing."""
    for name, val in (("f_c", f_c), ("B", B)):
        if val is None or not val > 0:
            raise InvalidParameterError(f"{name} must be positive, got {val!r}")
    if T is None and s is None:
        raise InvalidParameterError("either T or s must be given")
    if T is not None and not T > 0:
        raise InvalidParameterError(f"T must be positive, got {T!r}")
    if s is not None and not s > 0:
        raise InvalidParameterError(f"s must be positive, got {s!r}")
    if T is None:
        T = B / s
    elif s is not None and abs(s - B / T) > 1e-9 * s:
        raise InvalidParameterError("inconsistent T and s: s must equal B/T")
    s = B / T
    a_0 = float(dbm_to_amplitude(tx_power_dbm))
    rep = T if repetition_interval is None else repetition_interval
    return ChirpParams(f_c=float(f_c), B=float(B), T=float(T), s=float(s), phi_0=float(phi_0),
                       tx_power_dbm=float(tx_power_dbm), a_0=a_0, repetition_interval=float(rep))


# Radar-on-chip presets. "operational" is the sweep used in the measurements
# (2.052-2.6 GHz at 11.2 MHz/us); "nominal" is the 2.05-2.6 GHz design band.
RADAR_PRESETS = {
    "roc-operational": dict(f_c=2.052e9, B=548e6, s=11.2e12),
    "roc-nominal": dict(f_c=2.05e9, B=550e6, s=11.2e12),
}


def radar_preset(name, **overrides):
    """Chirp for a named preset; keyword overrides take precedence.

    An explicit ``T`` override replaces the preset slope, so the slope is then
    re-derived as ``B / T``.
    """
    try:
        kw = dict(RADAR_PRESETS[name])
    except KeyError:
        raise InvalidParameterError(
            f"unknown radar preset {name!r}; choose from {sorted(RADAR_PRESETS)}") from None
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if "T" in overrides and "s" not in overrides:
        kw.pop("s", None)
    kw.update(overrides)
    return make_chirp(**kw)


def _check_window(params, t):
    t = np.asarray(t, dtype=float)
    tol = _WINDOW_EPS * params.T
    if np.any(t < -tol) or np.any(t > params.T + tol):
        raise OutOfWindowError(f"t must lie in [0, T={params.T:.6g}] s")
    return t


def tx_waveform(params, t):
    """Transmit voltage at time(s) ``t`` within one chirp."""
    t = _check_window(params, t)
    phase = 2.0 * np.pi * (params.f_c * t + 0.5 * params.s * t * t) + params.phi_0
    out = params.a_0 * np.cos(phase)
    return float(out) if out.ndim == 0 else out


def instantaneous_frequency(params, t):
    t = _check_window(params, t)
    out = params.f_c + params.s * t
    return float(out) if out.ndim == 0 else out


def beat_frequency(s, tau):
    """Beat frequency ``s * tau`` of an echo delayed by ``tau``."""
    if tau < 0:
        raise InvalidParameterError(f"delay must be non-negative, got {tau!r}")
    return s * tau


def range_resolution(B):
    if not B > 0:
        raise InvalidParameterError(f"bandwidth must be positive, got {B!r}")
    return C / (2.0 * B)


def delay_for_distance(d):
    """Round-trip free-space delay for a one-way distance ``d``."""
    return 2.0 * d / C


def resolvable(params, f1, f2, window=None):
    """Whether two beat tones are separated by at least one frequency cell."""
    window = params.T if window is None else window
    return abs(f2 - f1) >= (1.0 - 1e-9) / window


@dataclass(frozen=True)
class EchoContribution:
    """One propagation path as seen by the receiver.

    ``amplitude`` is the received echo amplitude; ``if_amplitude`` is what the
    mixer delivers after its conversion gain.
    """

    tau: float
    amplitude: float
    if_amplitude: float
    path_label: str = ""

    def __post_init__(self):
        if self.tau < 0:
            raise InvalidParameterError("echo delay must be non-negative")
        if self.amplitude < 0:
            raise InvalidParameterError("echo amplitude must be non-negative")


def make_echo(tau, amplitude, conversion_gain=1.0, path_label=""):
    return EchoContribution(tau=tau, amplitude=amplitude,
                            if_amplitude=conversion_gain * amplitude, path_label=path_label)
