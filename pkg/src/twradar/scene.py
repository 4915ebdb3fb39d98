"""One-dimensional propagation scenes: reflectors, walls, feed cables.

A scene is a range profile seen down the antenna boresight. Each reflector
contributes a single specular path whose delay includes the feed-cable
electrical length and whose amplitude follows the monostatic radar equation
with two-way wall losses.
"""

from dataclasses import dataclass, field
import math

from twradar.antenna import pattern_gain
from twradar.chirp import make_echo
from twradar.constants import C, dbm_to_amplitude
from twradar.errors import InvalidParameterError, SingularityError

STATIC = "static"
BACK_AND_FORTH = "back-and-forth"

CABLE_CONVENTIONS = ("sqrt-eps", "paper-eps", "fixed-d0")

# calibrated effective cable length of the measurement setup (m)
D0_CALIBRATED = 55.97

# one-way losses are literature-typical assumptions, not measured values
WALL_PRESETS = {
    "wooden-partition": dict(one_way_loss_db=3.0, thickness_m=0.04),
    "brick-40cm": dict(one_way_loss_db=13.0, thickness_m=0.40),
}

HUMAN_RCS = 0.5


@dataclass(frozen=True)
class Trajectory:
    kind: str = STATIC
    d_near: float = 0.0
    d_far: float = 0.0
    speed: float = 0.0
    start_at: str = "near"

    def __post_init__(self):
        if self.kind == STATIC:
            if self.d_near != self.d_far:
                raise InvalidParameterError("static trajectory needs d_near == d_far")
        elif self.kind == BACK_AND_FORTH:
            if not self.d_near < self.d_far:
                raise InvalidParameterError("back-and-forth needs d_near < d_far")
            if not self.speed > 0:
                raise InvalidParameterError("back-and-forth needs a positive speed")
        else:
            raise InvalidParameterError(f"unknown trajectory kind {self.kind!r}")
        if self.start_at not in ("near", "far"):
            raise InvalidParameterError("start_at must be 'near' or 'far'")
        if self.d_near < 0:
            raise InvalidParameterError("distances must be non-negative")

    @classmethod
    def fixed(cls, d):
        return cls(STATIC, d, d)

    @property
    def period(self):
        if self.kind == STATIC:
            return math.inf
        return 2.0 * (self.d_far - self.d_near) / self.speed


def position_at(traj, t):
    """Range (m) of a trajectory at time ``t``; back-and-forth is a triangle wave."""
    if t < 0:
        raise InvalidParameterError("time must be non-negative")
    if traj.kind == STATIC:
        return traj.d_near
    span = traj.d_far - traj.d_near
    u = math.fmod(t * traj.speed, 2.0 * span)
    leg = u if u <= span else 2.0 * span - u
    if traj.start_at == "near":
        return traj.d_near + leg
    return traj.d_far - leg


@dataclass(frozen=True)
class Reflector:
    label: str
    rcs_sqm: float
    trajectory: Trajectory
    walls_crossed: tuple = ()
    off_axis_rad: float = 0.0

    def __post_init__(self):
        if not self.rcs_sqm > 0:
            raise InvalidParameterError(f"{self.label}: RCS must be positive")


@dataclass(frozen=True)
class Wall:
    label: str
    one_way_loss_db: float
    thickness_m: float = 0.0

    def __post_init__(self):
        if self.one_way_loss_db < 0:
            raise InvalidParameterError(f"wall {self.label}: loss must be non-negative")


@dataclass(frozen=True)
class CableRun:
    l1: float = 0.0
    eps_r1: float = 1.0
    l2: float = 0.0
    eps_r2: float = 1.0
    convention: str = "fixed-d0"
    d0_override: float = D0_CALIBRATED

    def __post_init__(self):
        if self.l1 < 0 or self.l2 < 0:
            raise InvalidParameterError("cable lengths must be non-negative")
        if self.eps_r1 < 1 or self.eps_r2 < 1:
            raise InvalidParameterError("relative permittivity must be >= 1")
        if self.convention not in CABLE_CONVENTIONS:
            raise InvalidParameterError(f"unknown cable convention {self.convention!r}")


# the measurement feed: 40 m main coax plus 7.45 m of RF jumpers
MEASUREMENT_CABLE = CableRun(l1=40.0, eps_r1=2.1, l2=7.45, eps_r2=2.1,
                             convention="fixed-d0", d0_override=D0_CALIBRATED)
NO_CABLE = CableRun(convention="fixed-d0", d0_override=0.0)


@dataclass(frozen=True)
class NoiseSpec:
    # None disables noise entirely
    noise_density_dbm_per_hz: float = None
    seed: int = 0


def effective_cable_length(c):
    """Free-space-equivalent length ``d0`` (m) of the feed cables."""
    if c.convention == "sqrt-eps":
        return c.l1 * math.sqrt(c.eps_r1) + c.l2 * math.sqrt(c.eps_r2)
    if c.convention == "paper-eps":
        return c.l1 * c.eps_r1 + c.l2 * c.eps_r2
    return c.d0_override


def round_trip_delay(target_distance, c0):
    """Delay from transmitter to receiver for a target at ``target_distance``."""
    if target_distance < 0:
        raise InvalidParameterError("distance must be non-negative")
    return (2.0 * target_distance + effective_cable_length(c0)) / C


def wall_loss_db(r, walls):
    """Two-way loss of the walls that ``r`` sits behind."""
    crossed = set(r.walls_crossed)
    return 2.0 * sum(w.one_way_loss_db for w in walls if w.label in crossed)


def received_power(tx_dbm, tx_ant, rx_ant, f, r, d, walls=(), tx_gain_db=0.0):
    """Monostatic radar-equation echo power (dBm) from reflector ``r`` at range ``d``."""
    if d <= 0:
        raise SingularityError("radar equation undefined at zero range")
    lam = C / f
    theta = r.off_axis_rad
    spread = r.rcs_sqm * lam * lam / ((4.0 * math.pi) ** 3 * d ** 4)
    return (tx_dbm + tx_gain_db + pattern_gain(tx_ant, f, theta) + pattern_gain(rx_ant, f, theta)
            + 10.0 * math.log10(spread) - wall_loss_db(r, walls))


@dataclass(frozen=True)
class Scene:
    reflectors: tuple = ()
    walls: tuple = ()
    cable: CableRun = NO_CABLE
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    antenna: object = None
    tx_gain_db: float = 0.0

    def __post_init__(self):
        labels = {w.label for w in self.walls}
        for r in self.reflectors:
            missing = set(r.walls_crossed) - labels
            if missing:
                raise InvalidParameterError(f"{r.label}: unknown walls {sorted(missing)}")

    def union(self, other):
        return Scene(self.reflectors + other.reflectors,
                     self.walls + tuple(w for w in other.walls if w not in self.walls),
                     self.cable, self.noise, self.antenna, self.tx_gain_db)

    def echoes(self, chirp, t, conversion_gain=1.0):
        """Echo list with every reflector frozen at its position at time ``t``."""
        if self.antenna is None:
            raise InvalidParameterError("scene has no antenna model")
        f = chirp.f_center
        out = []
        for r in self.reflectors:
            d = position_at(r.trajectory, t)
            p = received_power(chirp.tx_power_dbm, self.antenna, self.antenna, f, r, d,
                               self.walls, self.tx_gain_db)
            out.append(make_echo(round_trip_delay(d, self.cable), float(dbm_to_amplitude(p)),
                                 conversion_gain, r.label))
        return out
