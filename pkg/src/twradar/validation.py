"""Checks of the model arithmetic against the published antenna and ranging tables."""

import csv
from dataclasses import dataclass
from importlib import resources

import numpy as np

from twradar.antenna import BandSummary, aperture_cutoff, figure_of_merit
from twradar.chirp import range_resolution
from twradar.ranging import calibrate_d0, distance_from_beat
from twradar.scene import D0_CALIBRATED, CableRun

SLOPE = 11.2e12
CABLE = CableRun(convention="fixed-d0", d0_override=D0_CALIBRATED)

PROPOSED_FOM_TOL = 0.005
CITED_FOM_TOL = 0.05
CITED_FOM_MIN_MATCHES = 8
MEDIAN_RANGE_ERR = 1.0
MAX_RANGE_ERR = 1.5


@dataclass(frozen=True)
class FomRow:
    source: str
    label: str
    f_low: float
    f_high: float
    f_center: float
    gain_low: float
    gain_high: float
    printed: float
    proposed: bool

    def band(self, gain):
        return BandSummary(self.f_low * 1e9, self.f_high * 1e9, self.f_center * 1e9, gain)


@dataclass(frozen=True)
class RangeRow:
    source: str
    label: str
    f_b_mhz: float
    d_m: float
    excluded: bool


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


def load_tables():
    text = resources.files("twradar").joinpath("data/published_tables.csv").read_text()
    foms, ranges = [], []
    for rec in csv.reader(line for line in text.splitlines() if line and not line.startswith("#")):
        if rec[0] == "fom":
            vals = [float(v) for v in rec[3:9]]
            foms.append(FomRow(rec[1], rec[2], *vals, rec[9] == "1"))
        elif rec[0] == "range":
            ranges.append(RangeRow(rec[1], rec[2], float(rec[3]), float(rec[4]), rec[5] == "excluded"))
    return foms, ranges


def fom_from_max_gain(row):
    return figure_of_merit(row.band(row.gain_high))


def range_errors(rows):
    """(row, estimate, error) for every non-excluded ranging row."""
    out = []
    for r in rows:
        if r.excluded:
            continue
        est = distance_from_beat(r.f_b_mhz * 1e6, SLOPE, CABLE, label=f"{r.source}: {r.label}")
        out.append((r, est, est.d - r.d_m))
    return out


def run_checks():
    foms, ranges = load_tables()
    checks = []

    proposed = [r for r in foms if r.proposed]
    worst = max(abs(fom_from_max_gain(r) - r.printed) for r in proposed)
    checks.append(Check(
        "figure of merit, proposed designs",
        worst <= PROPOSED_FOM_TOL,
        ", ".join(f"{r.label} {fom_from_max_gain(r):.3f} (printed {r.printed})" for r in proposed)
        + f"; worst error {worst:.4f}"))

    cited = [r for r in foms if not r.proposed]
    hits = [r for r in cited if abs(fom_from_max_gain(r) - r.printed) <= CITED_FOM_TOL]
    low_hits = [r for r in cited
                if abs(figure_of_merit(r.band(r.gain_low)) - r.printed) <= CITED_FOM_TOL]
    checks.append(Check(
        "figure of merit, cited designs (max gain)",
        len(hits) >= CITED_FOM_MIN_MATCHES,
        f"{len(hits)}/{len(cited)} within {CITED_FOM_TOL} using max gain "
        f"(need {CITED_FOM_MIN_MATCHES}); lower end of the gain range matches {len(low_hits)}"))

    errs = range_errors(ranges)
    abs_err = np.abs([e for _, _, e in errs])
    med, mx = float(np.median(abs_err)), float(np.max(abs_err))
    checks.append(Check(
        "beat-to-range inversion vs published distances",
        med <= MEDIAN_RANGE_ERR and mx <= MAX_RANGE_ERR,
        f"{len(errs)} rows, median |error| {med:.3f} m, max {mx:.3f} m "
        f"(limits {MEDIAN_RANGE_ERR}/{MAX_RANGE_ERR} m)"))
    for r in ranges:
        if r.excluded:
            d = distance_from_beat(r.f_b_mhz * 1e6, SLOPE, CABLE).d
            checks.append(Check(f"{r.source}: {r.label}", True,
                                f"excluded (inconsistent): {r.f_b_mhz} MHz maps to {d:.2f} m, "
                                f"printed {r.d_m} m"))

    dr = range_resolution(550e6)
    checks.append(Check("range resolution at 550 MHz", abs(dr - 0.2725) <= 1e-4, f"{dr:.5f} m"))

    fc = aperture_cutoff(150.0)
    checks.append(Check("Vivaldi aperture cutoff, W = 150 mm", 0.99e9 <= fc <= 1.01e9,
                        f"{fc / 1e9:.4f} GHz"))

    static = [(r.f_b_mhz * 1e6, r.d_m) for r in ranges if r.source == "env-a" and "static" in r.label]
    d0 = calibrate_d0(static, SLOPE)
    checks.append(Check("cable length recalibrated from corridor wall rows",
                        abs(d0 - D0_CALIBRATED) <= 0.25, f"{d0:.3f} m vs {D0_CALIBRATED} m"))
    return checks


def format_report(checks):
    lines = [f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.detail}" for c in checks]
    n_fail = sum(not c.passed for c in checks)
    lines.append(f"{len(checks) - n_fail}/{len(checks)} checks passed")
    return "\n".join(lines)
