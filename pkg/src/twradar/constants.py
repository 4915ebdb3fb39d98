"""Shared physical constants and unit conversions."""

import numpy as np

# Propagation speed used everywhere in the package (m/s).
C = 2.9979e8

# Reference load for all dBm <-> volt conversions (ohm).
R_REF = 50.0


def dbm_to_watts(p_dbm):
    return 10.0 ** ((np.asarray(p_dbm, dtype=float) - 30.0) / 10.0)


def watts_to_dbm(p_w):
    return 10.0 * np.log10(p_w) + 30.0


def dbm_to_amplitude(p_dbm):
    """Peak amplitude (V) of a sinusoid delivering ``p_dbm`` into ``R_REF``."""
    return np.sqrt(2.0 * R_REF * dbm_to_watts(p_dbm))


def amplitude_to_dbm(a):
    return watts_to_dbm(np.asarray(a, dtype=float) ** 2 / (2.0 * R_REF))
