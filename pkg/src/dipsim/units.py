"""Unit conventions shared across the package.

All couplings, fields, drives and rates are stored as angular frequencies
in units of 2*pi*MHz (a value of 100 means 2*pi x 100 MHz).  Times are in
microseconds, so the phase accumulated by a coupling J over a time t is
2*pi * J * t.  Distances are in mm.  Circuit quantities use fF / nH, with
mode frequencies reported in 2*pi*GHz.
"""

import math

TWO_PI = 2.0 * math.pi

# 2*pi*kHz -> 2*pi*MHz (NoiseParams are configured in kHz like the
# decoherence rates quoted for transmons).
KHZ_TO_MHZ = 1.0e-3


def rad_per_us(value_2pi_mhz):
    """Convert a value in 2*pi*MHz to an angular frequency in rad/us."""
    return TWO_PI * value_2pi_mhz
