"""Unit helpers.

Everything internal is SI with angular frequencies (rad/s) and hbar = 1.
Configs and CLI surfaces speak GHz/MHz/ns; conversion happens once, at parse
time, through these helpers.
"""

import math

TWO_PI = 2.0 * math.pi

# vacuum speed of light, m/s
C_LIGHT = 299792458.0


def ghz(x: float) -> float:
    """Linear frequency in GHz to angular frequency in rad/s."""
    return TWO_PI * x * 1e9


def mhz(x: float) -> float:
    """Linear frequency in MHz to angular frequency in rad/s."""
    return TWO_PI * x * 1e6


def to_ghz(w: float) -> float:
    """Angular frequency in rad/s to linear frequency in GHz."""
    return w / (TWO_PI * 1e9)


def to_mhz(w: float) -> float:
    """Angular frequency in rad/s to linear frequency in MHz."""
    return w / (TWO_PI * 1e6)


def ns(x: float) -> float:
    return x * 1e-9
