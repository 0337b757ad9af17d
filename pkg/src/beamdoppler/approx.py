"""Small-beamwidth approximations of Doppler shift and spread.

Valid when ``theta_rx`` is a few degrees: ``cos(theta_rx/2) ~ 1`` and
``sin(theta_rx/2) ~ theta_rx/2``. Errors against the exact support are
``O(f_dmax * theta_rx**2)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .core import AngularRegion, BeamdopplerWarning, classify_region, wrap_angle

SMALL_BEAM_LIMIT = math.radians(20.0)


@dataclass(frozen=True)
class ApproxShiftSpread:
    region: AngularRegion
    shift: float
    spread: float


def approx_shift_spread(theta_v: float, theta_rx: float, f_dmax: float) -> ApproxShiftSpread:
    """Approximate central Doppler shift and Doppler spread (Hz)."""
    if not f_dmax >= 0.0:
        raise ValueError(f"f_dmax must be >= 0, got {f_dmax!r}")
    if theta_rx > SMALL_BEAM_LIMIT:
        warnings.warn(
            f"theta_rx = {math.degrees(theta_rx):.3g} deg is not a small beam; approximation error grows as theta_rx**2",
            BeamdopplerWarning,
            stacklevel=2,
        )
    region = classify_region(theta_v, theta_rx)
    mag = abs(wrap_angle(theta_v))
    if region is AngularRegion.I:
        shift = f_dmax * (1.0 - theta_rx * mag / 4.0)
        spread = f_dmax * theta_rx / 2.0 * mag
    elif region is AngularRegion.II:
        shift = f_dmax * math.cos(mag)
        spread = f_dmax * theta_rx * math.sin(mag)
    else:
        back = math.pi - mag
        shift = -f_dmax * (1.0 - theta_rx * back / 4.0)
        spread = f_dmax * theta_rx / 2.0 * back
    return ApproxShiftSpread(region, shift, spread)


def worst_case_spread(theta_rx: float, f_dmax: float) -> float:
    """Largest approximate spread over all velocity angles (abeam)."""
    return f_dmax * theta_rx
