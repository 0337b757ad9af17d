"""Doppler power spectra of beamformed millimeter-wave links."""

from ._kernels import BACKEND
from .core import (
    AngularRegion,
    BeamdopplerWarning,
    BeamGeometry,
    DopplerSupport,
    MotionState,
    classify_region,
    doppler_support,
    max_doppler,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "AngularRegion",
    "BeamdopplerWarning",
    "BeamGeometry",
    "DopplerSupport",
    "MotionState",
    "classify_region",
    "doppler_support",
    "max_doppler",
]
