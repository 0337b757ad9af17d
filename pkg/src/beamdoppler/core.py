"""Angular geometry, motion state and Doppler support of a beamformed link.

All angles are radians. ``theta_v`` is the angle between the receiver's
velocity vector and the TX-RX line of sight; arrival angles are measured
from the line of sight, so the receive beam covers
``[-theta_rx / 2, +theta_rx / 2]``.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

from scipy.constants import c as SPEED_OF_LIGHT

TWO_PI = 2.0 * math.pi


class BeamdopplerWarning(UserWarning):
    """Inputs outside the regime the closed forms were derived for."""


def wrap_angle(theta: float) -> float:
    """Map an angle into ``[-pi, pi]`` (``+pi`` is kept as ``+pi``)."""
    if -math.pi <= theta <= math.pi:
        return float(theta)
    wrapped = math.remainder(theta, TWO_PI)
    if wrapped == -math.pi and theta > 0:
        return math.pi
    return wrapped


def max_doppler(speed: float, carrier: float) -> float:
    """Maximum Doppler shift ``speed / c * carrier`` in Hz.

    Parameters
    ----------
    speed : float
        Receiver speed in m/s, non-negative.
    carrier : float
        Carrier frequency in Hz, positive.
    """
    if not speed >= 0.0:
        raise ValueError(f"speed must be >= 0 m/s, got {speed!r}")
    if not carrier > 0.0:
        raise ValueError(f"carrier must be > 0 Hz, got {carrier!r}")
    return speed / SPEED_OF_LIGHT * carrier


@dataclass(frozen=True)
class BeamGeometry:
    """TX/RX half-power beam widths and the velocity angle."""

    theta_tx: float
    theta_rx: float
    theta_v: float

    def __post_init__(self):
        for name in ("theta_tx", "theta_rx"):
            value = getattr(self, name)
            if not 0.0 < value <= TWO_PI * (1 + 1e-15):
                raise ValueError(f"{name} must lie in (0, 2*pi], got {value!r}")
        object.__setattr__(self, "theta_v", wrap_angle(self.theta_v))

    @classmethod
    def from_degrees(cls, theta_v: float, theta_rx: float, theta_tx: float | None = None):
        theta_tx = theta_rx if theta_tx is None else theta_tx
        return cls(
            theta_tx=math.radians(theta_tx),
            theta_rx=math.radians(theta_rx),
            theta_v=math.radians(theta_v),
        )

    @property
    def full_circle(self) -> bool:
        return self.theta_rx >= TWO_PI


@dataclass(frozen=True)
class MotionState:
    """Receiver speed (m/s) and carrier (Hz); ``f_dmax`` is derived."""

    speed: float
    carrier: float
    f_dmax: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "f_dmax", max_doppler(self.speed, self.carrier))

    @classmethod
    def from_kmh(cls, speed_kmh: float, carrier: float) -> "MotionState":
        return cls(speed=kmh_to_mps(speed_kmh), carrier=carrier)


def kmh_to_mps(speed_kmh: float) -> float:
    return speed_kmh / 3.6


class AngularRegion(enum.Enum):
    I = 1
    II = 2
    III = 3


def classify_region(theta_v: float, theta_rx: float) -> AngularRegion:
    """Angular region of ``|theta_v|`` relative to the receive beam.

    Ties go to the lower region. When ``theta_rx >= pi`` region II is empty.
    """
    if not 0.0 < theta_rx <= TWO_PI * (1 + 1e-15):
        raise ValueError(f"theta_rx must lie in (0, 2*pi], got {theta_rx!r}")
    mag = abs(wrap_angle(theta_v))
    half = theta_rx / 2.0
    if mag <= half:
        return AngularRegion.I
    if mag <= math.pi - half:
        return AngularRegion.II
    return AngularRegion.III


@dataclass(frozen=True)
class DopplerSupport:
    region: AngularRegion
    f_lo: float
    f_hi: float

    @property
    def shift(self) -> float:
        return 0.5 * (self.f_lo + self.f_hi)

    @property
    def spread(self) -> float:
        return self.f_hi - self.f_lo


def support_bounds(region: AngularRegion, theta_v: float, theta_rx: float, f_dmax: float):
    """Per-region boundary formulas ``(f_lo, f_hi)``, no classification."""
    mag = abs(wrap_angle(theta_v))
    half = theta_rx / 2.0
    if region is AngularRegion.I:
        # for theta_rx >= pi the far beam edge can pass the antipode of theta_v
        return f_dmax * math.cos(min(half + mag, math.pi)), f_dmax
    if region is AngularRegion.II:
        return f_dmax * math.cos(half + mag), f_dmax * math.cos(half - mag)
    return -f_dmax, f_dmax * math.cos(half - mag)


def doppler_support(geom: BeamGeometry, motion: MotionState) -> DopplerSupport:
    """Interval on which the Doppler pdf of the single-window model is non-zero."""
    if geom.theta_rx >= math.pi:
        warnings.warn(
            "theta_rx >= pi: the single-window model targets narrow receive beams",
            BeamdopplerWarning,
            stacklevel=2,
        )
    region = classify_region(geom.theta_v, geom.theta_rx)
    f_lo, f_hi = support_bounds(region, geom.theta_v, geom.theta_rx, motion.f_dmax)
    return DopplerSupport(region, f_lo, f_hi)


def window_support(theta_v: float, lo: float, hi: float, f_dmax: float) -> tuple[float, float]:
    """Range of ``f_dmax * cos(theta - theta_v)`` for ``theta`` in ``[lo, hi]``.

    Works for arbitrary (asymmetric) arrival windows with ``hi - lo <= 2*pi``;
    used for angular clusters.
    """
    if hi < lo:
        raise ValueError("empty arrival window")
    if hi - lo >= TWO_PI:
        return -f_dmax, f_dmax

    def contains(angle: float) -> bool:
        # smallest k with angle + 2*pi*k >= lo
        k = math.ceil((lo - angle) / TWO_PI)
        return angle + k * TWO_PI <= hi

    ends = (math.cos(lo - theta_v), math.cos(hi - theta_v))
    top = 1.0 if contains(theta_v) else max(ends)
    bottom = -1.0 if contains(theta_v + math.pi) else min(ends)
    return f_dmax * bottom, f_dmax * top
