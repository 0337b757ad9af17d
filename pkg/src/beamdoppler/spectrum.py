"""Doppler probability densities and power spectra.

Densities are vectorized over ``f_d``. Two evaluation modes exist:

``Mode.EXACT``
    sums the Jacobian of every pre-image ``theta_v +/- arccos(f_d / f_dmax)``
    lying in the receive window, so the result integrates to one.
``Mode.PAPER``
    the single-term form: a rect over the Doppler support times
    ``1 / (theta_rx * f_dmax * sqrt(1 - (f_d / f_dmax)**2))``. It matches
    EXACT wherever only one pre-image is in the window (all of region II)
    and carries half the density where both are.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from . import _kernels
from .core import (
    TWO_PI,
    BeamdopplerWarning,
    BeamGeometry,
    DopplerSupport,
    MotionState,
    classify_region,
    support_bounds,
    wrap_angle,
)

Density = Callable[[np.ndarray], np.ndarray]


class Mode(enum.Enum):
    EXACT = "exact"
    PAPER = "paper"


class IntegrationError(ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual estimate {residual:.3g})")
        self.residual = residual


@dataclass(frozen=True)
class ArrivalWindow:
    """Uniform arrival-angle window ``[center - width/2, center + width/2]``."""

    center: float
    width: float

    def __post_init__(self):
        if not self.width > 0.0:
            raise ValueError(f"window width must be > 0, got {self.width!r}")

    @property
    def lo(self) -> float:
        return self.center - self.width / 2.0

    @property
    def hi(self) -> float:
        return self.center + self.width / 2.0

    def density(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        inside = (theta >= self.lo) & (theta <= self.hi)
        return np.where(inside, 1.0 / self.width, 0.0)


@dataclass(frozen=True)
class GainPattern:
    """Receive antenna gain versus arrival angle (relative to boresight).

    ``flat`` is ``peak`` everywhere inside the receive window. ``parametric``
    is ``peak * exp(-4 ln2 (theta / hpbw)**2)``, which is exactly ``peak / 2``
    at ``theta = +/- hpbw / 2``. A parametric pattern with ``hpbw=None`` takes
    the receive beam width of the geometry it is evaluated with.
    """

    kind: str = "flat"
    hpbw: float | None = None
    peak: float = 1.0

    def __post_init__(self):
        if self.kind not in ("flat", "parametric"):
            raise ValueError(f"unknown gain kind {self.kind!r}")
        if not self.peak > 0.0:
            raise ValueError("gain peak must be > 0")
        if self.hpbw is not None and not self.hpbw > 0.0:
            raise ValueError("hpbw must be > 0")

    @classmethod
    def flat(cls, peak: float = 1.0) -> "GainPattern":
        return cls("flat", None, peak)

    @classmethod
    def parametric(cls, hpbw: float | None = None, peak: float = 1.0) -> "GainPattern":
        return cls("parametric", hpbw, peak)

    def resolve(self, theta_rx: float) -> tuple[int, float, float]:
        """Kernel arguments ``(kind_code, hpbw, peak)``."""
        if self.kind == "flat":
            return 0, 1.0, self.peak
        return 1, self.hpbw if self.hpbw is not None else theta_rx, self.peak

    def __call__(self, theta, theta_rx: float) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        code, hpbw, peak = self.resolve(theta_rx)
        if code == 0:
            return np.full(theta.shape, peak)
        return peak * np.exp(-4.0 * math.log(2.0) * (theta / hpbw) ** 2)


FLAT = GainPattern.flat()


@dataclass(frozen=True)
class Cluster:
    center: float
    width: float
    power: float = 1.0

    def __post_init__(self):
        if not self.width > 0.0:
            raise ValueError(f"cluster width must be > 0, got {self.width!r}")
        if not self.power >= 0.0:
            raise ValueError(f"cluster power must be >= 0, got {self.power!r}")


@dataclass(frozen=True)
class ClusterSet:
    """Angular clusters; powers are normalized to sum to one."""

    clusters: tuple[Cluster, ...]
    weights: tuple[float, ...] = field(init=False)

    def __init__(self, clusters: Sequence[Cluster]):
        clusters = tuple(clusters)
        if not clusters:
            raise ValueError("a cluster set needs at least one cluster")
        total = sum(c.power for c in clusters)
        if not total > 0.0:
            raise ValueError("cluster powers sum to zero")
        object.__setattr__(self, "clusters", clusters)
        object.__setattr__(self, "weights", tuple(c.power / total for c in clusters))

    def __len__(self):
        return len(self.clusters)

    def __iter__(self):
        return iter(zip(self.clusters, self.weights))


@dataclass
class SpectrumSamples:
    freqs: np.ndarray
    values: np.ndarray
    f_dmax: float
    mode: str
    total_power: float | None = None

    def __post_init__(self):
        self.freqs = np.asarray(self.freqs, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.freqs.shape != self.values.shape:
            raise ValueError("freqs and values differ in length")
        if self.freqs.size > 1 and not np.all(np.diff(self.freqs) > 0):
            raise ValueError("freqs must be strictly increasing")


def _check_fdmax(f_dmax: float):
    if not f_dmax > 0.0:
        raise ValueError(f"f_dmax must be > 0 Hz, got {f_dmax!r}")


def _capped(values: np.ndarray, cap: float) -> np.ndarray:
    if not math.isinf(cap):
        values = np.where(np.isinf(values), cap, values)
    return values


def _scalar_or_array(f_d, values):
    return float(values) if np.ndim(f_d) == 0 else values


def jakes_psd(f_d, f_dmax: float, cap: float = math.inf):
    """Classic U-shaped Jakes spectrum, normalized to unit area."""
    _check_fdmax(f_dmax)
    f = np.asarray(f_d, dtype=float)
    x = f / f_dmax
    with np.errstate(divide="ignore"):
        root = np.sqrt(np.clip((1.0 - x) * (1.0 + x), 0.0, None))
        val = np.where(np.abs(x) < 1.0, 1.0 / (math.pi * f_dmax * root), 0.0)
    val = np.where(np.abs(x) == 1.0, np.inf, val)
    return _scalar_or_array(f_d, _capped(val, cap))


def window_psd(
    f_d,
    theta_v: float,
    lo: float,
    hi: float,
    f_dmax: float,
    gain: GainPattern = FLAT,
    theta_rx: float | None = None,
    cap: float = math.inf,
):
    """Exact gain-weighted Doppler density for a uniform window ``[lo, hi]``.

    ``theta_rx`` only sets the default hpbw of a parametric gain.
    """
    _check_fdmax(f_dmax)
    width = hi - lo
    code, hpbw, peak = gain.resolve(width if theta_rx is None else theta_rx)
    x = np.asarray(f_d, dtype=float) / f_dmax
    raw = _kernels.branch_density(x, theta_v, lo, hi, True, -1.0, 1.0, code, hpbw, peak)
    val = raw / (min(width, TWO_PI) * f_dmax)
    return _scalar_or_array(f_d, _capped(val, cap))


def doppler_psd(
    f_d,
    geom: BeamGeometry,
    motion: MotionState,
    gain: GainPattern = FLAT,
    mode: Mode = Mode.EXACT,
    cap: float = math.inf,
):
    """Doppler power spectrum: pdf of the shift weighted by the RX gain.

    Unnormalized for non-flat gain; with flat unit gain it is the pdf.
    """
    mode = Mode(mode)
    f_dmax = motion.f_dmax
    _check_fdmax(f_dmax)
    half = geom.theta_rx / 2.0
    if mode is Mode.EXACT:
        return window_psd(f_d, geom.theta_v, -half, half, f_dmax, gain, geom.theta_rx, cap)
    region = classify_region(geom.theta_v, geom.theta_rx)
    f_lo, f_hi = support_bounds(region, geom.theta_v, geom.theta_rx, f_dmax)
    code, hpbw, peak = gain.resolve(geom.theta_rx)
    x = np.asarray(f_d, dtype=float) / f_dmax
    raw = _kernels.branch_density(
        x, geom.theta_v, -half, half, False, f_lo / f_dmax, f_hi / f_dmax, code, hpbw, peak
    )
    val = raw / (geom.theta_rx * f_dmax)
    return _scalar_or_array(f_d, _capped(val, cap))


def doppler_pdf(f_d, geom: BeamGeometry, motion: MotionState, mode: Mode = Mode.EXACT, cap: float = math.inf):
    """Probability density of the Doppler shift (flat unit gain)."""
    return doppler_psd(f_d, geom, motion, FLAT, mode, cap)


def pdf_breakpoints(geom: BeamGeometry, motion: MotionState) -> list[float]:
    """Frequencies where the density has jumps or singularities."""
    f_dmax = motion.f_dmax
    half = geom.theta_rx / 2.0
    points = {-f_dmax, f_dmax}
    if not geom.full_circle:
        for edge in (-half, half):
            points.add(f_dmax * math.cos(edge - geom.theta_v))
    return sorted(points)


def _cluster_window(cluster: Cluster, theta_rx: float) -> tuple[float, float] | None:
    center = wrap_angle(cluster.center)
    lo, hi = center - cluster.width / 2.0, center + cluster.width / 2.0
    if theta_rx < TWO_PI:
        lo, hi = max(lo, -theta_rx / 2.0), min(hi, theta_rx / 2.0)
    else:
        lo, hi = max(lo, -math.pi), min(hi, math.pi)
    if hi <= lo:
        return None
    return lo, hi


def cluster_segments(clusters: ClusterSet, geom: BeamGeometry, motion: MotionState) -> list[DopplerSupport | None]:
    """Doppler segment of each cluster, ``None`` if it misses the beam.

    Each intersected window is rotated onto its own center, where the
    symmetric-window region formulas apply unchanged.
    """
    out = []
    for cluster, _ in clusters:
        window = _cluster_window(cluster, geom.theta_rx)
        if window is None:
            out.append(None)
            continue
        lo, hi = window
        width = hi - lo
        rel_v = wrap_angle(geom.theta_v - 0.5 * (lo + hi))
        region = classify_region(rel_v, width)
        f_lo, f_hi = support_bounds(region, rel_v, width, motion.f_dmax)
        out.append(DopplerSupport(region, f_lo, f_hi))
    return out


def multicluster_psd(
    f_d,
    clusters: ClusterSet,
    geom: BeamGeometry,
    motion: MotionState,
    gain: GainPattern = FLAT,
    cap: float = math.inf,
):
    """Power-weighted sum of per-cluster spectra.

    Each cluster is uniform over its intersection with the receive beam.
    Clusters outside the beam contribute nothing.
    """
    if len(clusters) == 0:
        raise ValueError("at least one cluster is required")
    f_dmax = motion.f_dmax
    _check_fdmax(f_dmax)
    total = np.zeros(np.shape(f_d))
    for index, (cluster, weight) in enumerate(clusters):
        window = _cluster_window(cluster, geom.theta_rx)
        if window is None:
            warnings.warn(f"cluster {index} does not intersect the receive beam", BeamdopplerWarning, stacklevel=2)
            continue
        if weight == 0.0:
            continue
        lo, hi = window
        part = window_psd(f_d, geom.theta_v, lo, hi, f_dmax, gain, geom.theta_rx)
        total = total + weight * np.asarray(part)
    return _scalar_or_array(f_d, _capped(total, cap))


def multicluster_breakpoints(clusters: ClusterSet, geom: BeamGeometry, motion: MotionState) -> list[float]:
    f_dmax = motion.f_dmax
    points = {-f_dmax, f_dmax}
    for cluster, _ in clusters:
        window = _cluster_window(cluster, geom.theta_rx)
        if window is None:
            continue
        for edge in window:
            points.add(f_dmax * math.cos(edge - geom.theta_v))
    return sorted(points)


def integrate_psd(
    func: Density,
    f_lo: float,
    f_hi: float,
    f_dmax: float,
    points: Sequence[float] | None = None,
    tol: float = 1e-9,
    weight: Callable[[float], float] | None = None,
) -> float:
    """Integrate a density over ``[f_lo, f_hi]`` with adaptive quadrature.

    Works in ``u`` with ``f = f_dmax * cos(u)``: the inverse square-root
    singularities at ``+/- f_dmax`` cancel against ``df = f_dmax sin(u) du``
    and the integrand stays bounded. ``points`` are known discontinuities
    (in Hz) and ``weight(f)`` multiplies the density (used for moments).
    """
    _check_fdmax(f_dmax)
    if f_hi < f_lo:
        raise ValueError("f_lo must not exceed f_hi")
    f_lo = max(f_lo, -f_dmax)
    f_hi = min(f_hi, f_dmax)
    if f_hi <= f_lo:
        return 0.0
    u_a = math.acos(min(1.0, f_hi / f_dmax))
    u_b = math.acos(max(-1.0, f_lo / f_dmax))

    def integrand(u):
        x = math.cos(u)
        # re-derive u from the rounded cosine so sin(u) matches the
        # density's sqrt(1 - x**2) near the ends
        s = math.sin(math.acos(x))
        if s == 0.0:
            return 0.0
        f = f_dmax * x
        density = float(func(f))
        if math.isinf(density):
            # cos(u) rounded to +/-1 for u within ~1e-8 of an end
            return 0.0
        value = density * f_dmax * s
        if weight is not None:
            value *= weight(f)
        return value

    cuts = [u_a, u_b]
    if points:
        for p in points:
            u = math.acos(max(-1.0, min(1.0, p / f_dmax)))
            if u_a < u < u_b:
                cuts.append(u)
    cuts.sort()

    value = 0.0
    residual = 0.0
    failed = False
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for a, b in zip(cuts[:-1], cuts[1:]):
            if b <= a:
                continue
            part, abserr, info, *rest = integrate.quad(
                integrand, a, b, epsabs=tol / len(cuts), epsrel=1e-12, limit=500, full_output=1
            )
            value += part
            residual += abserr
            failed = failed or bool(rest)
    if failed and residual > tol:
        raise IntegrationError(f"quadrature over [{f_lo:g}, {f_hi:g}] Hz did not converge", residual)
    return value


def spectrum_moments(
    func: Density,
    f_dmax: float,
    f_lo: float | None = None,
    f_hi: float | None = None,
    points: Sequence[float] | None = None,
) -> tuple[float, float]:
    """Mean Doppler shift and RMS Doppler spread of a spectrum."""
    f_lo = -f_dmax if f_lo is None else f_lo
    f_hi = f_dmax if f_hi is None else f_hi
    mass = integrate_psd(func, f_lo, f_hi, f_dmax, points)
    if not mass > 0.0:
        raise ValueError("spectrum has zero total mass")
    first = integrate_psd(func, f_lo, f_hi, f_dmax, points, weight=lambda f: f)
    mean = first / mass
    second = integrate_psd(func, f_lo, f_hi, f_dmax, points, weight=lambda f: (f - mean) ** 2)
    return mean, math.sqrt(max(second / mass, 0.0))


def tabulate(func: Density, freqs, f_dmax: float, mode: str, total_power: float | None = None) -> SpectrumSamples:
    freqs = np.asarray(freqs, dtype=float)
    values = np.asarray(func(freqs), dtype=float)
    values = np.where(np.abs(freqs) > f_dmax, 0.0, values)
    return SpectrumSamples(freqs, values, f_dmax, mode, total_power)
