"""Monte Carlo ground truth for the closed-form Doppler densities.

Arrival angles are drawn uniformly over the receive beam and mapped to
Doppler shifts. Sampling is split into fixed-size chunks; chunk ``k`` draws
from its own PCG64 stream seeded by ``SeedSequence(seed, spawn_key=(k,))``,
so output depends on ``(seed, n)`` only, never on the worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .core import BeamGeometry, MotionState, classify_region, support_bounds
from .spectrum import FLAT, GainPattern

CHUNK = 1 << 16
GL_ORDER = 24


@dataclass
class DopplerSamples:
    values: np.ndarray
    seed: int
    count: int
    f_dmax: float
    support: tuple[float, float]


@dataclass
class Histogram:
    """Density-normalized histogram; ``counts`` kept for merging."""

    edges: np.ndarray
    densities: np.ndarray
    counts: np.ndarray | None = None
    dropped: int = 0

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def masses(self) -> np.ndarray:
        return self.densities * self.widths

    def merge(self, other: "Histogram") -> "Histogram":
        if self.counts is None or other.counts is None:
            raise ValueError("only count-backed histograms can be merged")
        if not np.array_equal(self.edges, other.edges):
            raise ValueError("histograms have different edges")
        return _from_counts(self.edges, self.counts + other.counts, self.dropped + other.dropped)


def _from_counts(edges, counts, dropped=0) -> Histogram:
    counts = np.asarray(counts, dtype=np.int64)
    total = counts.sum()
    if total == 0:
        raise ValueError("no samples fell inside the histogram span")
    densities = counts / (total * np.diff(edges))
    return Histogram(np.asarray(edges, dtype=float), densities, counts, dropped)


def _chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def _draw_chunk(index: int, size: int, seed: int, half: float, gain: GainPattern, theta_rx: float) -> np.ndarray:
    rng = _chunk_rng(seed, index)
    if gain.kind == "flat":
        return rng.uniform(-half, half, size)
    # rejection against G(theta) / peak keeps the histogram an unweighted count
    kept = []
    have = 0
    while have < size:
        theta = rng.uniform(-half, half, size)
        accept = rng.uniform(0.0, 1.0, size) < gain(theta, theta_rx) / gain.peak
        theta = theta[accept]
        kept.append(theta)
        have += theta.size
    return np.concatenate(kept)[:size]


def sample_angles(
    geom: BeamGeometry,
    n: int,
    seed: int,
    gain: GainPattern = FLAT,
    workers: int = 1,
) -> np.ndarray:
    """Arrival angles uniform over the receive beam (optionally gain-thinned)."""
    if n < 1:
        raise ValueError(f"sample count must be >= 1, got {n}")
    half = min(geom.theta_rx, 2.0 * math.pi) / 2.0
    sizes = [min(CHUNK, n - start) for start in range(0, n, CHUNK)]
    jobs = [(k, size, seed, half, gain, geom.theta_rx) for k, size in enumerate(sizes)]
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda job: _draw_chunk(*job), jobs))
    else:
        parts = [_draw_chunk(*job) for job in jobs]
    return np.concatenate(parts)


def sample_doppler(
    geom: BeamGeometry,
    motion: MotionState,
    gain: GainPattern = FLAT,
    n: int = 1_000_000,
    seed: int = 0,
    workers: int = 1,
) -> DopplerSamples:
    """Draw ``n`` Doppler shifts ``f_dmax * cos(theta - theta_v)``."""
    theta = sample_angles(geom, n, seed, gain, workers)
    values = motion.f_dmax * np.cos(theta - geom.theta_v)
    region = classify_region(geom.theta_v, geom.theta_rx)
    support = support_bounds(region, geom.theta_v, geom.theta_rx, motion.f_dmax)
    return DopplerSamples(values, seed, n, motion.f_dmax, support)


def empirical_pdf(samples: DopplerSamples, bins: int = 200) -> Histogram:
    """Histogram with equal-width bins spanning the analytic support.

    A zero-width support (stationary receiver) gives a single 1 Hz wide bin
    centred on the common value.
    """
    if bins < 2:
        raise ValueError("need at least 2 bins")
    values = np.asarray(samples.values, dtype=float)
    if values.size == 0:
        raise ValueError("no samples")
    f_lo, f_hi = samples.support
    if f_hi - f_lo <= 0.0:
        centre = 0.5 * (f_lo + f_hi)
        edges = np.array([centre - 0.5, centre + 0.5])
        counts, dropped = _kernels.bin_counts(values, edges[0], edges[1], 1, 0.0)
        return _from_counts(edges, counts, dropped)
    edges = np.linspace(f_lo, f_hi, bins + 1)
    tol = 1e-9 * max(samples.f_dmax, abs(f_lo), abs(f_hi))
    counts, dropped = _kernels.bin_counts(values, f_lo, f_hi, bins, tol)
    return _from_counts(edges, counts, dropped)


def bin_means(
    func: Callable[[np.ndarray], np.ndarray],
    edges: np.ndarray,
    f_dmax: float,
    breakpoints: Sequence[float] | None = None,
    order: int = GL_ORDER,
) -> np.ndarray:
    """Mean of a density over each bin.

    Gauss-Legendre in ``u`` with ``f = f_dmax cos(u)`` (bounded integrand at
    the ``+/- f_dmax`` singularities); bins are split at ``breakpoints``.
    """
    edges = np.asarray(edges, dtype=float)
    nodes, weights = np.polynomial.legendre.leggauss(order)
    cuts = np.clip(edges / f_dmax, -1.0, 1.0)
    owner_lo, owner_hi, owner = [], [], []
    extra = np.clip(np.asarray(breakpoints or [], dtype=float) / f_dmax, -1.0, 1.0)
    for i in range(edges.size - 1):
        inner = extra[(extra > cuts[i]) & (extra < cuts[i + 1])]
        pts = np.concatenate(([cuts[i]], np.sort(inner), [cuts[i + 1]]))
        owner_lo.extend(pts[:-1])
        owner_hi.extend(pts[1:])
        owner.extend([i] * (pts.size - 1))
    x_lo = np.array(owner_lo)
    x_hi = np.array(owner_hi)
    u_a = np.arccos(x_hi)
    u_b = np.arccos(x_lo)
    half = 0.5 * (u_b - u_a)
    u = (u_a + u_b)[:, None] * 0.5 + half[:, None] * nodes[None, :]
    x = np.cos(u)
    jac = np.sin(np.arccos(x))
    vals = np.asarray(func(f_dmax * x), dtype=float)
    vals = np.where(np.isfinite(vals), vals, 0.0)
    integral = (vals * jac * weights[None, :]).sum(axis=1) * half * f_dmax
    per_bin = np.bincount(np.asarray(owner), weights=integral, minlength=edges.size - 1)
    return per_bin / np.diff(edges)


def analytic_histogram(func, edges, f_dmax: float, breakpoints=None) -> Histogram:
    """Histogram whose bin densities are the exact cell means of ``func``."""
    edges = np.asarray(edges, dtype=float)
    return Histogram(edges, bin_means(func, edges, f_dmax, breakpoints))


def l1_distance(hist: Histogram, analytic, f_dmax: float, breakpoints=None) -> float:
    """``sum_i |hist_i - mean(analytic over bin i)| * width_i``."""
    means = bin_means(analytic, hist.edges, f_dmax, breakpoints)
    return float(np.sum(np.abs(hist.densities - means) * hist.widths))
