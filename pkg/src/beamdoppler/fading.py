"""Sum-of-sinusoids channel realizations with a beamformed Doppler spectrum.

Each path arrives at an angle drawn like the Monte Carlo oracle draws it,
carries a uniform random phase and is weighted by the receive gain, so the
realization's power spectrum follows the gain-weighted Doppler density.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import signal

from . import _kernels
from .core import BeamdopplerWarning, BeamGeometry, MotionState, classify_region, support_bounds
from .oracle import sample_angles
from .spectrum import FLAT, GainPattern, SpectrumSamples

PHASE_STREAM = 1 << 31
COHERENCE_THRESHOLD = 0.5


@dataclass
class FadingRealization:
    samples: np.ndarray
    sample_rate: float
    seed: int
    n_paths: int
    f_dmax: float = 0.0

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.samples.size) / self.sample_rate

    @property
    def mean_power(self) -> float:
        return float(np.mean(np.abs(self.samples) ** 2))


def path_parameters(geom: BeamGeometry, motion: MotionState, gain: GainPattern, n_paths: int, seed: int):
    """Per-path Doppler frequencies and complex amplitudes (unit total power)."""
    theta = sample_angles(geom, n_paths, seed)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(PHASE_STREAM,))))
    phase = rng.uniform(0.0, 2.0 * math.pi, n_paths)
    g = gain(theta, geom.theta_rx)
    power = g / g.mean() / n_paths
    freqs = motion.f_dmax * np.cos(theta - geom.theta_v)
    return freqs, np.sqrt(power) * np.exp(1j * phase)


def generate_fading(
    geom: BeamGeometry,
    motion: MotionState,
    gain: GainPattern = FLAT,
    n_paths: int = 256,
    duration: float = 1.0,
    sample_rate: float | None = None,
    seed: int = 0,
) -> FadingRealization:
    """Synthesize ``h(t)`` at ``sample_rate`` for ``duration`` seconds.

    ``sample_rate`` defaults to ``4 * f_dmax`` (or 1 kHz when stationary).
    """
    f_dmax = motion.f_dmax
    if sample_rate is None:
        sample_rate = 4.0 * f_dmax if f_dmax > 0 else 1000.0
    if not sample_rate > 2.0 * f_dmax:
        raise ValueError(
            f"sample_rate {sample_rate:g} Hz violates Nyquist: need more than {2.0 * f_dmax:.6g} Hz"
        )
    if n_paths < 8:
        raise ValueError(f"n_paths must be >= 8, got {n_paths}")
    if not duration > 0.0:
        raise ValueError("duration must be > 0")
    region = classify_region(geom.theta_v, geom.theta_rx)
    f_lo, f_hi = support_bounds(region, geom.theta_v, geom.theta_rx, f_dmax)
    if f_hi - f_lo > 0 and duration * (f_hi - f_lo) < 10.0:
        warnings.warn(
            f"record of {duration:g} s resolves only {duration * (f_hi - f_lo):.3g} cycles of the Doppler spread",
            BeamdopplerWarning,
            stacklevel=2,
        )
    n_samples = int(round(duration * sample_rate))
    freqs, phasors = path_parameters(geom, motion, gain, n_paths, seed)
    h = _kernels.sos_synthesize(freqs, phasors, 1.0 / sample_rate, n_samples)
    return FadingRealization(h, float(sample_rate), seed, n_paths, f_dmax)


def estimate_psd(realization: FadingRealization, segment_len: int = 1024, overlap_frac: float = 0.5) -> SpectrumSamples:
    """Welch estimate over ``[-fs/2, fs/2)``, Hann segments, density scaling.

    The estimate integrates to the record's mean power.
    """
    x = np.asarray(realization.samples)
    if segment_len < 2 or segment_len > x.size:
        raise ValueError(f"segment_len {segment_len} incompatible with a record of {x.size} samples")
    if not 0.0 <= overlap_frac < 1.0:
        raise ValueError("overlap_frac must lie in [0, 1)")
    fs = realization.sample_rate
    freqs, psd = signal.welch(
        x,
        fs=fs,
        window="hann",
        nperseg=segment_len,
        noverlap=int(overlap_frac * segment_len),
        return_onesided=False,
        detrend=False,
        scaling="density",
    )
    freqs = np.fft.fftshift(freqs)
    psd = np.fft.fftshift(psd)
    total = float(np.sum(psd) * fs / segment_len)
    return SpectrumSamples(freqs, psd, realization.f_dmax, "welch", total)


def average_psd(estimates: list[SpectrumSamples]) -> SpectrumSamples:
    first = estimates[0]
    values = np.mean([e.values for e in estimates], axis=0)
    total = float(np.mean([e.total_power for e in estimates]))
    return SpectrumSamples(first.freqs, values, first.f_dmax, "welch-mean", total)


def autocorrelation(realization: FadingRealization) -> np.ndarray:
    """Unbiased autocorrelation for non-negative lags, normalized to 1 at lag 0."""
    x = np.asarray(realization.samples)
    n = x.size
    size = 1 << int(math.ceil(math.log2(2 * n)))
    spec = np.fft.fft(x, size)
    r = np.fft.ifft(spec * np.conj(spec))[:n]
    r = r / np.arange(n, 0, -1)
    return r / r[0].real


def coherence_time(source, threshold: float = COHERENCE_THRESHOLD) -> float:
    """Coherence time in seconds.

    A number is read as a Doppler spread in Hz and gives ``1 / spread``
    (``inf`` for zero spread). A realization gives the first lag at which
    the normalized autocorrelation magnitude drops below ``threshold``.
    """
    if isinstance(source, FadingRealization):
        r = np.abs(autocorrelation(source))
        # lags beyond half the record are too noisy to trust
        usable = r[: max(2, r.size // 2)]
        below = np.flatnonzero(usable < threshold)
        if below.size == 0:
            raise ValueError("record too short to resolve the autocorrelation crossing")
        return below[0] / source.sample_rate
    spread = float(source)
    if spread < 0:
        raise ValueError("Doppler spread must be >= 0")
    if spread == 0.0:
        return math.inf
    return 1.0 / spread


@dataclass
class SpectralCheck:
    inside_mass: float
    l1: float
    segment_len: int
    resolution: float
    interior_bins: int


def spectral_consistency(
    geom: BeamGeometry,
    motion: MotionState,
    gain: GainPattern = FLAT,
    seeds=range(20),
    n_paths: int = 256,
    sample_rate: float | None = None,
    bins_across: int = 32,
    segments: int = 16,
    guard_bins: int = 2,
) -> SpectralCheck:
    """Compare the seed-averaged Welch estimate with the analytic spectrum.

    The segment length is the smallest power of two giving ``bins_across``
    bins over the Doppler support. Reports the fraction of estimated mass
    inside the support widened by ``guard_bins`` on each side, and the L1
    distance between unit-normalized bin masses over interior bins (support
    shrunk by ``guard_bins``, where window leakage does not reach).
    """
    from .oracle import bin_means
    from .spectrum import doppler_psd, pdf_breakpoints

    f_dmax = motion.f_dmax
    fs = 4.0 * f_dmax if sample_rate is None else sample_rate
    region = classify_region(geom.theta_v, geom.theta_rx)
    f_lo, f_hi = support_bounds(region, geom.theta_v, geom.theta_rx, f_dmax)
    spread = f_hi - f_lo
    if not spread > 0:
        raise ValueError("spectral check needs a non-zero Doppler spread")
    seg = 1 << max(4, int(math.ceil(math.log2(bins_across * fs / spread))))
    duration = segments * seg / fs
    estimates = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BeamdopplerWarning)
        for seed in seeds:
            real = generate_fading(geom, motion, gain, n_paths, duration, fs, seed)
            estimates.append(estimate_psd(real, seg))
    avg = average_psd(estimates)
    df = fs / seg
    centers = avg.freqs
    mass = avg.values * df
    widened = (centers >= f_lo - guard_bins * df) & (centers <= f_hi + guard_bins * df)
    inside = float(mass[widened].sum() / mass.sum())

    interior = (centers - df / 2 >= f_lo + guard_bins * df) & (centers + df / 2 <= f_hi - guard_bins * df)
    edges = np.concatenate([centers[interior] - df / 2, [centers[interior][-1] + df / 2]])
    analytic = bin_means(
        lambda f: doppler_psd(f, geom, motion, gain), edges, f_dmax, pdf_breakpoints(geom, motion)
    ) * df
    est = mass[interior]
    l1 = float(np.abs(est / est.sum() - analytic / analytic.sum()).sum())
    return SpectralCheck(inside, l1, seg, df, int(interior.sum()))
