import math

import numpy as np
import pytest

from beamdoppler.core import MotionState, doppler_support
from beamdoppler.oracle import (
    DopplerSamples,
    analytic_histogram,
    empirical_pdf,
    l1_distance,
    sample_angles,
    sample_doppler,
)
from beamdoppler.spectrum import GainPattern, doppler_pdf, doppler_psd, jakes_psd, pdf_breakpoints

from conftest import geom


def test_degenerate_beam_is_pure_shift(hst_motion):
    g = geom(60, 1e-6 * 180 / math.pi)
    s = sample_doppler(g, hst_motion, n=10_000, seed=3)
    target = hst_motion.f_dmax * math.cos(math.radians(60))
    assert np.max(np.abs(s.values - target)) <= 1e-5 * hst_motion.f_dmax


def test_head_on_sample_extremes(hst_motion):
    g = geom(0, 10)
    s = sample_doppler(g, hst_motion, n=1_000_000, seed=11)
    fd = hst_motion.f_dmax
    assert s.values.max() == pytest.approx(fd, rel=1e-6)
    assert s.values.min() == pytest.approx(fd * math.cos(math.radians(5)), rel=1e-6)


def test_support_within_sampling_resolution(hst_motion):
    n = 200_000
    for tv, tr in [(0, 10), (40, 10), (90, 30), (170, 30), (180, 5)]:
        g = geom(tv, tr)
        s = sample_doppler(g, hst_motion, n=n, seed=tv + tr)
        sup = doppler_support(g, hst_motion)
        tol = hst_motion.f_dmax * (g.theta_rx / n) * 5
        assert abs(s.values.min() - sup.f_lo) <= tol
        assert abs(s.values.max() - sup.f_hi) <= tol


def test_determinism_and_worker_independence(hst_motion):
    g = geom(75, 10)
    a = sample_doppler(g, hst_motion, n=300_000, seed=5)
    b = sample_doppler(g, hst_motion, n=300_000, seed=5)
    c = sample_doppler(g, hst_motion, n=300_000, seed=5, workers=4)
    np.testing.assert_array_equal(a.values, b.values)
    np.testing.assert_array_equal(a.values, c.values)
    d = sample_doppler(g, hst_motion, n=300_000, seed=6)
    assert not np.array_equal(a.values, d.values)
    np.testing.assert_array_equal(empirical_pdf(a).densities, empirical_pdf(c).densities)


def test_sample_count_validation(hst_motion):
    with pytest.raises(ValueError):
        sample_doppler(geom(10, 10), hst_motion, n=0)


def test_histogram_mass_and_span(hst_motion):
    g = geom(90, 10)
    s = sample_doppler(g, hst_motion, n=100_000, seed=1)
    h = empirical_pdf(s, 50)
    sup = doppler_support(g, hst_motion)
    assert h.masses.sum() == pytest.approx(1.0, abs=1e-12)
    assert h.edges[0] == sup.f_lo and h.edges[-1] == sup.f_hi
    assert h.dropped == 0
    assert np.all(h.densities >= 0)


def test_histogram_merge(hst_motion):
    g = geom(30, 10)
    a = empirical_pdf(sample_doppler(g, hst_motion, n=50_000, seed=1), 40)
    b = empirical_pdf(sample_doppler(g, hst_motion, n=50_000, seed=2), 40)
    ab, ba = a.merge(b), b.merge(a)
    np.testing.assert_array_equal(ab.counts, ba.counts)
    np.testing.assert_allclose(ab.densities, 0.5 * (a.densities + b.densities), rtol=1e-12)


def test_jakes_histogram_is_u_shaped(hst_motion):
    s = sample_doppler(geom(0, 360), hst_motion, n=1_000_000, seed=2)
    h = empirical_pdf(s, 200)
    centre = h.densities[95:105].mean()
    assert h.densities[0] > centre and h.densities[-1] > centre


def test_zero_support_delta_histogram():
    g = geom(90, 10)
    s = sample_doppler(g, MotionState(0.0, 28e9), n=100, seed=0)
    h = empirical_pdf(s)
    assert h.densities.size == 1
    assert h.masses.sum() == pytest.approx(1.0)


def test_bins_validation(hst_motion):
    s = sample_doppler(geom(90, 10), hst_motion, n=10, seed=0)
    with pytest.raises(ValueError):
        empirical_pdf(s, 1)


def test_self_distance_is_zero(hst_motion):
    g = geom(20, 30)
    sup = doppler_support(g, hst_motion)
    pts = pdf_breakpoints(g, hst_motion)
    pdf = lambda f: doppler_pdf(f, g, hst_motion)
    h = analytic_histogram(pdf, np.linspace(sup.f_lo, sup.f_hi, 201), hst_motion.f_dmax, pts)
    assert l1_distance(h, pdf, hst_motion.f_dmax, pts) == pytest.approx(0.0, abs=1e-9)
    assert h.masses.sum() == pytest.approx(1.0, abs=1e-9)


def test_region_two_l1_and_convergence(hst_motion):
    g = geom(90, 10)
    pts = pdf_breakpoints(g, hst_motion)
    pdf = lambda f: doppler_pdf(f, g, hst_motion)
    small = l1_distance(empirical_pdf(sample_doppler(g, hst_motion, n=10_000, seed=4)), pdf, hst_motion.f_dmax, pts)
    large = l1_distance(empirical_pdf(sample_doppler(g, hst_motion, n=1_000_000, seed=4)), pdf, hst_motion.f_dmax, pts)
    assert large <= 0.02
    assert large < small


def test_parametric_gain_thinning(hst_motion):
    """Empirical density ratio at the beam-edge pre-image tends to 1/2."""
    g = geom(90, 10)
    flat = empirical_pdf(sample_doppler(g, hst_motion, n=2_000_000, seed=8), 100)
    shaped = empirical_pdf(sample_doppler(g, hst_motion, GainPattern.parametric(), n=2_000_000, seed=8), 100)
    # rescale the shaped histogram to the spectrum's (unnormalized) mass
    fd = hst_motion.f_dmax
    from beamdoppler.spectrum import integrate_psd

    mass = integrate_psd(lambda f: doppler_psd(f, g, hst_motion, GainPattern.parametric()), -fd, fd, fd, pdf_breakpoints(g, hst_motion))
    ratio_lo = shaped.densities[0] * mass / flat.densities[0]
    ratio_hi = shaped.densities[-1] * mass / flat.densities[-1]
    # edge bins average G over [0.5, ~0.51] of peak
    assert ratio_lo == pytest.approx(0.5, abs=0.03)
    assert ratio_hi == pytest.approx(0.5, abs=0.03)
    centre = shaped.densities[50] * mass / flat.densities[50]
    assert centre == pytest.approx(1.0, abs=0.03)


def test_sample_angles_are_uniform_over_beam():
    g = geom(0, 20)
    theta = sample_angles(g, 400_000, seed=9)
    assert theta.min() >= -g.theta_rx / 2 and theta.max() <= g.theta_rx / 2
    counts, _ = np.histogram(theta, 20, (-g.theta_rx / 2, g.theta_rx / 2))
    assert np.all(np.abs(counts / 20_000 - 1) < 0.05)
