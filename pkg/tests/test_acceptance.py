"""Acceptance criteria, each at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -s`` to see one verdict per
criterion as it completes; the verdicts are also repeated in the terminal
summary.
"""

import json
import math
import time
import warnings

import numpy as np
import pytest

from beamdoppler import cli
from beamdoppler.approx import approx_shift_spread
from beamdoppler.core import AngularRegion, BeamGeometry, MotionState, doppler_support, max_doppler, support_bounds
from beamdoppler.fading import spectral_consistency
from beamdoppler.oracle import empirical_pdf, l1_distance, sample_doppler
from beamdoppler.spectrum import Mode, doppler_pdf, integrate_psd, pdf_breakpoints, spectrum_moments
from beamdoppler.train import BeamPolicy, beamwidth_for, demo_config, simulate

from conftest import THETA_RX_GRID_DEG, THETA_V_GRID_DEG, geom, grid

C = 299_792_458.0
V500 = 500.0 / 3.6
FD = V500 / C * 28e9
MOTION = MotionState(V500, 28e9)


def test_criterion_01_max_doppler(criterion):
    value = max_doppler(V500, 28e9)
    rel = abs(value - 12.96e3) / 12.96e3
    criterion(1, "maximum Doppler shift 12.96 kHz within 0.2%", rel <= 2e-3 and value == pytest.approx(FD, rel=1e-15),
              f"f_dmax = {value:.3f} Hz, rel. dev. {rel:.2e}")


def test_criterion_02_beamwidth_endpoints(criterion):
    values = [beamwidth_for(500, 28), beamwidth_for(50, 28), beamwidth_for(25, 28), beamwidth_for(0, 28)]
    ok = values == [1.0, 10.0, 10.0, 10.0]
    criterion(2, "beamwidth endpoints 1 deg / 10 deg and low-speed clamp", ok, f"got {values}")


def test_criterion_03_worst_case_spread(criterion):
    est = approx_shift_spread(math.pi / 2, math.radians(1.0), FD)
    expected = FD * math.radians(1.0)
    ok = abs(est.spread - 226.0) <= 1.0 and est.spread == pytest.approx(expected, rel=1e-15)
    criterion(3, "worst-case spread 226 Hz +/- 1 Hz", ok, f"spread = {est.spread:.3f} Hz")


def double_branch_fraction(theta_v, theta_rx, n=200_001):
    """Fraction of in-beam arrival angles whose mirror image about theta_v is also in the beam."""
    if theta_rx >= 2 * math.pi:
        return 1.0
    half = theta_rx / 2
    theta = np.linspace(-half, half, n)
    mirror = np.angle(np.exp(1j * (2 * theta_v - theta)))
    distinct = np.abs(np.angle(np.exp(1j * (mirror - theta)))) > 1e-9
    return float(np.mean((np.abs(mirror) <= half) & distinct))


@pytest.mark.slow
def test_criterion_04_oracle_agreement(criterion):
    start = time.perf_counter()
    worst, worst_at, failures = 0.0, None, []
    paper_checked, paper_missed = 0, []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for tv, tr in grid():
            g = geom(tv, tr)
            hist = empirical_pdf(sample_doppler(g, MOTION, n=1_000_000, seed=1000 * tv + tr), bins=200)
            points = pdf_breakpoints(g, MOTION)
            l1 = l1_distance(hist, lambda f: doppler_pdf(f, g, MOTION), FD, points)
            if l1 > worst:
                worst, worst_at = l1, (tv, tr)
            if l1 > 0.02:
                failures.append((tv, tr, l1))
            if double_branch_fraction(g.theta_v, g.theta_rx) > 0.05:
                paper_checked += 1
                l1_paper = l1_distance(hist, lambda f: doppler_pdf(f, g, MOTION, Mode.PAPER), FD, points)
                if not l1_paper > 0.02:
                    paper_missed.append((tv, tr, l1_paper))
    elapsed = time.perf_counter() - start
    ok = not failures and not paper_missed and paper_checked > 0 and elapsed <= 60.0
    criterion(4, "oracle L1 <= 0.02 over the full grid (1e6 samples, 200 bins)", ok,
              f"{len(THETA_V_GRID_DEG) * len(THETA_RX_GRID_DEG)} points, worst L1 {worst:.4f} at {worst_at}, "
              f"paper mode fails at all {paper_checked} double-branch points, {elapsed:.1f} s")


def test_criterion_05_normalization(criterion):
    worst = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for tv, tr in grid():
            g = geom(tv, tr)
            total = integrate_psd(lambda f: doppler_pdf(f, g, MOTION), -FD, FD, FD, pdf_breakpoints(g, MOTION))
            worst = max(worst, abs(total - 1.0))
    criterion(5, "exact pdf integrates to 1 +/- 1e-6 on the grid", worst <= 1e-6, f"worst |mass - 1| = {worst:.2e}")


def test_criterion_06_jakes_recovery(criterion):
    g = BeamGeometry(theta_tx=2 * math.pi, theta_rx=2 * math.pi, theta_v=math.radians(35.0))
    n = 2001
    f = -FD + (np.arange(n) + 0.5) * (2 * FD / n)
    reference = 1.0 / (math.pi * np.sqrt(FD ** 2 - f ** 2))
    rel = float(np.max(np.abs(doppler_pdf(f, g, MOTION) / reference - 1.0)))
    mean, rms = spectrum_moments(lambda x: doppler_pdf(x, g, MOTION), FD, points=[-FD, FD])
    rms_rel = abs(rms / (FD / math.sqrt(2)) - 1.0)
    ok = rel <= 1e-9 and rms_rel <= 1e-6
    criterion(6, "full-circle beam recovers the Jakes spectrum", ok,
              f"max rel. pdf error {rel:.1e}, rms spread rel. error {rms_rel:.1e}")


def test_criterion_07_region_continuity(criterion):
    worst = 0.0
    for tr in np.radians([0.5, 1, 5, 10, 30, 90, 150]):
        for sign in (1.0, -1.0):
            a = sign * tr / 2
            b = sign * (math.pi - tr / 2)
            for edge, left, right in ((a, AngularRegion.I, AngularRegion.II), (b, AngularRegion.II, AngularRegion.III)):
                lo1, hi1 = support_bounds(left, edge, tr, FD)
                lo2, hi2 = support_bounds(right, edge, tr, FD)
                worst = max(worst, abs(lo1 - lo2), abs(hi1 - hi2))
    criterion(7, "region boundary formulas agree to 1e-12 f_dmax", worst <= 1e-12 * FD,
              f"worst mismatch {worst / FD:.1e} f_dmax")


def test_criterion_08_table_envelope(criterion):
    worst_ratio = 0.0
    for tr_deg in range(1, 11):
        tr = math.radians(tr_deg)
        bound = FD * tr ** 2 / 2
        for tv_deg in range(-180, 181):
            g = BeamGeometry.from_degrees(tv_deg, tr_deg)
            est = approx_shift_spread(g.theta_v, tr, FD)
            ex = doppler_support(g, MOTION)
            worst_ratio = max(worst_ratio, abs(est.shift - ex.shift) / bound, abs(est.spread - ex.spread) / bound)
    criterion(8, "small-beam table errors within f_dmax*theta_rx^2/2", worst_ratio <= 1.0,
              f"worst error / bound = {worst_ratio:.3f} over 1 deg steps, theta_rx 1..10 deg")


SPECTRAL_CASES = [
    (90, 1), (60, 10), (120, 5), (90, 30), (45, 60),  # region II
    (0, 10), (5, 10), (180, 10), (175, 30),  # regions I and III
    (0, 360), (30, 90), (170, 90),  # wide beams
]


def test_criterion_09_fading_spectrum(criterion):
    start = time.perf_counter()
    worst_inside, worst_l1 = 1.0, 0.0
    for tv, tr in SPECTRAL_CASES:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            chk = spectral_consistency(geom(tv, tr), MOTION, seeds=range(20))
        worst_inside = min(worst_inside, chk.inside_mass)
        worst_l1 = max(worst_l1, chk.l1)
    elapsed = time.perf_counter() - start
    ok = worst_inside >= 0.95 and worst_l1 <= 0.1 and elapsed <= 30.0
    criterion(9, "20-seed fading PSD matches the analytic spectrum", ok,
              f"{len(SPECTRAL_CASES)} geometries, min inside mass {worst_inside:.5f}, max L1 {worst_l1:.3f}, "
              f"{elapsed:.1f} s")


def test_criterion_10_controlled_spread(criterion):
    cfg = demo_config()
    trace = simulate(cfg)
    controlled = trace.spread[trace.abeam_rows(cfg.bs_positions)]
    fixed_trace = simulate(demo_config(BeamPolicy.fixed(10.0)))
    fixed = fixed_trace.spread[fixed_trace.abeam_rows(cfg.bs_positions)]
    mid = (controlled.max() + controlled.min()) / 2
    band = max(controlled.max() - mid, mid - controlled.min()) / mid
    ratio = fixed.max() / fixed.min()
    ok = band <= 0.10 and 9.0 <= ratio <= 11.0 and len(controlled) == len(cfg.bs_positions)
    criterion(10, "controlled abeam spread within +/-10%, fixed-beam ratio in [9, 11]", ok,
              f"controlled {controlled.min():.2f}..{controlled.max():.2f} Hz (+/-{100 * band:.2f}%), "
              f"fixed-beam ratio {ratio:.2f}")


def test_criterion_11_determinism(criterion, tmp_path):
    runs = {
        "oracle": ["oracle", "--seed", "7", "--speed", "500", "--theta-v", "60", "--theta-rx", "10",
                   "--samples", "100000", "--with-analytic"],
        "fade": ["fade", "--seed", "5", "--speed", "500", "--theta-v", "90", "--theta-rx", "10", "--duration", "0.05"],
        "spectrum": ["spectrum", "--speed", "500", "--theta-v", "20", "--theta-rx", "30", "--format", "json"],
        "approx": ["approx", "--speed", "500", "--theta-v", "0", "90", "180", "--theta-rx", "1"],
        "train": ["train", "--config", "builtin:demo"],
    }
    identical = []
    for name, argv in runs.items():
        first = tmp_path / f"{name}.out"
        again = tmp_path / f"{name}.replay"
        assert cli.main([*argv, "--output", str(first)]) == 0
        manifest = json.loads((tmp_path / f"{name}.out.manifest.json").read_text())
        assert manifest["subcommand"] == name
        assert cli.main(["replay", str(first) + ".manifest.json", "--output", str(again)]) == 0
        identical.append(first.read_bytes() == again.read_bytes())
    criterion(11, "manifest replay reproduces outputs byte for byte", all(identical),
              f"{sum(identical)}/{len(identical)} subcommands identical")
