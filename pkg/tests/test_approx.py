import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from beamdoppler.approx import approx_shift_spread, worst_case_spread
from beamdoppler.core import AngularRegion, BeamdopplerWarning, classify_region, max_doppler, support_bounds

FD = max_doppler(500 / 3.6, 28e9)


def exact(theta_v, theta_rx, fd=FD):
    lo, hi = support_bounds(classify_region(theta_v, theta_rx), theta_v, theta_rx, fd)
    return 0.5 * (lo + hi), hi - lo


def test_head_on():
    a = approx_shift_spread(0.0, math.radians(1), FD)
    assert a.region is AngularRegion.I
    assert (a.shift, a.spread) == (FD, 0.0)


def test_abeam_worst_case():
    a = approx_shift_spread(math.pi / 2, math.radians(1), 12_960.0)
    assert a.spread == pytest.approx(12_960.0 * 0.017453292519943295, rel=1e-15)
    assert a.spread == pytest.approx(226.2, abs=0.1)
    assert worst_case_spread(math.radians(1), 12_960.0) == a.spread


def test_tail_on():
    a = approx_shift_spread(math.pi, math.radians(1), FD)
    assert a.region is AngularRegion.III
    assert a.shift == -FD
    assert a.spread == 0.0


def test_wide_beam_warns():
    with pytest.warns(BeamdopplerWarning):
        approx_shift_spread(1.0, math.radians(30), FD)


def test_worst_case_is_abeam():
    theta_rx = math.radians(2)
    sweep = np.radians(np.linspace(0, 180, 3601))
    spreads = [approx_shift_spread(t, theta_rx, FD).spread for t in sweep]
    assert sweep[int(np.argmax(spreads))] == pytest.approx(math.pi / 2)
    assert max(spreads) == pytest.approx(FD * theta_rx, rel=1e-15)


@pytest.mark.parametrize("theta_rx_deg", [0.5, 1, 2, 5, 10])
def test_error_envelope(theta_rx_deg):
    theta_rx = math.radians(theta_rx_deg)
    bound = FD * theta_rx ** 2 / 2
    for theta_v in np.radians(np.arange(0.0, 180.01, 0.05)):
        a = approx_shift_spread(theta_v, theta_rx, FD)
        shift, spread = exact(theta_v, theta_rx)
        assert abs(a.shift - shift) <= bound
        assert abs(a.spread - spread) <= bound


def test_head_on_gap_is_second_order():
    theta_rx = math.radians(10)
    a = approx_shift_spread(0.0, theta_rx, FD)
    _, spread = exact(0.0, theta_rx)
    assert a.spread == 0.0
    assert spread == pytest.approx(FD * (1 - math.cos(theta_rx / 2)), rel=1e-12)
    assert spread == pytest.approx(FD * theta_rx ** 2 / 8, rel=1e-2)


@given(st.floats(0.0, math.pi), st.floats(1e-4, math.radians(10)))
def test_region_two_tightness(theta_v, theta_rx):
    if classify_region(theta_v, theta_rx) is not AngularRegion.II:
        return
    a = approx_shift_spread(theta_v, theta_rx, FD)
    _, spread = exact(theta_v, theta_rx)
    assert abs(a.spread - spread) <= FD * theta_rx ** 3 / 24 * math.sin(theta_v) * (1 + 1e-9) + 1e-9


@given(st.floats(0.0, math.pi), st.floats(1e-4, math.radians(10)), st.floats(0.0, 1e5))
def test_symmetry_and_scaling(theta_v, theta_rx, fd):
    a = approx_shift_spread(theta_v, theta_rx, fd)
    b = approx_shift_spread(-theta_v, theta_rx, fd)
    assert (a.shift, a.spread) == (b.shift, b.spread)
    assert a.spread >= 0
    assert abs(a.shift) <= fd * (1 + 1e-15)
    double = approx_shift_spread(theta_v, theta_rx, 2 * fd)
    assert double.spread == pytest.approx(2 * a.spread, rel=1e-12, abs=1e-12)


def test_halving_beam_while_doubling_speed_keeps_abeam_spread():
    theta_v = math.radians(70)
    base = approx_shift_spread(theta_v, math.radians(4), max_doppler(50.0, 28e9))
    fast = approx_shift_spread(theta_v, math.radians(2), max_doppler(100.0, 28e9))
    assert fast.spread == pytest.approx(base.spread, rel=1e-14)
