"""Numpy implementations of the hot kernels.

Used when the compiled extension is unavailable or when
``BEAMDOPPLER_PURE_PYTHON=1`` is set. Signatures mirror ``_ckernels.pyx``.
"""

import math

import numpy as np

TWO_PI = 2.0 * math.pi
FOUR_LN2 = 4.0 * math.log(2.0)


def _in_window(theta, lo, hi):
    width = hi - lo
    if width >= TWO_PI:
        return np.ones(theta.shape, dtype=bool)
    d = np.mod(theta - lo, TWO_PI)
    return (d > 0.0) & (d < width)


def _closed_window(theta, lo, hi):
    width = hi - lo
    if width >= TWO_PI:
        return np.ones(np.shape(theta), dtype=bool)
    d = np.mod(theta - lo, TWO_PI)
    return (d <= width) | np.isclose(d, TWO_PI, rtol=0.0, atol=1e-15)


def _gain(theta, gain_kind, hpbw, peak):
    if gain_kind == 0:
        return np.full(theta.shape, peak)
    rel = np.remainder(theta + math.pi, TWO_PI) - math.pi
    return peak * np.exp(-FOUR_LN2 * (rel / hpbw) ** 2)


def branch_density(x, theta_v, lo, hi, exact, x_lo, x_hi, gain_kind, hpbw, peak):
    """Gain-weighted Doppler density times ``f_dmax * window_width``.

    ``x`` is the normalized Doppler shift ``f_d / f_dmax``. Exact mode sums
    both pre-images ``theta_v +/- arccos(x)`` that fall inside ``(lo, hi)``;
    otherwise a single pre-image is used on the open interval ``(x_lo, x_hi)``.
    Returns ``inf`` where an endpoint singularity at ``|x| = 1`` is in support.
    """
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape)
    interior = np.abs(x) < 1.0
    xi = x[interior]
    a = np.arccos(xi)
    jac = 1.0 / np.sqrt((1.0 - xi) * (1.0 + xi))
    if exact:
        acc = np.zeros(xi.shape)
        for theta in (theta_v + a, theta_v - a):
            hit = _in_window(theta, lo, hi)
            acc += np.where(hit, _gain(theta, gain_kind, hpbw, peak), 0.0)
        out[interior] = acc * jac
    else:
        sign = 1.0 if theta_v >= 0.0 else -1.0
        theta = theta_v - sign * a
        hit = (xi > x_lo) & (xi < x_hi)
        out[interior] = np.where(hit, _gain(theta, gain_kind, hpbw, peak), 0.0) * jac

    edge = np.abs(x) == 1.0
    if np.any(edge):
        xe = x[edge]
        if exact:
            theta = np.where(xe > 0, theta_v, theta_v + math.pi)
            live = _closed_window(theta, lo, hi)
        else:
            live = (xe >= x_lo) & (xe <= x_hi)
        out[edge] = np.where(live, np.inf, 0.0)
    return out


def bin_counts(values, lo, hi, nbins, tol):
    """Equal-width bin counts on ``[lo, hi]``.

    Values within ``tol`` outside the range are folded into the edge bins;
    values further out are dropped and counted.
    """
    values = np.asarray(values, dtype=float)
    keep = (values >= lo - tol) & (values <= hi + tol)
    v = values[keep]
    idx = np.floor((v - lo) / (hi - lo) * nbins).astype(np.int64)
    np.clip(idx, 0, nbins - 1, out=idx)
    counts = np.bincount(idx, minlength=nbins).astype(np.int64)
    return counts, int(values.size - v.size)


def sos_synthesize(freqs, phasors, dt, n):
    """``h[k] = sum_p phasors[p] * exp(2j*pi*freqs[p]*k*dt)`` for ``k < n``.

    Splits ``k = b*K + m`` so the work becomes one (K x P) @ (P x B) product.
    """
    freqs = np.asarray(freqs, dtype=float)
    phasors = np.asarray(phasors, dtype=complex)
    if n == 0:
        return np.zeros(0, dtype=complex)
    K = int(math.ceil(math.sqrt(n)))
    B = int(math.ceil(n / K))
    inner = np.exp(1j * TWO_PI * np.outer(np.arange(K) * dt, freqs))
    outer = np.exp(1j * TWO_PI * np.outer(np.arange(B) * (K * dt), freqs))
    block = inner @ (outer * phasors).T
    return np.ascontiguousarray(block.T).ravel()[:n]
