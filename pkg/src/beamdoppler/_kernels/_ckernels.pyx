# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Same contracts as ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport acos, sqrt, exp, fabs, fmod, cos, sin, M_PI, INFINITY, floor

cnp.import_array()

cdef double TWO_PI = 2.0 * M_PI
cdef double FOUR_LN2 = 2.772588722239781
cdef int ANCHOR = 512


cdef inline double _mod2pi(double t) nogil:
    cdef double d = fmod(t, TWO_PI)
    if d < 0.0:
        d += TWO_PI
    return d


cdef inline bint _in_window(double theta, double lo, double width) nogil:
    if width >= TWO_PI:
        return True
    cdef double d = _mod2pi(theta - lo)
    return d > 0.0 and d < width


cdef inline bint _closed_window(double theta, double lo, double width) nogil:
    if width >= TWO_PI:
        return True
    cdef double d = _mod2pi(theta - lo)
    return d <= width or fabs(d - TWO_PI) <= 1e-15


cdef inline double _gain(double theta, int kind, double hpbw, double peak) nogil:
    cdef double rel
    if kind == 0:
        return peak
    rel = _mod2pi(theta + M_PI) - M_PI
    return peak * exp(-FOUR_LN2 * (rel / hpbw) * (rel / hpbw))


def branch_density(x, double theta_v, double lo, double hi, bint exact,
                   double x_lo, double x_hi, int gain_kind, double hpbw, double peak):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xs = np.ascontiguousarray(x, dtype=np.float64).ravel()
    cdef Py_ssize_t n = xs.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(n, dtype=np.float64)
    cdef double width = hi - lo
    cdef double sign = 1.0 if theta_v >= 0.0 else -1.0
    cdef double xi, a, jac, acc, theta
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            xi = xs[i]
            if fabs(xi) > 1.0:
                continue
            if fabs(xi) == 1.0:
                if exact:
                    theta = theta_v if xi > 0.0 else theta_v + M_PI
                    if _closed_window(theta, lo, width):
                        out[i] = INFINITY
                elif xi >= x_lo and xi <= x_hi:
                    out[i] = INFINITY
                continue
            a = acos(xi)
            jac = 1.0 / sqrt((1.0 - xi) * (1.0 + xi))
            acc = 0.0
            if exact:
                theta = theta_v + a
                if _in_window(theta, lo, width):
                    acc += _gain(theta, gain_kind, hpbw, peak)
                theta = theta_v - a
                if _in_window(theta, lo, width):
                    acc += _gain(theta, gain_kind, hpbw, peak)
            elif xi > x_lo and xi < x_hi:
                acc = _gain(theta_v - sign * a, gain_kind, hpbw, peak)
            out[i] = acc * jac
    return out.reshape(np.shape(x))


def bin_counts(values, double lo, double hi, Py_ssize_t nbins, double tol):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] v = np.ascontiguousarray(values, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.int64_t, ndim=1] counts = np.zeros(nbins, dtype=np.int64)
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t i, k
    cdef Py_ssize_t dropped = 0
    cdef double scale = nbins / (hi - lo)
    cdef double val
    with nogil:
        for i in range(n):
            val = v[i]
            if val < lo - tol or val > hi + tol:
                dropped += 1
                continue
            k = <Py_ssize_t>floor((val - lo) * scale)
            if k < 0:
                k = 0
            elif k >= nbins:
                k = nbins - 1
            counts[k] += 1
    return counts, int(dropped)


def sos_synthesize(freqs, phasors, double dt, Py_ssize_t n):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] f = np.ascontiguousarray(freqs, dtype=np.float64)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] ph = np.ascontiguousarray(phasors, dtype=np.complex128)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] re = np.zeros(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] im = np.zeros(n, dtype=np.float64)
    cdef Py_ssize_t npaths = f.shape[0]
    cdef Py_ssize_t p, k, start, stop
    cdef double zr, zi, rr, ri, tmp, arg, ar, ai
    with nogil:
        start = 0
        while start < n:
            stop = start + ANCHOR
            if stop > n:
                stop = n
            for p in range(npaths):
                # exact phasor at the block anchor bounds the recurrence drift
                arg = fmod(TWO_PI * f[p] * dt * start, TWO_PI)
                ar = ph[p].real
                ai = ph[p].imag
                zr = ar * cos(arg) - ai * sin(arg)
                zi = ar * sin(arg) + ai * cos(arg)
                rr = cos(TWO_PI * f[p] * dt)
                ri = sin(TWO_PI * f[p] * dt)
                for k in range(start, stop):
                    re[k] += zr
                    im[k] += zi
                    tmp = zr * rr - zi * ri
                    zi = zr * ri + zi * rr
                    zr = tmp
            start = stop
    return re + 1j * im
