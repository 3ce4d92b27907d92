"""Numerical hot loops with numba-compiled and pure-numpy implementations.

The compiled path is used when numba imports cleanly; set ``MBRADAR_NO_NUMBA=1``
to force the numpy path (useful for debugging and for the benchmark baseline).
Both paths are exercised by the test suite and must agree to float precision.
"""

from __future__ import annotations

import os

import numpy as np

_TWO_PI = 2.0 * np.pi

if os.environ.get("MBRADAR_NO_NUMBA", "").strip() not in ("", "0"):
    _HAVE_NUMBA = False
else:
    try:
        from numba import njit

        _HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a hard dep, but stay runnable
        _HAVE_NUMBA = False


def _sum_cisoids_np(x: np.ndarray, freqs: np.ndarray, coefs: np.ndarray) -> np.ndarray:
    # K is small (harmonics x scatterers); one broadcast per cisoid keeps memory flat.
    out = np.zeros(x.shape[0], dtype=np.complex128)
    for i in range(freqs.shape[0]):
        out += coefs[i] * np.exp(1j * _TWO_PI * freqs[i] * x)
    return out


def _dirichlet_interp_np(values: np.ndarray, x0: float, dx: float, xq: np.ndarray) -> np.ndarray:
    n = values.shape[0]
    u = (xq[:, None] - (x0 + dx * np.arange(n))[None, :]) / (n * dx)
    s = np.sin(np.pi * n * u)
    if n % 2 == 1:
        d = n * np.sin(np.pi * u)
    else:
        d = n * np.tan(np.pi * u)
    with np.errstate(divide="ignore", invalid="ignore"):
        kern = s / d
    kern[~np.isfinite(kern)] = 1.0
    return kern.astype(np.complex128) @ values


if _HAVE_NUMBA:

    @njit(cache=True)
    def _sum_cisoids_nb(x, freqs, coefs):  # pragma: no cover - compiled
        out = np.zeros(x.shape[0], dtype=np.complex128)
        for i in range(freqs.shape[0]):
            w = _TWO_PI * freqs[i]
            c = coefs[i]
            for j in range(x.shape[0]):
                out[j] += c * np.exp(1j * (w * x[j]))
        return out

    @njit(cache=True)
    def _dirichlet_interp_nb(values, x0, dx, xq):  # pragma: no cover - compiled
        n = values.shape[0]
        period = n * dx
        out = np.zeros(xq.shape[0], dtype=np.complex128)
        odd = n % 2 == 1
        for q in range(xq.shape[0]):
            acc = 0.0 + 0.0j
            for m in range(n):
                u = (xq[q] - (x0 + dx * m)) / period
                su = np.sin(np.pi * n * u)
                if odd:
                    den = n * np.sin(np.pi * u)
                else:
                    den = n * np.tan(np.pi * u)
                if np.abs(den) < 1e-300:
                    k = 1.0
                else:
                    k = su / den
                acc += values[m] * k
            out[q] = acc
        return out


def sum_cisoids(x: np.ndarray, freqs: np.ndarray, coefs: np.ndarray) -> np.ndarray:
    """Evaluate ``sum_i coefs[i] * exp(j*2*pi*freqs[i]*x)`` at each point of x."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    freqs = np.ascontiguousarray(freqs, dtype=np.float64)
    coefs = np.ascontiguousarray(coefs, dtype=np.complex128)
    if freqs.shape != coefs.shape:
        raise ValueError("freqs and coefs must have matching shapes")
    if _HAVE_NUMBA:
        return _sum_cisoids_nb(x, freqs, coefs)
    return _sum_cisoids_np(x, freqs, coefs)


def dirichlet_interp(values: np.ndarray, x0: float, dx: float, xq: np.ndarray) -> np.ndarray:
    """Periodic band-limited (Dirichlet kernel) interpolation of a uniform grid.

    `values` are samples at ``x0 + dx*arange(n)``; the interpolant is the unique
    n-term trigonometric polynomial through them, evaluated at `xq`. Exact at
    the sample points; used for resampling spectra onto non-commensurate grids.
    """
    values = np.ascontiguousarray(values, dtype=np.complex128)
    xq = np.ascontiguousarray(xq, dtype=np.float64)
    if _HAVE_NUMBA:
        return _dirichlet_interp_nb(values, float(x0), float(dx), xq)
    return _dirichlet_interp_np(values, float(x0), float(dx), xq)


def backend() -> str:
    """Name of the active kernel backend ('numba' or 'numpy')."""
    return "numba" if _HAVE_NUMBA else "numpy"
