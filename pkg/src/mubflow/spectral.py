"""Spectral calculus for real periodic fields on the unit circle.

A field is a real numpy array of length N holding samples at the uniform
grid x_j = j/N on the circle R/Z (period 1).  The spectral view stores the
normalized coefficients c_k of u(x) = sum_k c_k exp(2*pi*i*k*x) in numpy
FFT ordering (k = 0, 1, ..., N/2-1, -N/2, ..., -1), so c_0 equals the mean
of u and the integer mode k carries physical wavenumber 2*pi*k.

All quadratic products default to dealiased evaluation (3/2-rule zero
padding); discrete integrals are (1/N)-weighted sums, exact for trig
polynomials below the Nyquist mode.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

TWO_PI = 2.0 * np.pi

__all__ = [
    "TWO_PI",
    "grid",
    "mode_numbers",
    "transform",
    "inverse_transform",
    "mean",
    "derivative",
    "product",
    "inner_l2",
    "inner_mu",
    "Antiderivative",
    "antiderivative_from_zero",
    "evaluate",
    "trig_field",
    "random_trig_field",
]


def grid(n: int) -> np.ndarray:
    """Sample points x_j = j/n of the uniform n-point grid on [0, 1)."""
    return np.arange(n) / float(n)


def mode_numbers(n: int) -> np.ndarray:
    """Integer mode numbers in FFT ordering: 0, 1, ..., n/2-1, -n/2, ..., -1."""
    return np.fft.fftfreq(n, d=1.0 / n)


def _check_field(f) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.ndim != 1:
        raise ValueError("field must be one-dimensional")
    if f.size < 4 or f.size % 2:
        raise ValueError("field length must be even and at least 4")
    if not np.all(np.isfinite(f)):
        raise ValueError("field contains non-finite samples")
    return f


def transform(f: np.ndarray) -> np.ndarray:
    """Normalized Fourier coefficients of a real field (c_0 = mean)."""
    f = _check_field(f)
    return np.fft.fft(f) / f.size


def inverse_transform(c: np.ndarray) -> np.ndarray:
    """Real field with the given normalized coefficients.

    Assumes Hermitian symmetry (the coefficients of a real field); the
    residual imaginary part from round-off is discarded.
    """
    c = np.asarray(c, dtype=complex)
    return np.real(np.fft.ifft(c) * c.size)


def mean(f: np.ndarray) -> float:
    """Integral of f over the circle, i.e. the coefficient c_0."""
    return float(np.mean(f))


def derivative(f: np.ndarray, order: int = 1) -> np.ndarray:
    """Spectral derivative of the given order (1, 2 or 3).

    Mode k is multiplied by (2*pi*i*k)**order.  For odd orders the Nyquist
    mode is dropped: its cosine has no representable odd derivative on the
    grid.
    """
    if order not in (1, 2, 3):
        raise ValueError("derivative order must be 1, 2 or 3")
    f = np.asarray(f, dtype=float)
    n = f.size
    c = np.fft.rfft(f)
    w = (2j * np.pi * np.arange(n // 2 + 1)) ** order
    c = c * w
    if order % 2:
        c[-1] = 0.0
    return np.fft.irfft(c, n)


def _resample(f: np.ndarray, m: int) -> np.ndarray:
    # exact trigonometric resampling of f onto the m-point grid (m >= n)
    n = f.size
    h = n // 2
    c = np.fft.fft(f) / n
    cf = np.zeros(m, dtype=complex)
    cf[:h] = c[:h]
    cf[-(h - 1):] = c[-(h - 1):]
    cf[h] = 0.5 * c[h]
    cf[-h] = 0.5 * c[h]
    return np.real(np.fft.ifft(cf) * m)


def _truncate(values_fine: np.ndarray, n: int) -> np.ndarray:
    # keep modes |k| <= n/2 of a fine-grid field, folding +-n/2 into the
    # coarse Nyquist slot, and return samples on the n-point grid
    m = values_fine.size
    cf = np.fft.fft(values_fine) / m
    h = n // 2
    c = np.zeros(n, dtype=complex)
    c[:h] = cf[:h]
    c[-(h - 1):] = cf[-(h - 1):]
    c[h] = cf[h] + cf[-h]
    return np.real(np.fft.ifft(c) * n)


def product(f: np.ndarray, g: np.ndarray, dealias: bool = True) -> np.ndarray:
    """Pointwise product; dealiased via 3/2-rule zero padding by default."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.shape != g.shape:
        raise ValueError("fields must share the same grid size")
    if not dealias:
        return f * g
    n = f.size
    m = 3 * n // 2
    return _truncate(_resample(f, m) * _resample(g, m), n)


def inner_l2(f: np.ndarray, g: np.ndarray) -> float:
    """Discrete L2 inner product (1/N) sum f_j g_j."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.shape != g.shape:
        raise ValueError("fields must share the same grid size")
    return float(np.dot(f, g) / f.size)


def inner_mu(f: np.ndarray, g: np.ndarray) -> float:
    """Mean-plus-gradient inner product mu(f) mu(g) + int f' g'."""
    return mean(f) * mean(g) + inner_l2(derivative(f, 1), derivative(g, 1))


class Antiderivative(NamedTuple):
    """Running integral F(x) = int_0^x f, sampled on the grid.

    F is generally non-periodic: F(x + 1) = F(x) + slope with slope equal
    to the mean of f.
    """

    values: np.ndarray
    slope: float


def antiderivative_from_zero(f: np.ndarray) -> Antiderivative:
    """Exact running integral on the trig-polynomial representation.

    Mode k != 0 contributes c_k (e^{2 pi i k x} - 1)/(2 pi i k) and the mean
    contributes slope*x.  The Nyquist cosine integrates to a sine that
    vanishes at every grid point, so the returned samples are exact.
    """
    c = transform(f)
    n = f.size
    h = n // 2
    k = mode_numbers(n)
    a = np.zeros(n, dtype=complex)
    live = np.abs(k) > 0
    live[h] = False
    a[live] = c[live] / (2j * np.pi * k[live])
    a[0] = -np.sum(a[live])
    slope = float(c[0].real)
    values = slope * grid(n) + inverse_transform(a)
    return Antiderivative(values, slope)


def evaluate(f: np.ndarray, x) -> np.ndarray:
    """Evaluate the trigonometric interpolant of f at arbitrary points.

    Exact summation of the truncated Fourier series (Nyquist mode taken as
    a cosine); x may lie outside [0, 1), the series is 1-periodic.
    """
    f = np.asarray(f, dtype=float)
    x = np.asarray(x, dtype=float)
    n = f.size
    c = np.fft.rfft(f) / n
    # e^{2 pi i k x} for k = 1..n/2-1 by repeated multiplication with e^{2 pi i x}
    e1 = np.exp((2j * np.pi) * x)
    phases = np.multiply.accumulate(
        np.broadcast_to(e1, (n // 2 - 1,) + x.shape), axis=0)
    out = c[0].real + 2.0 * np.real(np.tensordot(c[1:n // 2], phases, axes=(0, 0)))
    out = out + c[n // 2].real * np.cos(np.pi * n * x)
    return out


def trig_field(n: int, mean_value: float = 0.0, cos=(), sin=()) -> np.ndarray:
    """Build mean + sum_j cos[j-1] cos(2 pi j x) + sin[j-1] sin(2 pi j x)."""
    cos = np.asarray(cos, dtype=float)
    sin = np.asarray(sin, dtype=float)
    if max(cos.size, sin.size) >= n // 2:
        raise ValueError("coefficient lists reach the Nyquist mode")
    x = grid(n)
    u = np.full(n, float(mean_value))
    for j, a in enumerate(cos, start=1):
        u += a * np.cos(TWO_PI * j * x)
    for j, b in enumerate(sin, start=1):
        u += b * np.sin(TWO_PI * j * x)
    return u


def random_trig_field(n: int, max_mode: int, rng: np.random.Generator,
                      decay: float = 2.0, mean_value: float | None = None) -> np.ndarray:
    """Random band-limited field with coefficients damped like k**-decay."""
    if max_mode >= n // 2:
        raise ValueError("max_mode must stay below the Nyquist mode")
    k = np.arange(1, max_mode + 1)
    amp = (1.0 + k) ** (-decay)
    a = rng.standard_normal(max_mode) * amp
    b = rng.standard_normal(max_mode) * amp
    m = float(rng.standard_normal()) if mean_value is None else float(mean_value)
    return trig_field(n, m, a, b)
