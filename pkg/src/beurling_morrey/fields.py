"""Standard input fields: random band-limited modes, bumps, truncated log."""

from __future__ import annotations

import numpy as np

from .grid import ComplexField, GridSpec, sample


def random_bandlimited(spec: GridSpec, rng: np.random.Generator, kmax: int = 8,
                       real: bool = False, mean_zero: bool = True) -> ComplexField:
    """Random trigonometric polynomial with integer modes ``|m_x|, |m_y| <= kmax``.

    Coefficients decay like ``1 / (1 + |m|^2)``.
    """
    if not 0 < kmax < spec.n // 2:
        raise ValueError("kmax must lie in (0, n/2)")
    n = spec.n
    coef = np.zeros((n, n), dtype=complex)
    ms = np.arange(-kmax, kmax + 1)
    amp = 1.0 / (1.0 + ms[:, None] ** 2 + ms[None, :] ** 2)
    c = (rng.standard_normal(amp.shape) + 1j * rng.standard_normal(amp.shape)) * amp
    coef[np.ix_(ms % n, ms % n)] = c
    if mean_zero:
        coef[0, 0] = 0
    vals = np.fft.ifft2(coef) * n * n
    if real:
        vals = vals.real
    return ComplexField(spec, vals)


def gaussian(spec: GridSpec, center: complex = 0j, width: float = 1.0, amplitude: complex = 1.0) -> ComplexField:
    return sample(spec, lambda z: amplitude * np.exp(-np.abs(z - center) ** 2 / width ** 2))


def bump_function(radius: float, center: complex = 0j):
    """Formula of the C_c-infinity bump ``exp(1 - 1/(1 - |z-c|^2/R^2))`` (peak 1)."""
    def fn(z):
        s = np.abs(np.asarray(z) - center) ** 2 / radius ** 2
        out = np.zeros(np.shape(s))
        inside = s < 1
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside]))
        return out
    return fn


def smooth_bump(spec: GridSpec, radius: float, center: complex = 0j, amplitude: float = 1.0) -> ComplexField:
    fn = bump_function(radius, center)
    return sample(spec, lambda z: amplitude * fn(z))


def truncated_log_function(eps: float, center: complex = 0j, scale: float = 1.0):
    """``scale * log(max(|z - c|, eps))``."""
    def fn(z):
        return scale * np.log(np.maximum(np.abs(np.asarray(z) - center), eps))
    return fn


def truncated_log(spec: GridSpec, eps: float | None = None, center: complex = 0j,
                  scale: float = 1.0) -> ComplexField:
    eps = spec.h / 2 if eps is None else eps
    return sample(spec, truncated_log_function(eps, center, scale))
