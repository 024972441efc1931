"""Beurling-Ahlfors transform and relatives on the periodic grid.

Fourier convention: a mode ``exp(i(k_x x + k_y y))`` has complex frequency
``xi = k_x + i k_y`` with ``k = pi * m / L`` for integer ``m`` in
``[-n/2, n/2)``.  In this convention ``d/dz`` has symbol ``i conj(xi) / 2``,
``d/dzbar`` has symbol ``i xi / 2`` and the Beurling transform is the
multiplier ``conj(xi) / xi``.

The Nyquist wavenumber is zeroed in the derivative symbols, and every
multiplier built from them uses the same zeroed frequencies so that
``wirtinger(cauchy(g), 'd') == beurling(g)`` holds to rounding.  The zero
frequency (and the Nyquist corner, where the zeroed ``xi`` vanishes) are
annihilated by every multiplier that divides by ``xi``.

The multipliers are exact for band-limited fields.  For fields with
grid-scale structure (indicator combinations) the lattice kernel of
``beurling`` differs from ``-1 / (pi d^2)`` far from the support, mostly
along the coordinate axes; pointwise values there come from direct
summation instead (see ``commutator.commutator_off_support``).
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np
import scipy.fft as sfft
from scipy.ndimage import uniform_filter
from scipy.signal import fftconvolve

from .grid import ComplexField, GridError, GridSpec, Square


def _workers() -> int | None:
    w = os.environ.get("BEURLING_MORREY_THREADS", "0")
    try:
        w = int(w)
    except ValueError:
        return None
    return None if w <= 0 else w


def _fft2(a):
    return sfft.fft2(a, workers=_workers())


def _ifft2(a):
    return sfft.ifft2(a, workers=_workers())


# --------------------------------------------------------------------------
# frequency tables

@lru_cache(maxsize=16)
def _wavenumbers(n: int, L: float) -> np.ndarray:
    k = 2 * np.pi * np.fft.fftfreq(n, d=2 * L / n)
    k[n // 2] = 0.0  # Nyquist treated as real
    k.setflags(write=False)
    return k


@lru_cache(maxsize=16)
def _xi(n: int, L: float) -> np.ndarray:
    k = _wavenumbers(n, L)
    xi = k[:, None] + 1j * k[None, :]
    xi.setflags(write=False)
    return xi


@lru_cache(maxsize=16)
def _beurling_symbol(n: int, L: float) -> np.ndarray:
    xi = _xi(n, L)
    m = np.zeros_like(xi)
    nz = xi != 0
    m[nz] = xi[nz].conj() / xi[nz]
    m.setflags(write=False)
    return m


def beurling_multiplier(xi):
    """``conj(xi) / xi`` with the value 0 at ``xi = 0``."""
    xi = np.asarray(xi, dtype=complex)
    out = np.zeros_like(xi)
    nz = xi != 0
    out[nz] = xi[nz].conj() / xi[nz]
    return out if out.ndim else complex(out)


def _apply_multiplier(f: ComplexField, symbol: np.ndarray) -> ComplexField:
    return ComplexField(f.spec, _ifft2(_fft2(f.values) * symbol))


def grid_mode(spec: GridSpec, mx: int, my: int) -> ComplexField:
    """Plane wave ``exp(i pi (mx x + my y) / L)`` sampled on the grid."""
    k = np.pi / spec.L
    z = spec.z
    return ComplexField(spec, np.exp(1j * k * (mx * z.real + my * z.imag)))


# --------------------------------------------------------------------------
# FFT path

def beurling(f: ComplexField) -> ComplexField:
    return _apply_multiplier(f, _beurling_symbol(f.spec.n, f.spec.L))


def beurling_power(f: ComplexField, N: int) -> ComplexField:
    if int(N) != N or N < 1:
        raise ValueError(f"power must be a positive integer, got {N!r}")
    return _apply_multiplier(f, _beurling_symbol(f.spec.n, f.spec.L) ** int(N))


def wirtinger(f: ComplexField, which: str) -> ComplexField:
    """Spectral Wirtinger derivative; ``which`` is ``'d'`` or ``'dbar'``."""
    xi = _xi(f.spec.n, f.spec.L)
    if which in ("d", "dz", "partial"):
        sym = 0.5j * xi.conj()
    elif which in ("dbar", "dzbar", "partial_bar"):
        sym = 0.5j * xi
    else:
        raise ValueError(f"unknown derivative {which!r}; use 'd' or 'dbar'")
    return _apply_multiplier(f, sym)


def cauchy(g: ComplexField) -> ComplexField:
    """Inverse of ``dbar`` on the torus, normalized to zero mean."""
    xi = _xi(g.spec.n, g.spec.L)
    sym = np.zeros_like(xi)
    nz = xi != 0
    sym[nz] = -2j / xi[nz]
    return _apply_multiplier(g, sym)


# --------------------------------------------------------------------------
# smooth truncation

def _e(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def smooth_step(t):
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    t = np.asarray(t, dtype=float)
    a = _e(t)
    b = _e(1.0 - t)
    return a / (a + b)


@dataclass(frozen=True)
class CutoffProfile:
    """Plateau cutoff: 0 on ``[0, 1/2]``, 1 on ``[1, inf)``."""

    fn: Callable[[np.ndarray], np.ndarray] = None

    def __call__(self, t):
        if self.fn is not None:
            return self.fn(t)
        return smooth_step(2.0 * (np.asarray(t, dtype=float) - 0.5))


DEFAULT_CUTOFF = CutoffProfile()


def kernel_b(d):
    """Beurling kernel ``-1 / (pi d^2)`` as a function of ``d = z - u``."""
    d = np.asarray(d, dtype=complex)
    return -1.0 / (np.pi * d * d)


def _check_scale(spec: GridSpec, eta: float):
    if not eta >= 2 * spec.h * (1 - 1e-12):
        raise GridError(f"truncation scale {eta} is below two grid cells (2h = {2 * spec.h})")


@lru_cache(maxsize=32)
def _truncated_kernel(n: int, L: float, eta: float) -> np.ndarray:
    h = 2 * L / n
    off = h * np.arange(-(n - 1), n)
    d = off[:, None] + 1j * off[None, :]
    r = np.abs(d)
    K = np.zeros_like(d)
    nz = r > 0
    K[nz] = kernel_b(d[nz]) * DEFAULT_CUTOFF(r[nz] / eta)
    K *= h * h
    K.setflags(write=False)
    return K


def _conv(vals: np.ndarray, K: np.ndarray) -> np.ndarray:
    n = vals.shape[0]
    full = fftconvolve(vals, K, mode="full")
    return full[n - 1:2 * n - 1, n - 1:2 * n - 1]


def beurling_quadrature(f: ComplexField, eta: float) -> ComplexField:
    """Truncated transform ``B_eta f`` by direct (non-periodic) summation.

    Sums ``h^2 K_B(z - u) phi(|z - u| / eta) f(u)`` over every grid sample
    ``u != z``.  The sum is a linear convolution evaluated with FFTs on a
    zero-padded ``(2n-1)^2`` array, so no wrap-around enters.
    """
    spec = f.spec
    _check_scale(spec, eta)
    K = _truncated_kernel(spec.n, spec.L, float(eta))
    return ComplexField(spec, _conv(f.values, K))


def beurling_quadrature_direct(f: ComplexField, eta: float, points=None) -> np.ndarray:
    """Brute-force loop version of :func:`beurling_quadrature` (small grids)."""
    spec = f.spec
    _check_scale(spec, eta)
    z = spec.z.ravel()
    fv = f.values.ravel()
    targets = z if points is None else np.asarray(points).ravel()
    out = np.empty(targets.size, dtype=complex)
    for i, zt in enumerate(targets):
        d = zt - z
        r = np.abs(d)
        nz = r > 0
        out[i] = spec.cell_area * np.sum(kernel_b(d[nz]) * DEFAULT_CUTOFF(r[nz] / eta) * fv[nz])
    return out if points is not None else out.reshape(spec.n, spec.n)


def truncated_commutator(b: ComplexField, f: ComplexField, eta: float) -> ComplexField:
    """``[b, B_eta] f = b B_eta f - B_eta(b f)``."""
    return b * beurling_quadrature(f, eta) - beurling_quadrature(b * f, eta)


def commutator_truncation_gap(b: ComplexField, f: ComplexField, eta: float,
                              eta_ref: float | None = None) -> np.ndarray:
    """Pointwise ``|[b, B_eta] f - [b, B_ref] f|`` with ``B_ref`` at ``2h``."""
    eta_ref = 2 * f.spec.h if eta_ref is None else eta_ref
    gap = truncated_commutator(b, f, eta) - truncated_commutator(b, f, eta_ref)
    return np.abs(gap.values)


def gradient_sup(b: ComplexField) -> float:
    """``max |grad b|`` from spectral derivatives (``|grad b| = |b_x| + ...``).

    For real ``b``, ``|grad b| = 2 |d b / dz|``; complex ``b`` uses
    ``|d b| + |dbar b|`` which bounds the real Jacobian norm.
    """
    d = wirtinger(b, "d").values
    db = wirtinger(b, "dbar").values
    return float(np.max(np.abs(d) + np.abs(db)))


def beurling_maximal(f: ComplexField, scales: Sequence[float]) -> np.ndarray:
    scales = list(scales)
    if not scales:
        raise ValueError("scale list is empty")
    out = None
    for eta in scales:
        v = np.abs(beurling_quadrature(f, eta).values)
        out = v if out is None else np.maximum(out, v)
    return out


# --------------------------------------------------------------------------
# Hardy-Littlewood maximal function

def hl_maximal(f: ComplexField, family: Iterable[Square]) -> np.ndarray:
    """Max of ``mean_Q |f|`` over family squares containing each sample.

    The cell of each sample (the square of side ``h`` centered there) is
    always part of the family, so samples covered by no listed square get
    ``|f(z)|`` and enlarging the family never lowers a value.
    """
    spec = f.spec
    a = np.abs(f.values)
    out = a.copy()
    for Q in family:
        sx, sy = spec.index_box(Q)
        block = a[sx, sy]
        if block.size == 0:
            continue
        m = block.mean()
        view = out[sx, sy]
        np.maximum(view, m, out=view)
    return out


def hl_maximal_centered(f: ComplexField, half_counts: Sequence[int]) -> np.ndarray:
    """Maximal function over squares centered at every sample.

    ``half_counts`` lists ``m`` for boxes of ``(2m+1)^2`` samples, i.e.
    squares ``Q(z, (m + 1/2) h)``.  Means count only in-window samples.
    """
    a = np.abs(f.values)
    ones = np.ones_like(a)
    out = a.copy()
    for m in half_counts:
        size = 2 * int(m) + 1
        s = uniform_filter(a, size=size, mode="constant", cval=0.0)
        c = uniform_filter(ones, size=size, mode="constant", cval=0.0)
        np.maximum(out, s / c, out=out)
    return out


def default_maximal_half_counts(spec: GridSpec) -> list[int]:
    """Box half-widths ``0, 1, 2, 4, ... < n/2`` for the centered maximal function."""
    out = [0]
    m = 1
    while m < spec.n // 2:
        out.append(m)
        m *= 2
    return out
